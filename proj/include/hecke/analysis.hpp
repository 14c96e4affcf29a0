#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "chebyshev.hpp"
#include "errors.hpp"
#include "groups.hpp"
#include "parallel.hpp"
#include "reps.hpp"
#include "transfer.hpp"
#include "zeta.hpp"

namespace hecke {

// ---------------------------------------------------------------------------
// Eigenvalue-1 search on slow operators

struct EigenReport {
    cplx s;
    cplx eigenvalue;
    CVec eigenvector;
    double stability = 0;  // |Delta eigenvalue| under order doubling
};

struct EigenPair {
    cplx value;
    CVec vector;
};

inline EigenPair nearest_eigenpair(const CMat& M, cplx target) {
    Eigen::ComplexEigenSolver<CMat> es(M);
    int best = 0;
    for (int i = 1; i < es.eigenvalues().size(); ++i)
        if (std::abs(es.eigenvalues()[i] - target) < std::abs(es.eigenvalues()[best] - target))
            best = i;
    return {es.eigenvalues()[best], es.eigenvectors().col(best)};
}

// Slow operator in chart-cocycle form: the eigenvalues of the plain form, with period-type
// eigenfunctions smooth at the chart ends.
inline TransferOperator slow_cocycle(const HeckeGroup& G, const UnitaryRep& chi,
                                     ThetaSystem theta = ThetaSystem::reduced) {
    auto L = build_slow(G, chi, theta);
    L.mode = ChartMode::cocycle;
    return L;
}

// Grid points s where the discretized slow operator has an eigenvalue within tol_eig of 1,
// stable under order doubling.
inline std::vector<EigenReport> slow_eigen_one_search(const TransferOperator& L,
                                                      const std::vector<cplx>& grid, int order = 48,
                                                      double tol_eig = 1e-6) {
    std::vector<std::optional<EigenReport>> out(grid.size());
    parallel_for(static_cast<int>(grid.size()), [&](int i) {
        cplx s = grid[i];
        auto D = discretize(L, s, order);
        if (D.matrix.size() == 0 || D.matrix.cwiseAbs().maxCoeff() == 0) return;
        auto e = nearest_eigenpair(D.matrix, 1.0);
        if (std::abs(e.value - 1.0) >= tol_eig) return;
        auto e2 = nearest_eigenpair(discretize(L, s, 2 * order).matrix, 1.0);
        double st = std::abs(e2.value - e.value);
        if (std::abs(e2.value - 1.0) >= tol_eig) return;
        out[i] = EigenReport{s, e.value, e.vector, st};
    });
    std::vector<EigenReport> r;
    for (auto& o : out)
        if (o) r.push_back(*o);
    return r;
}

inline std::vector<EigenReport> slow_eigen_one_search(const HeckeGroup& G, const UnitaryRep& chi,
                                                      const std::vector<cplx>& grid, int order = 48,
                                                      double tol_eig = 1e-6) {
    return slow_eigen_one_search(slow_cocycle(G, chi), grid, order, tol_eig);
}

// ---------------------------------------------------------------------------
// Theta full and reduced slow systems

// f_c from (f_a, f_b) on the full Theta slow operator: mu f_c = alpha(1) f_a + alpha(k4) f_b
// (mu = 1 for eigenvalue-1 vectors). Inputs and output are node values in L's charts.
inline CVec theta_lift(const TransferOperator& full, const CVec& fa, const CVec& fb, cplx s,
                       int order, cplx mu = 1.0) {
    if (full.size() != 3) throw DomainError("theta_lift needs the full Theta slow operator");
    const int d = full.rep.dim;
    ChebyshevBasis B(order);
    const Domain& dc = full.domains[2];
    CVec fc = CVec::Zero(order * d);
    const CVec* src[2] = {&fa, &fb};
    for (const Term& t : full.terms) {
        if (t.target != 2) continue;
        const Domain& ds = full.domains[t.source];
        Elem g = t.element(1);
        GroupElement gi = g.m.inverse();
        CMat W = full.rep(g);
        for (int p = 0; p < order; ++p) {
            double tp = B.nodes()[p];
            double x = dc.chart.apply(tp);
            double y = gi.apply(x);
            double u = ds.chart_inv.apply(y);
            cplx J = full.mode == ChartMode::cocycle
                         ? j_s_real(ds.chart_inv * gi * dc.chart, tp, s)
                         : j_s_real(gi, x, s);
            for (int a = 0; a < d; ++a) {
                cplx acc = 0;
                for (int b = 0; b < d; ++b) {
                    std::vector<cplx> vals(order);
                    for (int q = 0; q < order; ++q) vals[q] = (*src[t.source])(q * d + b);
                    acc += W(a, b) * B.interpolate(vals, u);
                }
                fc(p * d + a) += J * acc;
            }
        }
    }
    return fc / mu;
}

struct LiftCheck {
    cplx s;
    cplx mu;
    double residual = 0;  // ||lift(restrict v) - v|| / ||v||
};

// Eigen-triples of the discretized full operator: drop f_c, lift it back, compare.
inline std::vector<LiftCheck> theta_lift_roundtrip(const HeckeGroup& G, const UnitaryRep& chi,
                                                   cplx s, int order = 32, int count = 3) {
    if (G.cls != GroupClass::Theta) throw DomainError("theta_lift needs the Theta group");
    auto full = build_slow(G, chi, ThetaSystem::full);
    full.mode = ChartMode::cocycle;
    auto D = discretize(full, s, order);
    Eigen::ComplexEigenSolver<CMat> es(D.matrix);
    std::vector<int> idx(es.eigenvalues().size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        return std::abs(es.eigenvalues()[a]) > std::abs(es.eigenvalues()[b]);
    });
    std::vector<LiftCheck> out;
    const int n = order * chi.dim;
    for (int k = 0; k < count && k < static_cast<int>(idx.size()); ++k) {
        cplx mu = es.eigenvalues()[idx[k]];
        CVec v = es.eigenvectors().col(idx[k]);
        CVec fc = theta_lift(full, v.segment(0, n), v.segment(n, n), s, order, mu);
        out.push_back({s, mu, (fc - v.segment(2 * n, n)).norm() / v.norm()});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Direct sums

struct DirectSumReport {
    double block_residual = 0;  // max entry difference after the index permutation
    double det_rel_error = 0;
    bool blocks_ok = false, det_ok = false;
    cplx det_sum, det1, det2;
};

inline DirectSumReport direct_sum_check(const HeckeGroup& G, const UnitaryRep& chi1,
                                        const UnitaryRep& chi2, cplx s, int order = 32,
                                        TailOptions opt = {}) {
    auto chi = direct_sum(chi1, chi2);
    auto D = discretize(build_fast(G, chi), s, order, opt);
    auto D1 = discretize(build_fast(G, chi1), s, order, opt);
    auto D2 = discretize(build_fast(G, chi2), s, order, opt);
    const int d1 = chi1.dim, d2 = chi2.dim, d = d1 + d2;
    const int nd = static_cast<int>(D.offsets.size());
    // perm[i]: position of sum index i in the block-diagonal (D1, D2) ordering.
    std::vector<int> perm(D.matrix.rows());
    const int n1 = static_cast<int>(D1.matrix.rows());
    for (int j = 0; j < nd; ++j)
        for (int p = 0; p < D.orders[j]; ++p)
            for (int c = 0; c < d; ++c)
                perm[D.index(j, p, c)] = c < d1 ? D1.index(j, p, c) : n1 + D2.index(j, p, c - d1);
    CMat B = CMat::Zero(D.matrix.rows(), D.matrix.cols());
    B.topLeftCorner(n1, n1) = D1.matrix;
    B.bottomRightCorner(D2.matrix.rows(), D2.matrix.cols()) = D2.matrix;
    DirectSumReport R;
    for (int i = 0; i < D.matrix.rows(); ++i)
        for (int k = 0; k < D.matrix.cols(); ++k)
            R.block_residual = std::max(R.block_residual, std::abs(D.matrix(i, k) - B(perm[i], perm[k])));
    R.det_sum = fredholm_det(D);
    R.det1 = fredholm_det(D1);
    R.det2 = fredholm_det(D2);
    R.det_rel_error = std::abs(R.det_sum - R.det1 * R.det2) / std::abs(R.det_sum);
    R.blocks_ok = R.block_residual <= 1e-13;
    R.det_ok = R.det_rel_error <= 1e-10;
    return R;
}

// ---------------------------------------------------------------------------
// Billiard operators (q odd)

inline void require_billiard(const HeckeGroup& G, const UnitaryRep& chi) {
    if (!G.q || *G.q % 2 == 0) throw QEvenUnsupported("billiard operators need odd q");
    if (!chi.Q) throw QNotDefined("billiard operators need chi(Q)");
    if (!chi.group.same_as(G)) throw GroupMismatch("representation belongs to another group");
}

inline TransferOperator build_billiard_slow(const HeckeGroup& G, const UnitaryRep& chi) {
    require_billiard(G, chi);
    const int q = *G.q, m = (q + 1) / 2;
    auto F = element_families(G);
    TransferOperator L;
    L.flavor = Flavor::billiard_slow;
    L.mode = ChartMode::plain;
    L.rep = chi;
    L.domains = {interval_domain("(0,1)", 0, 1)};
    Elem one;
    for (int k = m; k <= q - 1; ++k) {
        L.terms.push_back({"g" + std::to_string(k), 0, 0, F.g[k], one, one, false});
        L.terms.push_back({"Qg" + std::to_string(k), 0, 0, G.Q * F.g[k], one, one, false});
    }
    return L;
}

inline TransferOperator build_billiard_fast(const HeckeGroup& G, const UnitaryRep& chi) {
    require_billiard(G, chi);
    const int q = *G.q;
    auto A = billiard_alphabet(G);
    auto E = construct_discs(G);
    GroupElement Ci = conjugator().inverse();
    const Domain& Eq = E.back();
    std::vector<Domain> doms = {charted_disc(A.domains[0], Ci * Eq.chart)};
    if (q == 3) {
        // No middle letters: the E_r domain receives tails but feeds nothing back.
        Alphabet B;
        B.domains = {A.domains[0]};
        for (auto& e : A.edges)
            if (e.target == 0 && e.source == 0) B.edges.push_back(e);
        A = B;
    } else {
        doms.push_back(charted_disc(A.domains[1], Ci * E[1].chart));
    }
    return operator_from_alphabet(A, doms, chi, Flavor::billiard_fast, ChartMode::cocycle);
}

inline std::pair<TransferOperator, TransferOperator> build_billiard(const HeckeGroup& G,
                                                                    const UnitaryRep& chi) {
    return {build_billiard_slow(G, chi), build_billiard_fast(G, chi)};
}

// Product over primitive classes of the extended group, read off the fast billiard alphabet;
// reflection letters carry det = -1.
inline EulerResult billiard_dynamical_zeta(const HeckeGroup& G, const UnitaryRep& chi, cplx s,
                                           const EulerCutoffs& cut = {}) {
    return euler_product(build_billiard_fast(G, chi), s, cut);
}

// ---------------------------------------------------------------------------
// lambda -> 2

struct ConvergenceRow {
    double lambda;
    double norm;  // spectral norm of M(lambda) - M(2), a discretized proxy for the operator norm
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    double fitted_C = 0;  // max_i norm_i / |lambda_i - 2|
    bool strictly_decreasing = false;
};

inline ConvergenceTable convergence_study(cplx s, const std::function<UnitaryRep(const HeckeGroup&)>& chi_family,
                                          const std::vector<double>& lambdas, int order = 24) {
    auto G2 = hecke_group_lambda(2);
    auto ref = discretize(build_slow(G2, chi_family(G2), ThetaSystem::reduced), s, order).matrix;
    ConvergenceTable T;
    for (double l : lambdas) {
        if (l < 2) throw DomainError("convergence study needs lambda >= 2");
        auto G = hecke_group_lambda(l);
        auto M = discretize(build_slow(G, chi_family(G), ThetaSystem::reduced), s, order).matrix;
        double nrm = (M - ref).norm() == 0 ? 0.0 : Eigen::JacobiSVD<CMat>(M - ref).singularValues()(0);
        T.rows.push_back({l, nrm});
        if (l > 2) T.fitted_C = std::max(T.fitted_C, nrm / (l - 2));
    }
    T.strictly_decreasing = true;
    for (size_t i = 1; i < T.rows.size(); ++i)
        T.strictly_decreasing &= T.rows[i].norm < T.rows[i - 1].norm;
    return T;
}

}  // namespace hecke
