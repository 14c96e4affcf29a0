#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include "errors.hpp"
#include "groups.hpp"

namespace hecke {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

struct UnitaryRep {
    int dim = 1;
    CMat S, T;
    std::optional<CMat> Q;
    HeckeGroup group;

    CMat image(Gen g) const {
        switch (g) {
            case Gen::S: return S;
            case Gen::T: return T;
            default:
                if (!Q) throw QNotDefined("representation has no image for Q");
                return *Q;
        }
    }

    CMat eval(const GenWord& w) const {
        CMat r = CMat::Identity(dim, dim);
        for (auto& l : w) {
            CMat m = image(l.gen);
            if (l.pow < 0) m = m.adjoint().eval();
            for (int k = 0; k < std::abs(l.pow); ++k) r = r * m;
        }
        return r;
    }

    CMat operator()(const Elem& e) const { return eval(e.word); }
};

inline double unitarity_residual(const CMat& m) {
    return (m.adjoint() * m - CMat::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

struct RelationReport {
    std::string worst;
    double residual = 0;
};

inline RelationReport relation_residuals(const UnitaryRep& r) {
    RelationReport rep;
    auto check = [&](const std::string& name, const CMat& lhs, const CMat& rhs) {
        double res = (lhs - rhs).cwiseAbs().maxCoeff();
        if (res > rep.residual || rep.worst.empty()) rep = {name, res};
    };
    CMat I = CMat::Identity(r.dim, r.dim);
    check("chi(S)^2 = I", r.S * r.S, I);
    if (r.group.cls == GroupClass::CofiniteSmall) {
        CMat p = I, ts = r.T * r.S;
        for (int k = 0; k < *r.group.q; ++k) p = p * ts;
        check("(chi(T)chi(S))^q = I", p, I);
    }
    if (r.Q) {
        const CMat& Q = *r.Q;
        check("chi(Q)^2 = I", Q * Q, I);
        check("chi(Q)chi(S)chi(Q) = chi(S)^-1", Q * r.S * Q, r.S.adjoint());
        // QTQ = S T^-1 S^-1 in PGL2.
        check("chi(Q)chi(T)chi(Q) = chi(S)chi(T)^-1chi(S)^-1", Q * r.T * Q,
              r.S * r.T.adjoint() * r.S.adjoint());
    }
    return rep;
}

inline UnitaryRep rep_from_generators(const HeckeGroup& G, const CMat& S, const CMat& T,
                                      std::optional<CMat> Q = std::nullopt, double tol = 1e-10) {
    if (S.rows() != S.cols() || T.rows() != T.cols() || S.rows() != T.rows() ||
        (Q && (Q->rows() != S.rows() || Q->cols() != S.cols())) || S.rows() < 1)
        throw DomainError("generator images must be square matrices of equal size");
    UnitaryRep r{static_cast<int>(S.rows()), S, T, Q, G};
    double u = std::max(unitarity_residual(S), unitarity_residual(T));
    if (Q) u = std::max(u, unitarity_residual(*Q));
    if (u > tol) throw NotUnitary("unitarity residual " + std::to_string(u));
    auto rel = relation_residuals(r);
    if (rel.residual > tol)
        throw RelationViolated(rel.worst + " fails, residual " + std::to_string(rel.residual));
    return r;
}

inline UnitaryRep trivial_rep(const HeckeGroup& G, int d = 1, std::optional<double> q_sign = {}) {
    CMat I = CMat::Identity(d, d);
    std::optional<CMat> Q;
    if (q_sign) Q = CMat(*q_sign * I);
    return rep_from_generators(G, I, I, Q);
}

inline UnitaryRep one_dim_rep(const HeckeGroup& G, cplx chiS, cplx chiT,
                              std::optional<cplx> chiQ = std::nullopt) {
    CMat S(1, 1), T(1, 1);
    S(0, 0) = chiS;
    T(0, 0) = chiT;
    std::optional<CMat> Q;
    if (chiQ) Q = CMat::Constant(1, 1, *chiQ);
    return rep_from_generators(G, S, T, Q);
}

// Random character: chi(S) = +-1, chi(T) a unit with (chi(T)chi(S))^q = 1 when q is finite.
inline UnitaryRep random_one_dim_rep(const HeckeGroup& G, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0, 1);
    double sS = u(rng) < 0.5 ? 1 : -1;
    cplx chiT;
    if (G.q) {
        int j = std::uniform_int_distribution<int>(0, *G.q - 1)(rng);
        chiT = sS * std::polar(1.0, 2 * std::numbers::pi * j / *G.q);
    } else {
        chiT = std::polar(1.0, 2 * std::numbers::pi * u(rng));
    }
    return one_dim_rep(G, sS, chiT);
}

inline constexpr double eps_eig = 1e-8;

inline int fixed_dim(const CMat& m) {
    Eigen::ComplexEigenSolver<CMat> es(m, false);
    int n = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (std::abs(es.eigenvalues()[i] - cplx(1)) < eps_eig) ++n;
    return n;
}

// Degree of singularity: fixed-space dimension at the parabolic generators.
inline int sd(const UnitaryRep& chi) {
    int n = fixed_dim(chi.T);
    if (chi.group.cls == GroupClass::Theta) {
        // P_-1 = k_2 = T^-1 S.
        n = std::max(n, fixed_dim(chi.T.adjoint() * chi.S));
    }
    return n;
}

inline UnitaryRep direct_sum(const UnitaryRep& a, const UnitaryRep& b) {
    if (!a.group.same_as(b.group)) throw GroupMismatch("summands live on different groups");
    if (a.Q.has_value() != b.Q.has_value())
        throw GroupMismatch("only one summand defines chi(Q)");
    auto blk = [&](const CMat& x, const CMat& y) {
        CMat m = CMat::Zero(a.dim + b.dim, a.dim + b.dim);
        m.topLeftCorner(a.dim, a.dim) = x;
        m.bottomRightCorner(b.dim, b.dim) = y;
        return m;
    };
    UnitaryRep r{a.dim + b.dim, blk(a.S, b.S), blk(a.T, b.T), std::nullopt, a.group};
    if (a.Q) r.Q = blk(*a.Q, *b.Q);
    return r;
}

}  // namespace hecke
