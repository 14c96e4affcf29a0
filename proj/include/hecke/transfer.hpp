#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "chebyshev.hpp"
#include "errors.hpp"
#include "groups.hpp"
#include "lerch.hpp"
#include "moebius.hpp"
#include "reps.hpp"

namespace hecke {

// ---------------------------------------------------------------------------
// Domains

// Open interval or open disc, parametrized by a real Moebius chart that maps (-1,1) onto
// the real trace and the unit disc onto the disc.
struct Domain {
    std::string name;
    bool is_disc = true;
    double a = -1, b = 1;  // interval endpoints, or the boundary points of B(a,b)
    GroupElement chart, chart_inv;

    bool contains_infinity() const { return is_disc && a > b; }

    // Positive inside the (closed-disc) chart image, zero on the boundary.
    double chart_margin(cplx z) const { return 1 - std::abs(chart_inv.apply(z)); }

    cplx boundary_point(double theta) const { return chart.apply(std::polar(1.0, theta)); }
};

namespace detail {
inline Domain with_chart(std::string name, bool disc, double a, double b, const GroupElement& c) {
    return {std::move(name), disc, a, b, c, c.inverse()};
}
}  // namespace detail

// B(a,b): the open disc whose boundary passes through a and b; contains infinity when a > b.
inline Domain disc_domain(std::string name, double a, double b) {
    if (a == b) throw DomainError("B(a,b) needs a != b");
    GroupElement chart = a < b ? GroupElement((b - a) / 2, (a + b) / 2, 0, 1)
                               : GroupElement((a + b) / 2, (b - a) / 2, 1, 0);
    return detail::with_chart(std::move(name), true, a, b, chart);
}

inline Domain centered_disc(std::string name, double c, double r) {
    return disc_domain(std::move(name), c - r, c + r);
}

// Disc image of the unit disc under a real Moebius chart.
inline Domain charted_disc(std::string name, const GroupElement& chart) {
    double a = chart.apply(-1.0), b = chart.apply(1.0);
    return detail::with_chart(std::move(name), true, a, b, chart);
}

// Interval (a,b) with a, b possibly infinite; charts are fixed Moebius maps.
inline Domain interval_domain(std::string name, double a, double b) {
    const double inf = std::numeric_limits<double>::infinity();
    if (!(a < b) || (a == -inf && b == inf)) throw DomainError("bad interval");
    GroupElement chart;
    if (a == -inf)
        chart = GroupElement(b + 1, b - 1, 1, 1);  // t -> b - (1-t)/(1+t)
    else if (b == inf)
        chart = GroupElement(1 - a, a + 1, -1, 1);  // t -> a + (1+t)/(1-t)
    else
        chart = GroupElement((b - a) / 2, (a + b) / 2, 0, 1);
    return detail::with_chart(std::move(name), false, a, b, chart);
}

// ---------------------------------------------------------------------------
// Symbolic operators

using Term = EdgeFamily;

enum class Flavor { slow, fast, billiard_slow, billiard_fast };
// plain: functions sampled directly; cocycle: conjugated by the chart's j_s factor
// (a similarity, so determinants and traces are unchanged).
enum class ChartMode { plain, cocycle };

struct TransferOperator {
    Flavor flavor = Flavor::fast;
    ChartMode mode = ChartMode::cocycle;
    std::vector<Domain> domains;
    std::vector<Term> terms;
    UnitaryRep rep;

    int size() const { return static_cast<int>(domains.size()); }

    Eigen::MatrixXi pattern() const {
        Eigen::MatrixXi z = Eigen::MatrixXi::Zero(size(), size());
        for (auto& t : terms) z(t.target, t.source) += 1;
        return z;
    }

    int nonzero_blocks() const { return static_cast<int>((pattern().array() > 0).count()); }
};

inline TransferOperator operator_from_alphabet(const Alphabet& A, std::vector<Domain> domains,
                                               const UnitaryRep& chi, Flavor f, ChartMode m) {
    if (domains.size() != A.domains.size()) throw DomainError("domain count mismatch");
    for (size_t i = 0; i < domains.size(); ++i) domains[i].name = A.domains[i];
    return {f, m, std::move(domains), A.edges, chi};
}

// Slow system choices for the Theta group.
enum class ThetaSystem { full, reduced };

inline TransferOperator build_slow(const HeckeGroup& G, const UnitaryRep& chi,
                                   ThetaSystem theta = ThetaSystem::reduced) {
    if (!chi.group.same_as(G)) throw GroupMismatch("representation belongs to another group");
    const double inf = std::numeric_limits<double>::infinity();
    auto F = element_families(G);
    TransferOperator L;
    L.flavor = Flavor::slow;
    L.mode = ChartMode::plain;
    L.rep = chi;
    Elem one;
    auto fin = [&](std::string n, int t, int s, const Elem& e) {
        L.terms.push_back({std::move(n), t, s, e, one, one, false});
    };
    if (G.cls == GroupClass::CofiniteSmall) {
        L.domains = {interval_domain("(0,inf)", 0, inf)};
        for (int k = 1; k < *G.q; ++k) fin("g" + std::to_string(k), 0, 0, F.g[k]);
    } else {
        std::string p = G.cls == GroupClass::Theta ? "k" : "a";
        const Elem &e1 = F.named[p + "1"], &e2 = F.named[p + "2"], &e3 = F.named[p + "3"];
        L.domains = {interval_domain("(-1,inf)", -1, inf), interval_domain("(-inf,1)", -inf, 1)};
        if (G.cls == GroupClass::Theta && theta == ThetaSystem::full) {
            L.domains.push_back(interval_domain("(0,inf)", 0, inf));
            fin("k2", 0, 0, e2);
            fin("k1^-1", 0, 2, e1.inverse());
            fin("k3", 1, 1, e3);
            fin("k3", 1, 2, e3);
            fin("1", 2, 0, one);
            fin("k4", 2, 1, F.named["k4"]);
        } else {
            fin(p + "1^-1", 0, 0, e1.inverse());
            fin(p + "2", 0, 0, e2);
            fin(p + "2", 0, 1, e2);
            fin(p + "3", 1, 0, e3);
            fin(p + "1", 1, 1, e1);
            fin(p + "3", 1, 1, e3);
        }
    }
    return L;
}

// ---------------------------------------------------------------------------
// Discs

struct ConditionMargin {
    std::string condition;
    double margin = 0;
};

struct DiscCertificate {
    std::vector<ConditionMargin> conditions;
    int samples = 360;

    double worst() const {
        double w = std::numeric_limits<double>::infinity();
        for (auto& c : conditions) w = std::min(w, c.margin);
        return w;
    }
    const ConditionMargin& worst_condition() const {
        return *std::min_element(conditions.begin(), conditions.end(),
                                 [](auto& x, auto& y) { return x.margin < y.margin; });
    }
    bool passes(double min_margin = 1e-3) const { return worst() >= min_margin; }
};

namespace detail {

// Chart margin of g.closure(src) inside dst: sampled boundary plus pole exclusion.
inline double image_margin(const GroupElement& g, const Domain& src, const Domain& dst,
                           int samples) {
    // The pole of g must lie outside the closed source disc.
    if (std::abs(g.c) > 1e-300) {
        double pole = -g.d / g.c;
        double pm = src.chart_margin(pole);
        if (pm >= -1e-12) return -1 - pm;
    }
    double m = std::numeric_limits<double>::infinity();
    for (int k = 0; k < samples; ++k) {
        double th = 2 * std::numbers::pi * (k + 0.5) / samples;
        m = std::min(m, dst.chart_margin(g.apply(src.boundary_point(th))));
    }
    return m;
}

// Margin of a parabolic family g_n = left * base^-n * right, n >= 1: sampled n plus the
// limit fixed point.
inline double family_margin(const GroupElement& left, const GroupElement& base_inv,
                            const GroupElement& right, const Domain& src, const Domain& dst,
                            int samples, int nmax) {
    double m = std::numeric_limits<double>::infinity();
    GroupElement p = base_inv;
    for (int n = 1; n <= nmax; ++n) {
        m = std::min(m, image_margin(left * p * right, src, dst, samples));
        p = p * base_inv;
    }
    double fp = attracting_fixed_point(base_inv);
    cplx lim = std::isinf(fp) ? cplx(std::numeric_limits<double>::infinity()) : cplx(fp);
    double lm = std::isinf(fp) ? 1 - std::abs(dst.chart_inv.apply(left.apply(BoundaryPoint::infinity())).value())
                               : dst.chart_margin(left.apply(lim));
    return std::min(m, lm);
}

// Analytic margin for the search: image of a symmetric disc under a real map is spanned by
// the images of its real diameter when the pole is outside.
inline double fast_margin(const GroupElement& g, double c, double r, double dc, double dr) {
    if (std::abs(g.c) > 1e-300 && std::abs(-g.d / g.c - c) <= r) return -1e9;
    double u = g.apply(c - r), v = g.apply(c + r);
    double ic = (u + v) / 2, ir = std::abs(u - v) / 2;
    return (dr - (std::abs(ic - dc) + ir)) / dr;
}

}  // namespace detail

// Intervals E_1, E_r, E_{q-1} of the conjugated fast system.
inline std::array<std::pair<double, double>, 3> fast_intervals(const HeckeGroup& G) {
    double e = (G.lambda - 1) / (G.lambda + 1);
    return {{{e, 1}, {-e, e}, {-1, -e}}};
}

struct SmallDiscParams {
    double c1 = 0, R1 = 0, Rr = 0;
};

// Margins of conditions (i)-(x) for discs E_1 = D(c1,R1), E_{q-1} = -E_1, E_r = D(0,Rr).
inline DiscCertificate certify_small_discs(const HeckeGroup& G, SmallDiscParams p,
                                           int samples = 360, int nmax = 200) {
    int q = *G.q;
    auto F = element_families(G);
    auto I = fast_intervals(G);
    Domain E1 = centered_disc("E1", p.c1, p.R1), Eq = centered_disc("Eq", -p.c1, p.R1);
    std::vector<Domain> all = {E1, Eq};
    bool mid = q > 3;
    Domain Er = centered_disc("Er", 0, mid ? p.Rr : 0.5);
    if (mid) all.push_back(Er);
    DiscCertificate C;
    C.samples = samples;
    auto add = [&](std::string n, double m) { C.conditions.push_back({std::move(n), m}); };
    add("(i) closure E1 in E1", std::min(E1.chart_margin(I[0].first), E1.chart_margin(I[0].second)));
    add("(i) closure Eq-1 in Eq-1", std::min(Eq.chart_margin(I[2].first), Eq.chart_margin(I[2].second)));
    if (mid) add("(i) closure Er in Er", std::min(Er.chart_margin(I[1].first), Er.chart_margin(I[1].second)));
    // (ii): J z = -z; the parametrization is J-symmetric, checked on samples.
    double sym = 0;
    for (int k = 0; k < samples; ++k) {
        cplx z = E1.boundary_point(2 * std::numbers::pi * (k + 0.5) / samples);
        sym = std::max(sym, std::abs(Eq.chart_margin(-z)));
        if (mid) sym = std::max(sym, std::abs(Er.chart_margin(-Er.boundary_point(2 * std::numbers::pi * (k + 0.5) / samples))));
    }
    add("(ii) J symmetry", 1 - sym * 1e12);
    if (mid) {
        for (int k = 2; k <= q - 2; ++k) {
            auto hi = F.h[k].m.inverse();
            for (auto* src : {&E1, &Er, &Eq})
                add("(iii) h" + std::to_string(k) + "^-1 " + src->name + " in Er",
                    detail::image_margin(hi, *src, Er, samples));
        }
    }
    GroupElement id;
    auto h1i = F.h[1].m.inverse(), hqi = F.h[q - 1].m.inverse();
    std::vector<const Domain*> src4 = mid ? std::vector<const Domain*>{&Er, &Eq}
                                          : std::vector<const Domain*>{&Eq};
    std::vector<const Domain*> src5 = mid ? std::vector<const Domain*>{&E1, &Er}
                                          : std::vector<const Domain*>{&E1};
    for (auto* src : src4)
        add("(iv) h1^-n " + src->name + " in E1",
            detail::family_margin(id, h1i, id, *src, E1, samples, nmax));
    for (auto* src : src5)
        add("(v) hq-1^-n " + src->name + " in Eq-1",
            detail::family_margin(id, hqi, id, *src, Eq, samples, nmax));
    // (vi)/(vii): |(h^-1)'| < 1, certified on the discs the tails act on.
    auto deriv = [&](const GroupElement& g, const std::vector<const Domain*>& ds) {
        double mx = 0;
        for (auto* d : ds)
            for (int k = 0; k < samples; ++k)
                mx = std::max(mx, std::abs(g.derivative(d->boundary_point(2 * std::numbers::pi * (k + 0.5) / samples))));
        return 1 - mx;
    };
    add("(vi) |(h1^-1)'| < 1", deriv(h1i, src4));
    add("(vii) |(hq-1^-1)'| < 1", deriv(hqi, src5));
    add("(viii) Re z > -1 on E1", p.c1 - p.R1 + 1);
    add("(ix) Re z < 1 on Eq-1", 1 - (-p.c1 + p.R1));
    if (mid) add("(x) |Re z| < 1 on Er", 1 - p.Rr);
    return C;
}

inline SmallDiscParams search_small_discs(const HeckeGroup& G) {
    int q = *G.q;
    auto F = element_families(G);
    double e = (G.lambda - 1) / (G.lambda + 1);
    auto h1i = F.h[1].m.inverse(), hqi = F.h[q - 1].m.inverse();
    auto score = [&](double c1, double R1, double Rr) {
        double m = std::min({(R1 - std::abs(e - c1)) / R1, (R1 - std::abs(1 - c1)) / R1, c1 - R1 + 1});
        if (q > 3) m = std::min({m, (Rr - e) / Rr, 1 - Rr});
        struct D { double c, r; };
        D E1{c1, R1}, Eq{-c1, R1}, Er{0, Rr};
        if (q > 3)
            for (int k = 2; k <= q - 2 && m > -1; ++k) {
                auto hi = F.h[k].m.inverse();
                for (D s : {E1, Er, Eq}) m = std::min(m, detail::fast_margin(hi, s.c, s.r, 0, Rr));
            }
        std::vector<D> s4 = q > 3 ? std::vector<D>{Er, Eq} : std::vector<D>{Eq};
        std::vector<D> s5 = q > 3 ? std::vector<D>{E1, Er} : std::vector<D>{E1};
        GroupElement p1 = h1i, p2 = hqi;
        for (int n = 1; n <= 20 && m > -1; ++n) {
            for (D s : s4) m = std::min(m, detail::fast_margin(p1, s.c, s.r, c1, R1));
            for (D s : s5) m = std::min(m, detail::fast_margin(p2, s.c, s.r, -c1, R1));
            p1 = p1 * h1i;
            p2 = p2 * hqi;
        }
        return m;
    };
    double best = -1e300;
    SmallDiscParams bp;
    for (int i = 0; i < 25; ++i) {
        double c1 = 0.3 + 1.2 * i / 24;
        for (int j = 0; j < 37; ++j) {
            double R1 = 0.2 + 1.8 * j / 36;
            if (c1 - R1 <= -1) continue;
            int nr = q > 3 ? 20 : 1;
            for (int k = 0; k < nr; ++k) {
                double lo = std::max(e, 0.05);
                double Rr = q > 3 ? lo + (0.99 - lo) * k / 19 : 0.5;
                double m = score(c1, R1, Rr);
                if (m > best) best = m, bp = {c1, R1, Rr};
            }
        }
    }
    return bp;
}

// The printed discs of the non-cofinite fast system.
inline std::vector<Domain> printed_noncofinite_discs(double lambda) {
    return {disc_domain("D1", -1, 1), disc_domain("D2", (5 * lambda - 4) / 6, -lambda / 2),
            disc_domain("D3", lambda / 2, (4 - 5 * lambda) / 6), disc_domain("D1'", -1, 1)};
}

inline std::vector<Domain> construct_discs(const HeckeGroup& G) {
    if (G.cls == GroupClass::CofiniteSmall) {
        auto p = search_small_discs(G);
        auto cert = certify_small_discs(G, p);
        if (!cert.passes())
            throw DiscSearchFailed(cert.worst_condition().condition + " margin " +
                                   std::to_string(cert.worst()));
        std::vector<Domain> d = {centered_disc("E1", p.c1, p.R1)};
        if (*G.q > 3) d.push_back(centered_disc("Er", 0, p.Rr));
        d.push_back(centered_disc("Eq-1", -p.c1, p.R1));
        return d;
    }
    if (G.cls == GroupClass::Theta)
        return {disc_domain("D1", -1.5, 0.5), disc_domain("D2", -0.5, 2.5),
                disc_domain("D3", 0, -10),    disc_domain("D4", 10, 0),
                disc_domain("D5", -2.5, 0.5), disc_domain("D6", -0.5, 1.5)};
    // The printed D2, D3 contain the poles -lambda, lambda of a2^-1, a3^-1; their inner
    // boundary points are moved to -2 lambda and 2 lambda.
    double l = G.lambda;
    return {disc_domain("D1", -1, 1), disc_domain("D2", (5 * l - 4) / 6, -2 * l),
            disc_domain("D3", 2 * l, (4 - 5 * l) / 6), disc_domain("D1'", -1, 1)};
}

// Contraction margins of every term of a fast operator on boundary samples.
inline DiscCertificate certify_operator(const TransferOperator& L, int samples = 360,
                                        int nmax = 200) {
    DiscCertificate C;
    C.samples = samples;
    for (auto& t : L.terms) {
        const Domain &tgt = L.domains[t.target], &src = L.domains[t.source];
        std::string n = t.name + " : " + tgt.name + " -> " + src.name;
        double m = t.parabolic
                       ? detail::family_margin(t.right.m.inverse(), t.base.m.inverse(),
                                               t.left.m.inverse(), tgt, src, samples, nmax)
                       : detail::image_margin(t.element(1).m.inverse(), tgt, src, samples);
        C.conditions.push_back({n, m});
    }
    return C;
}

inline TransferOperator build_fast(const HeckeGroup& G, const UnitaryRep& chi,
                                   std::vector<Domain> discs = {}) {
    if (!chi.group.same_as(G)) throw GroupMismatch("representation belongs to another group");
    if (discs.empty()) discs = construct_discs(G);
    return operator_from_alphabet(fast_alphabet(G), std::move(discs), chi, Flavor::fast,
                                  ChartMode::cocycle);
}

// ---------------------------------------------------------------------------
// Discretization

enum class TailMode { node_sum, split_m };

struct TailOptions {
    TailMode mode = TailMode::node_sum;
    long n_max = 64;  // node_sum: terms summed directly before the expansion
    int M = 8;        // split_m: Taylor order
    long n0 = 1;      // split_m: first index of the expanded part
    bool allow_pole = false;
    double pole_guard = 1e-4;
};

struct DiscretizedOperator {
    CMat matrix;
    std::vector<int> orders;
    std::vector<std::vector<double>> nodes;  // chart coordinates per domain
    std::vector<int> offsets;
    int d = 1;
    cplx s;
    Eigen::MatrixXi block_pattern;

    int index(int domain, int node, int comp) const { return offsets[domain] + node * d + comp; }
};

// Parabolic family in chart coordinates: m_n = Qt^n B with Qt = I + K unipotent, so the
// source point is t* + kappa/(n+w) and j_s = |det B|^s |beta|^{-2s} |n+w|^{-2s}.
struct TailGeometry {
    Eigen::Matrix2d K, B;
    double tstar = 0;

    static Eigen::Matrix2d mat(const GroupElement& g) {
        Eigen::Matrix2d m;
        m << g.a, g.b, g.c, g.d;
        return m;
    }

    // Term element left * base^n * right acting from source chart sj into target chart ti.
    TailGeometry(const Term& t, const GroupElement& ti, const GroupElement& sj) {
        GroupElement U = sj.inverse() * t.right.m.inverse();
        GroupElement V = t.left.m.inverse() * ti;
        GroupElement Qt = U * t.base.m.inverse() * U.inverse();
        Eigen::Matrix2d q = mat(Qt);
        if (q.trace() < 0) q = -q;
        if (std::abs(q.trace() - 2) > 1e-8) throw DomainError("tail base is not parabolic");
        K = q - Eigen::Matrix2d::Identity();
        B = mat(U * V);
        // K is nilpotent of rank one; its image is the fixed vector.
        int col = K.col(0).norm() >= K.col(1).norm() ? 0 : 1;
        tstar = K(0, col) / K(1, col);
    }

    struct Point {
        double A, alpha, Ap, beta;
        double w() const { return alpha / beta; }
        double kappa() const { return (A * beta - Ap * alpha) / (beta * beta); }
        double x(long n) const { return (A + n * Ap) / (alpha + n * beta); }
    };

    Point at(double t) const {
        Eigen::Vector2d v = B * Eigen::Vector2d(t, 1), kv = K * v;
        if (std::abs(kv(1)) < 1e-300) throw ContractionViolated("tail point is the fixed point");
        return {v(0), v(1), kv(0), kv(1)};
    }

    double detB() const { return std::abs(B.determinant()); }
};

struct PhaseSplit {
    std::vector<double> phases;  // a_k in [0,1)
    std::vector<CMat> projectors;  // chi(L) u_k u_k^* chi(R)
};

inline PhaseSplit phase_split(const UnitaryRep& chi, const Term& t) {
    CMat P = chi(t.base), Lw = chi(t.left), Rw = chi(t.right);
    Eigen::ComplexSchur<CMat> schur(P);
    const CMat& U = schur.matrixU();
    PhaseSplit ps;
    for (int k = 0; k < P.rows(); ++k) {
        double a = std::arg(schur.matrixT()(k, k)) / (2 * std::numbers::pi);
        a -= std::floor(a);
        if (a > 1 - lerch_integer_tol) a = 0;
        ps.phases.push_back(a);
        ps.projectors.push_back(Lw * U.col(k) * U.col(k).adjoint() * Rw);
    }
    return ps;
}

inline void check_pole(cplx s, double a, int kmax, const TailOptions& o) {
    if (o.allow_pole || !lerch_integral_phase(a)) return;
    for (int k = 0; k <= kmax; ++k)
        if (std::abs(s - cplx((1.0 - k) / 2)) < o.pole_guard)
            throw PoleHit("s = " + std::to_string(s.real()) + "+" + std::to_string(s.imag()) +
                          "i is within " + std::to_string(o.pole_guard) +
                          " of the pole lattice with an integral tail phase");
}

namespace detail {

inline cplx cpow_real(double base, cplx e) { return std::exp(e * std::log(base)); }

// out[q] = sum_{n>=1} e^{2 pi i n a} j_s(m_n, t) f_q(m_n t) for functions f_q evaluated by
// eval(x, out) with Taylor coefficients taylor[q][k] at t*.
template <class Eval, class T>
void tail_sum(const TailGeometry& G, double t, cplx s, double a, int N, Eval&& eval,
              const std::vector<std::vector<T>>& taylor, const TailOptions& o,
              std::vector<cplx>& out) {
    const int kmax = static_cast<int>(taylor[0].size()) - 1;
    auto P = G.at(t);
    const double w = P.w(), kappa = P.kappa();
    const cplx detB = cpow_real(G.detB(), s);
    const cplx pre = detB * cpow_real(std::abs(P.beta), -2.0 * s);
    const double two_pi = 2 * std::numbers::pi;
    std::fill(out.begin(), out.end(), cplx(0));
    std::vector<T> l(N);

    long ndir = o.mode == TailMode::node_sum ? o.n_max : o.n0;
    // The expansion needs n + w > 0 from its first index on.
    while (ndir + w <= 0.5) ++ndir;
    for (long n = 1; n < ndir; ++n) {
        eval(P.x(n), l.data());
        cplx f = std::polar(1.0, two_pi * std::fmod(a * n, 1.0)) *
                 cpow_real(std::abs(P.alpha + n * P.beta), -2.0 * s) * detB;
        for (int q = 0; q < N; ++q) out[q] += f * l[q];
    }

    // Expansion part: sum_k c_qk kappa^k e^{2 pi i a n0} zeta(2s+k, a, w+n0).
    const double x0 = w + ndir;
    int K = kmax;
    if (o.mode == TailMode::split_m) {
        K = std::min(o.M, kmax);
    } else {
        // Smallest order whose neglected terms fall below 1e-17 relative.
        double rho = std::abs(kappa) / x0, mx0 = 0;
        for (int q = 0; q < N; ++q) mx0 = std::max(mx0, std::abs(taylor[q][0]));
        for (int k = 2; k <= kmax; ++k) {
            double mk = 0;
            for (int q = 0; q < N; ++q) mk = std::max(mk, std::abs(taylor[q][k]));
            if (mk * std::pow(rho, k) < 1e-17 * std::max(mx0, 1.0)) {
                K = k;
                break;
            }
        }
    }
    check_pole(s, a, K, o);
    const cplx ph0 = std::polar(1.0, two_pi * std::fmod(a * ndir, 1.0));
    double kp = 1;
    for (int k = 0; k <= K; ++k) {
        cplx f = pre * ph0 * kp * lerch_zeta<double>(2.0 * s + double(k), a, cplx(x0));
        for (int q = 0; q < N; ++q) out[q] += f * taylor[q][k];
        kp *= kappa;
    }
    if (o.mode != TailMode::split_m) return;

    // Remainder sum_{n >= n0} e^{2 pi i n a} (n+w)^{-2s} [f(x_n) - T_M f(x_n)].
    double cM = 1;
    for (int q = 0; q < N; ++q) cM = std::max(cM, std::abs(taylor[q][std::min(K + 1, kmax)]));
    for (long n = ndir; n < 4000000; ++n) {
        double r = kappa / (n + w);
        eval(P.x(n), l.data());
        cplx f = pre * std::polar(1.0, two_pi * std::fmod(a * n, 1.0)) * cpow_real(n + w, -2.0 * s);
        for (int q = 0; q < N; ++q) {
            T tay = 0;
            double rp = 1;
            for (int k = 0; k <= K; ++k) tay += taylor[q][k] * rp, rp *= r;
            out[q] += f * (l[q] - tay);
        }
        double est = cM * std::pow(std::abs(r), K + 1) * std::pow(n + w, 1 - 2 * s.real());
        if (est < 1e-17) break;
    }
}

}  // namespace detail

inline DiscretizedOperator discretize(const TransferOperator& L, cplx s, std::vector<int> orders,
                                      const TailOptions& opt = {}, NodeKind kind = NodeKind::gauss) {
    const int nd = L.size(), d = L.rep.dim;
    if (orders.size() == 1 && nd > 1) orders.assign(nd, orders[0]);
    if (static_cast<int>(orders.size()) != nd) throw DomainError("one order per domain expected");
    DiscretizedOperator D;
    D.orders = orders;
    D.d = d;
    D.s = s;
    D.block_pattern = L.pattern();
    int total = 0;
    std::vector<ChebyshevBasis> bases;
    for (int j = 0; j < nd; ++j) {
        D.offsets.push_back(total);
        total += orders[j] * d;
        bases.emplace_back(orders[j], kind);
        D.nodes.push_back(bases.back().nodes());
    }
    D.matrix = CMat::Zero(total, total);

    for (const Term& t : L.terms) {
        const Domain &ti = L.domains[t.target], &sj = L.domains[t.source];
        const ChebyshevBasis &bi = bases[t.target], &bj = bases[t.source];
        const int Ni = bi.size(), Nj = bj.size();
        auto add = [&](int p, int q, const CMat& W, cplx v) {
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    D.matrix(D.index(t.target, p, a), D.index(t.source, q, b)) += v * W(a, b);
        };
        if (!t.parabolic) {
            Elem g = t.element(1);
            GroupElement gi = g.m.inverse();
            GroupElement m = sj.chart_inv * gi * ti.chart;
            CMat W = L.rep(g);
            std::vector<double> l(Nj);
            for (int p = 0; p < Ni; ++p) {
                double tp = bi.nodes()[p];
                double u = m.apply(tp);
                if (!(std::abs(u) < 1) && L.flavor != Flavor::slow && L.flavor != Flavor::billiard_slow)
                    throw ContractionViolated(t.name + " maps a node outside the source chart");
                cplx J = L.mode == ChartMode::cocycle ? j_s_real(m, tp, s)
                                                      : j_s_real(gi, ti.chart.apply(tp), s);
                bj.cardinals(u, l.data());
                for (int q = 0; q < Nj; ++q) add(p, q, W, J * l[q]);
            }
        } else {
            if (L.mode != ChartMode::cocycle) throw DomainError("tails need cocycle charts");
            TailGeometry G(t, ti.chart, sj.chart);
            if (!(std::abs(G.tstar) < 1)) throw ContractionViolated(t.name + ": fixed point outside chart");
            auto split = phase_split(L.rep, t);
            auto taylor = bj.taylor(G.tstar, 60);
            std::vector<cplx> row(Nj);
            for (size_t k = 0; k < split.phases.size(); ++k)
                for (int p = 0; p < Ni; ++p) {
                    detail::tail_sum(
                        G, bi.nodes()[p], s, split.phases[k], Nj,
                        [&](double x, double* o) { bj.cardinals(x, o); }, taylor, opt, row);
                    for (int q = 0; q < Nj; ++q) add(p, q, split.projectors[k], row[q]);
                }
        }
    }
    if (!D.matrix.allFinite()) throw DomainError("non-finite matrix entry");
    return D;
}

inline DiscretizedOperator discretize(const TransferOperator& L, cplx s, int order,
                                      const TailOptions& opt = {}, NodeKind kind = NodeKind::gauss) {
    return discretize(L, s, std::vector<int>{order}, opt, kind);
}

// Tail action on a scalar test function f holomorphic on the source chart disc, at the
// target chart point t: sum_{n>=1} chi(left base^n right) j_s f(source point).
template <class F>
CMat tail_evaluate(const TransferOperator& L, const Term& t, cplx s, double tp, F&& f,
                   TailOptions opt = {.mode = TailMode::split_m}) {
    if (!t.parabolic) throw DomainError("term is not a parabolic tail");
    const Domain &ti = L.domains[t.target], &sj = L.domains[t.source];
    TailGeometry G(t, ti.chart, sj.chart);
    // Taylor coefficients at t* from the trapezoid rule on a circle inside the chart disc.
    const int K = 64, kmax = 30;
    const double rho = 0.5 * (1 - std::abs(G.tstar));
    std::vector<cplx> vals(K);
    for (int k = 0; k < K; ++k) vals[k] = f(cplx(G.tstar) + std::polar(rho, 2 * std::numbers::pi * k / K));
    std::vector<std::vector<cplx>> taylor(1, std::vector<cplx>(kmax + 1));
    for (int m = 0; m <= kmax; ++m) {
        cplx c = 0;
        for (int k = 0; k < K; ++k) c += vals[k] * std::polar(1.0, -2 * std::numbers::pi * m * k / K);
        taylor[0][m] = c / (double(K) * std::pow(rho, m));
    }
    auto split = phase_split(L.rep, t);
    CMat out = CMat::Zero(L.rep.dim, L.rep.dim);
    std::vector<cplx> v(1);
    for (size_t k = 0; k < split.phases.size(); ++k) {
        detail::tail_sum(G, tp, s, split.phases[k], 1,
                         [&](double x, cplx* o) { o[0] = f(cplx(x)); }, taylor, opt, v);
        out += v[0] * split.projectors[k];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Traces and determinants

inline cplx trace(const DiscretizedOperator& D) { return D.matrix.trace(); }

inline cplx trace_power(const DiscretizedOperator& D, int n) {
    CMat p = D.matrix;
    for (int k = 1; k < n; ++k) p = p * D.matrix;
    return p.trace();
}

enum class DetMethod { eig, lu, logdet_traces };

inline double spectral_radius(const CMat& m) {
    if (m.rows() == 0) return 0;
    Eigen::ComplexEigenSolver<CMat> es(m, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline cplx fredholm_det(const CMat& M, DetMethod method = DetMethod::eig, int n_max = 60) {
    const int n = static_cast<int>(M.rows());
    if (n == 0) return 1;
    if (method == DetMethod::lu) return (CMat::Identity(n, n) - M).partialPivLu().determinant();
    if (method == DetMethod::eig) {
        Eigen::ComplexEigenSolver<CMat> es(M, false);
        cplx r = 1;
        for (int i = 0; i < n; ++i) r *= cplx(1) - es.eigenvalues()[i];
        return r;
    }
    double rho = spectral_radius(M);
    if (rho >= 1 - 1e-6)
        throw SpectralRadiusExceeded("spectral radius " + std::to_string(rho) + " >= 1");
    cplx acc = 0;
    CMat p = M;
    for (int k = 1; k <= n_max; ++k) {
        acc += p.trace() / double(k);
        p = p * M;
    }
    return std::exp(-acc);
}

inline cplx fredholm_det(const DiscretizedOperator& D, DetMethod method = DetMethod::eig,
                         int n_max = 60) {
    return fredholm_det(D.matrix, method, n_max);
}

struct ResidueReport {
    CMat residue;
    Eigen::VectorXd singular_values;
    int rank = 0;
};

// Residue of s -> M(s) at s0 by the trapezoid rule on a circle: (1/K) sum (s_k - s0) M(s_k).
inline ResidueReport residue_structure(const TransferOperator& L, cplx s0, int order,
                                       double radius = 1e-2, int K = 8, TailOptions opt = {}) {
    bool integral = false;
    for (auto& t : L.terms)
        if (t.parabolic)
            for (double a : phase_split(L.rep, t).phases) integral |= lerch_integral_phase(a);
    if (!integral) throw NotAPole("no tail has an integral phase; the operator is entire");
    bool lattice = false;
    for (int k = 0; k < 200; ++k) lattice |= std::abs(s0 - cplx((1.0 - k) / 2)) < 1e-12;
    if (!lattice) throw NotAPole("s0 is not in (1 - N0)/2");
    opt.allow_pole = true;
    ResidueReport R;
    for (int k = 0; k < K; ++k) {
        cplx ds = std::polar(radius, 2 * std::numbers::pi * (k + 0.5) / K);
        auto D = discretize(L, s0 + ds, order, opt);
        if (k == 0) R.residue = CMat::Zero(D.matrix.rows(), D.matrix.cols());
        R.residue += ds * D.matrix / double(K);
    }
    Eigen::JacobiSVD<CMat> svd(R.residue);
    R.singular_values = svd.singularValues();
    double smax = R.singular_values.size() ? R.singular_values(0) : 0;
    for (int i = 0; i < R.singular_values.size(); ++i)
        if (R.singular_values(i) > 1e-7 * smax) ++R.rank;
    return R;
}

}  // namespace hecke
