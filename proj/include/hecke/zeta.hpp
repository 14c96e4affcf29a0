#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "parallel.hpp"
#include "reps.hpp"
#include "transfer.hpp"

namespace hecke {

// ---------------------------------------------------------------------------
// Words over the fast alphabet

// One letter: an entry family of the operator and its power (n = 1 for finite entries).
struct Letter {
    int edge = 0;
    long n = 1;
    auto operator<=>(const Letter&) const = default;
};

struct Word {
    std::vector<Letter> letters;
    GroupElement matrix;  // product of the letter elements in order
    double norm = 0;
    int det_sign = 1;
};

struct PrimitiveData {
    std::vector<Letter> root;
    int n = 1;  // repetitions of the root
    int p = 1;  // distinct cyclic rotations
};

inline PrimitiveData primitive_data(const std::vector<Letter>& w) {
    const int L = static_cast<int>(w.size());
    int per = L;
    for (int d = 1; d <= L; ++d) {
        if (L % d) continue;
        bool ok = true;
        for (int i = d; i < L && ok; ++i) ok = w[i] == w[i - d];
        if (ok) {
            per = d;
            break;
        }
    }
    return {std::vector<Letter>(w.begin(), w.begin() + per), L / per, per};
}

inline PrimitiveData primitive_data(const Word& w) { return primitive_data(w.letters); }

namespace detail {

using Mat2 = Eigen::Matrix2d;

inline Mat2 raw(const GroupElement& g) {
    Mat2 m;
    m << g.a, g.b, g.c, g.d;
    return m;
}

// Upper bound for the multiplier N^-1 of every closed path beginning with the chart map m:
// sup |m'| over [-1,1] times sup 1/(1-y^2) over the image.
inline double prefix_bound(const Mat2& m) {
    double c = m(1, 0), d = m(1, 1), det = std::abs(m.determinant());
    double u = -c + d, v = c + d;
    if (u * v <= 0) return std::numeric_limits<double>::infinity();
    double y0 = (-m(0, 0) + m(0, 1)) / u, y1 = (m(0, 0) + m(0, 1)) / v;
    double ymax = std::max(std::abs(y0), std::abs(y1));
    if (ymax >= 1) return std::numeric_limits<double>::infinity();
    double dmax = det / std::min(u * u, v * v);
    return dmax / (1 - ymax * ymax);
}

// Letter data of an operator: chart maps, group elements and weights for each (edge, n).
struct LetterTable {
    const TransferOperator* L;
    std::vector<Mat2> chart_inv, chart;  // per domain
    struct EdgeData {
        Mat2 left, base, right;  // group matrices, element = left base^n right
        CMat wl, wb, wr;
    };
    std::vector<EdgeData> edges;

    explicit LetterTable(const TransferOperator& op) : L(&op) {
        for (auto& d : op.domains) {
            chart.push_back(raw(d.chart));
            chart_inv.push_back(raw(d.chart_inv));
        }
        for (auto& t : op.terms) {
            EdgeData e{raw(t.left.m), raw(t.base.m), raw(t.right.m), op.rep(t.left),
                       op.rep(t.base), op.rep(t.right)};
            if (!t.parabolic) {
                e.left = raw(t.element(1).m);
                e.base = e.right = Mat2::Identity();
                e.wl = op.rep(t.element(1));
                e.wb = e.wr = CMat::Identity(op.rep.dim, op.rep.dim);
            }
            edges.push_back(std::move(e));
        }
    }

    const Term& term(int e) const { return L->terms[e]; }

    // Iterates the powers of edge e: yields (n, group matrix, chart map, weight) until the
    // callback returns false or the bound rule stops.
    template <class F>
    void powers(int e, F&& f) const {
        const auto& t = term(e);
        const auto& E = edges[e];
        Mat2 ci = chart[t.target], sjinv = chart_inv[t.source];
        if (!t.parabolic) {
            Mat2 g = E.left;
            f(1L, g, Mat2(sjinv * g.inverse() * ci), E.wl);
            return;
        }
        Mat2 bn = E.base;
        CMat wn = E.wb;
        Mat2 Linv = E.left.inverse(), Rinv = E.right.inverse(), Binv = E.base.inverse();
        Mat2 bni = Binv;
        for (long n = 1;; ++n) {
            Mat2 g = E.left * bn * E.right;
            Mat2 m = sjinv * Rinv * bni * Linv * ci;
            // Keep entries of moderate size.
            double sc = m.cwiseAbs().maxCoeff();
            if (!f(n, g, Mat2(m / sc), CMat(E.wl * wn * E.wr))) return;
            bn = bn * E.base;
            bni = bni * Binv;
            wn = wn * E.wb;
            if (n > 100000000) throw BudgetExceeded("power loop did not terminate");
        }
    }
};

inline double mobius_norm(const Mat2& m, int& sign) {
    double det = m.determinant();
    sign = det < 0 ? -1 : 1;
    double t = std::abs(m.trace()) / std::sqrt(std::abs(det));
    if (sign < 0) {
        // N(g) = N(g^2)^(1/2); tr(g^2)/|det| = t^2 + 2.
        double t2 = t * t + 2;
        double ev = (t2 + std::sqrt(t2 * t2 - 4)) / 2;
        return ev;
    }
    if (t <= 2) return 1;
    double ev = (t + std::sqrt(t * t - 4)) / 2;
    return ev * ev;
}

}  // namespace detail

// All closed letter sequences (every rotation) of length 1..W with N(h) <= X, grouped by
// length: the truncated sets P_n.
inline std::vector<std::vector<Word>> enumerate_regular_words(const TransferOperator& L, int W,
                                                              double X, long budget = 20000000) {
    detail::LetterTable T(L);
    std::vector<std::vector<Word>> P(W + 1);
    long nodes = 0;
    std::vector<Letter> stack;
    std::function<void(int, int, const detail::Mat2&, const detail::Mat2&)> rec =
        [&](int start, int cur, const detail::Mat2& chart_map, const detail::Mat2& group) {
            if (static_cast<int>(stack.size()) >= W) return;
            for (int e = 0; e < static_cast<int>(L.terms.size()); ++e) {
                if (L.terms[e].target != cur) continue;
                double prev = std::numeric_limits<double>::infinity();
                T.powers(e, [&](long n, const detail::Mat2& g, const detail::Mat2& m, const CMat&) {
                    if (++nodes > budget) throw BudgetExceeded("word enumeration budget exhausted");
                    detail::Mat2 cm = m * chart_map, gm = group * g;
                    cm /= cm.cwiseAbs().maxCoeff();
                    double b = detail::prefix_bound(cm);
                    bool keep = b >= 1 / X;
                    bool more = keep || !(b < prev);
                    prev = b;
                    if (!keep) return more;
                    stack.push_back({e, n});
                    int src = L.terms[e].source;
                    if (src == start) {
                        Word w;
                        w.letters = stack;
                        w.matrix = GroupElement(gm(0, 0), gm(0, 1), gm(1, 0), gm(1, 1));
                        w.norm = detail::mobius_norm(cm, w.det_sign);
                        if (w.norm <= X) P[stack.size()].push_back(w);
                    }
                    rec(start, src, cm, gm);
                    stack.pop_back();
                    return true;
                });
            }
        };
    for (int d = 0; d < L.size(); ++d) rec(d, d, detail::Mat2::Identity(), detail::Mat2::Identity());
    return P;
}

// ---------------------------------------------------------------------------
// Euler product over primitive cycles

struct EulerCutoffs {
    double X = 1e6;      // norm cutoff
    int k_max = -1;      // -1: until N^-(Re s + k) < 1e-18
    int max_length = 400;
    long budget = 400000000;
};

struct EulerResult {
    cplx value;
    double bound = 0;  // truncation estimate for the omitted classes N > X
    long classes = 0;
    long nodes = 0;
    int k_max_used = 0;
};

namespace detail {

struct CycleTask {
    int edge;
    long n;
};

// Depth-first walk over pre-Lyndon letter sequences (Duval's criterion) so that each cyclic
// class is visited once, via its lexicographically least rotation.
struct CycleWalker {
    const TransferOperator& L;
    const LetterTable& T;
    double X;
    int max_len;
    long budget;
    std::function<void(const Mat2&, const CMat&, int)> on_cycle;

    std::vector<Letter> w;
    long nodes = 0;
    int start = 0;

    void visit(int period, int cur, const Mat2& cm, const CMat& W) {
        if (static_cast<int>(w.size()) >= max_len) return;
        const int i = static_cast<int>(w.size());
        const Letter ref = w[i - period];
        for (int e = ref.edge; e < static_cast<int>(L.terms.size()); ++e) {
            if (L.terms[e].target != cur) continue;
            double prev = std::numeric_limits<double>::infinity();
            T.powers(e, [&](long n, const Mat2&, const Mat2& m, const CMat& wt) {
                Letter c{e, n};
                if (c < ref) return true;
                if (++nodes > budget) throw BudgetExceeded("cycle enumeration budget exhausted");
                Mat2 nm = m * cm;
                nm /= nm.cwiseAbs().maxCoeff();
                double b = prefix_bound(nm);
                bool keep = b >= 1 / X;
                bool more = keep || !(b < prev);
                prev = b;
                if (!keep) return more;
                int np = c == ref ? period : i + 1;
                CMat nW = W * wt;
                w.push_back(c);
                int src = L.terms[e].source;
                if (src == start && np == i + 1) on_cycle(nm, nW, i + 1);
                visit(np, src, nm, nW);
                w.pop_back();
                return true;
            });
        }
    }
};

inline cplx class_log_factor(double N, int eps, const CMat& chi, cplx s, int kmax,
                             int& kused) {
    const int d = static_cast<int>(chi.rows());
    cplx acc = 0;
    int K = kmax;
    if (K < 0) {
        K = std::max(0, static_cast<int>(std::ceil(18 * std::log(10.0) / std::log(N) - s.real())));
    }
    kused = std::max(kused, K);
    CMat I = CMat::Identity(d, d);
    for (int k = 0; k <= K; ++k) {
        cplx x = std::exp(-(s + double(k)) * std::log(N)) * double(k % 2 && eps < 0 ? -1 : 1);
        cplx det = d == 1 ? cplx(1) - x * chi(0, 0) : (I - x * chi).determinant();
        acc += std::log(det);
    }
    return acc;
}

}  // namespace detail

// Product over primitive cycles of the operator's symbolic dynamics of
// prod_k det(1 - chi(h) eps^k N(h)^-(s+k)), eps the determinant sign.
inline EulerResult euler_product(const TransferOperator& L, cplx s, const EulerCutoffs& cut = {}) {
    if (L.flavor != Flavor::fast && L.flavor != Flavor::billiard_fast)
        throw DomainError("Euler product needs a fast operator");
    if (!(s.real() > 1)) throw OutOfRegion("Euler product needs Re s > 1");
    detail::LetterTable T(L);
    const double X = cut.X;
    // Tasks: first letters whose own bound survives.
    std::vector<detail::CycleTask> tasks;
    for (int e = 0; e < static_cast<int>(L.terms.size()); ++e) {
        double prev = std::numeric_limits<double>::infinity();
        T.powers(e, [&](long n, const detail::Mat2&, const detail::Mat2& m, const CMat&) {
            double b = detail::prefix_bound(m);
            bool keep = b >= 1 / X;
            bool more = keep || !(b < prev);
            prev = b;
            if (keep) tasks.push_back({e, n});
            return more;
        });
    }
    struct Part {
        cplx log;
        long classes = 0, nodes = 0;
        int kused = 0;
    };
    std::vector<Part> parts(tasks.size());
    parallel_for(static_cast<int>(tasks.size()), [&](int ti) {
        auto task = tasks[ti];
        Part& P = parts[ti];
        detail::CycleWalker W{L, T, X, cut.max_length, cut.budget, {}, {}, 0, 0};
        W.on_cycle = [&](const detail::Mat2& m, const CMat& chi, int) {
            int eps;
            double N = detail::mobius_norm(m, eps);
            if (N <= 1) throw NotHyperbolic("closed path with non-hyperbolic element");
            if (N > X) return;
            P.log += detail::class_log_factor(N, eps, chi, s, cut.k_max, P.kused);
            ++P.classes;
        };
        T.powers(task.edge, [&](long n, const detail::Mat2&, const detail::Mat2& m, const CMat& wt) {
            if (n != task.n) return n < task.n;
            W.start = L.terms[task.edge].target;
            W.w = {{task.edge, n}};
            detail::Mat2 cm = m / m.cwiseAbs().maxCoeff();
            if (L.terms[task.edge].source == W.start) W.on_cycle(cm, wt, 1);
            W.visit(1, L.terms[task.edge].source, cm, wt);
            return false;
        });
        P.nodes = W.nodes;
    });
    EulerResult R;
    cplx acc = 0;
    long nodes = 0;
    for (auto& p : parts) {
        acc += p.log;
        R.classes += p.classes;
        nodes += p.nodes;
        R.k_max_used = std::max(R.k_max_used, p.kused);
    }
    if (nodes > cut.budget) throw BudgetExceeded("cycle enumeration budget exhausted");
    R.nodes = nodes;
    R.value = std::exp(acc);
    const double sig = s.real();
    R.bound = 2.0 * L.rep.dim * std::pow(X, 1 - sig) / ((sig - 1) * std::log(X)) * std::abs(R.value);
    return R;
}

inline EulerResult euler_product(const HeckeGroup& G, const UnitaryRep& chi, cplx s,
                                 const EulerCutoffs& cut = {}) {
    return euler_product(build_fast(G, chi), s, cut);
}

// ---------------------------------------------------------------------------
// Word-side traces

struct AnalyticTrace {
    cplx value;
    double tail_bound = 0;
    long shapes = 0;
};

namespace detail {

// Gauss-Legendre nodes and weights on [0,1].
inline void gauss_legendre01(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5)), dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = z;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1);
            double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = (1 - z) / 2;
        w[i] = 1 / ((1 - z * z) * dp * dp);
    }
}

}  // namespace detail

// Sum over the closed paths of length n of N(h)^-s / (1 - eps N(h)^-1) tr chi(h). Parabolic
// powers are summed directly up to m_direct, the rest by the midpoint Euler-Maclaurin rule:
// an integral (Gauss-Legendre in u = c/x) plus F'(c)/24 at c = m_direct + 1/2.
inline AnalyticTrace trace_analytic(const TransferOperator& L, int n, cplx s, int m_direct = 60,
                                    int gl_nodes = 40) {
    using detail::Mat2;
    const int ne = static_cast<int>(L.terms.size());
    const int d = L.rep.dim;
    for (auto& t : L.terms)
        if (t.parabolic && (L.rep(t.base) - CMat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-12)
            throw DomainError("analytic traces need trivial tail weights");
    // Shapes: closed edge sequences of length n.
    std::vector<std::vector<int>> shapes;
    std::vector<int> cur;
    std::function<void(int, int)> gen = [&](int start, int dom) {
        if (static_cast<int>(cur.size()) == n) {
            if (dom == start) shapes.push_back(cur);
            return;
        }
        for (int e = 0; e < ne; ++e)
            if (L.terms[e].target == dom) {
                cur.push_back(e);
                gen(start, L.terms[e].source);
                cur.pop_back();
            }
    };
    for (int dd = 0; dd < L.size(); ++dd) gen(dd, dd);

    std::vector<double> gx, gw;
    detail::gauss_legendre01(gl_nodes, gx, gw);
    const double c = m_direct + 0.5, hfd = 0.25;
    struct Edge {
        Mat2 left, K, right;  // element(x) = left (I + x K) right
        bool parabolic;
        CMat weight;
    };
    std::vector<Edge> E;
    for (auto& t : L.terms) {
        Edge e;
        e.parabolic = t.parabolic;
        e.weight = L.rep(t.element(1));
        if (t.parabolic) {
            Mat2 b = detail::raw(t.base.m);
            if (b.trace() < 0) b = -b;
            e.left = detail::raw(t.left.m);
            e.right = detail::raw(t.right.m);
            e.K = b - Mat2::Identity();
            e.weight = L.rep(t.left) * L.rep(t.right);
        } else {
            e.left = detail::raw(t.element(1).m);
            e.right = Mat2::Identity();
            e.K = Mat2::Zero();
        }
        E.push_back(e);
    }
    auto f = [&](const Mat2& h) -> cplx {
        int eps;
        double N = detail::mobius_norm(h, eps);
        return std::exp(-s * std::log(N)) / (1.0 - eps / N);
    };
    std::vector<cplx> val(shapes.size());
    std::vector<double> bnd(shapes.size());
    parallel_for(static_cast<int>(shapes.size()), [&](int si) {
        const auto& sh = shapes[si];
        double bound = 0;
        std::function<cplx(int, const Mat2&)> S = [&](int lvl, const Mat2& pre) -> cplx {
            if (lvl == n) return f(pre);
            const Edge& e = E[sh[lvl]];
            if (!e.parabolic) return S(lvl + 1, Mat2(pre * e.left));
            auto at = [&](double x) {
                Mat2 g = e.left * (Mat2::Identity() + x * e.K) * e.right;
                return S(lvl + 1, Mat2(pre * g));
            };
            cplx sum = 0;
            for (int m = 1; m <= m_direct; ++m) sum += at(m);
            cplx integral = 0;
            for (int j = 0; j < gl_nodes; ++j) {
                double u = gx[j];
                integral += gw[j] * c / (u * u) * at(c / u);
            }
            cplx deriv = (at(c + hfd) - at(c - hfd)) / (2 * hfd);
            bound += std::abs(deriv) / 24 / c;
            return sum + integral + deriv / 24.0;
        };
        val[si] = S(0, Mat2::Identity());
        bnd[si] = bound;
    });
    AnalyticTrace R;
    R.shapes = static_cast<long>(shapes.size());
    for (size_t i = 0; i < shapes.size(); ++i) {
        // tr chi(h) is constant along a shape for trivial tail weights.
        CMat W = CMat::Identity(d, d);
        for (int e : shapes[i]) W = W * E[e].weight;
        R.value += val[i] * W.trace();
        R.tail_bound += bnd[i] * std::abs(W.trace());
    }
    return R;
}

// Same sum from an explicit word list (every rotation of every closed path).
inline cplx trace_from_words(const TransferOperator& L, const std::vector<Word>& Pn, cplx s) {
    cplx acc = 0;
    for (auto& w : Pn) {
        CMat W = CMat::Identity(L.rep.dim, L.rep.dim);
        for (auto& l : w.letters) W = W * L.rep(L.terms[l.edge].element(l.n));
        acc += std::exp(-s * std::log(w.norm)) / (1.0 - w.det_sign / w.norm) * W.trace();
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Fredholm route and zeros

struct FredholmOptions {
    int order = 32;
    TailOptions tail{};
    DetMethod method = DetMethod::eig;

    FredholmOptions doubled() const {
        FredholmOptions o = *this;
        o.order *= 2;
        o.tail.n_max *= 2;
        return o;
    }
};

inline cplx selberg_zeta(const TransferOperator& L, cplx s, const FredholmOptions& o = {}) {
    return fredholm_det(discretize(L, s, o.order, o.tail), o.method);
}

inline cplx selberg_zeta(const HeckeGroup& G, const UnitaryRep& chi, cplx s,
                         const FredholmOptions& o = {}) {
    return selberg_zeta(build_fast(G, chi), s, o);
}

struct Region {
    double re0, re1, im0, im1;
};

struct ZeroRecord {
    cplx s;
    int winding = 1;
    double stability = 0;  // |Delta s*| between the last two orders
    int order = 0;         // order at which the zero stabilized
    bool stable = false;
};

struct UnresolvedBoxInfo {
    Region box;
    double winding_estimate;
};

struct ZeroSearch {
    std::vector<ZeroRecord> zeros;
    std::vector<UnresolvedBoxInfo> unresolved;
};

struct ZeroOptions {
    int nx = 2, ny = 2;
    double refine_tol = 1e-8;
    int max_order = 256;
    bool deflate = false;
    FredholmOptions fredholm{};
};

namespace detail {

// Winding number of F around the box boundary, sampled adaptively. nullopt if unresolved.
template <class F>
std::optional<int> box_winding(F&& f, Region b, int base, double& estimate) {
    std::vector<cplx> corners = {{b.re0, b.im0}, {b.re1, b.im0}, {b.re1, b.im1}, {b.re0, b.im1}};
    double total = 0;
    std::function<double(cplx, cplx, cplx, cplx, int)> seg = [&](cplx a, cplx fa, cplx z, cplx fz,
                                                                 int depth) -> double {
        double da = std::arg(fz / fa);
        if (std::abs(da) < std::numbers::pi / 4 || depth > 12) return da;
        cplx m = (a + z) / 2.0;
        cplx fm = f(m);
        return seg(a, fa, m, fm, depth + 1) + seg(m, fm, z, fz, depth + 1);
    };
    for (int k = 0; k < 4; ++k) {
        cplx a = corners[k], z = corners[(k + 1) % 4];
        cplx prev = a, fprev = f(a);
        for (int j = 1; j <= base; ++j) {
            cplx p = a + (z - a) * (double(j) / base);
            cplx fp = f(p);
            total += seg(prev, fprev, p, fp, 0);
            prev = p;
            fprev = fp;
        }
    }
    estimate = total / (2 * std::numbers::pi);
    int w = static_cast<int>(std::lround(estimate));
    if (std::abs(estimate - w) > 0.05) return std::nullopt;
    return w;
}

template <class F>
cplx newton(F&& f, cplx s0, double tol, int maxit = 40) {
    cplx s = s0;
    for (int it = 0; it < maxit; ++it) {
        double h = 1e-5 * std::max(1.0, std::abs(s));
        cplx fs = f(s);
        cplx df = (f(s + h) - f(s - h)) / (2 * h);
        if (df == cplx(0)) break;
        cplx ds = fs / df;
        s -= ds;
        if (std::abs(ds) < tol) break;
    }
    return s;
}

}  // namespace detail

// Real poles (1-k)/2 of the tail continuation within margin of the region; empty unless some
// parabolic tail has an integral phase.
inline std::vector<double> poles_near(const TransferOperator& L, Region region, double margin = 1e-3) {
    std::vector<double> out;
    bool integral = false;
    for (auto& t : L.terms)
        if (t.parabolic)
            for (double a : phase_split(L.rep, t).phases) integral |= lerch_integral_phase(a);
    if (!integral || region.im0 - margin > 0 || region.im1 + margin < 0) return out;
    for (int k = 0; k < 400; ++k) {
        double p = (1.0 - k) / 2;
        if (p >= region.re0 - margin && p <= region.re1 + margin) out.push_back(p);
    }
    return out;
}

// Zeros of det(1 - L_s) in a rectangle: winding counts on sub-boxes, Newton refinement,
// and order doubling until the zero moves less than refine_tol.
inline ZeroSearch find_zeros(const TransferOperator& L, Region region, const ZeroOptions& o = {}) {
    std::vector<std::pair<cplx, int>> poles;
    for (double p : poles_near(L, region)) {
        if (!o.deflate)
            throw PoleHit("region within 1e-3 of the pole " + std::to_string(p) +
                          "; shrink it or enable deflation");
        auto rr = residue_structure(L, cplx(p), o.fredholm.order, 1e-2, 8, o.fredholm.tail);
        poles.push_back({cplx(p), rr.rank});
    }
    auto F = [&](const FredholmOptions& fo) {
        return [&L, &poles, fo](cplx s) {
            TailOptions t = fo.tail;
            if (!poles.empty()) t.allow_pole = true;
            cplx v = fredholm_det(discretize(L, s, fo.order, t), fo.method);
            for (auto& [p, r] : poles) v *= std::pow(s - p, r);
            return v;
        };
    };
    ZeroSearch out;
    std::vector<Region> boxes;
    for (int i = 0; i < o.nx; ++i)
        for (int j = 0; j < o.ny; ++j) {
            double x0 = region.re0 + (region.re1 - region.re0) * i / o.nx;
            double x1 = region.re0 + (region.re1 - region.re0) * (i + 1) / o.nx;
            double y0 = region.im0 + (region.im1 - region.im0) * j / o.ny;
            double y1 = region.im0 + (region.im1 - region.im0) * (j + 1) / o.ny;
            boxes.push_back({x0, x1, y0, y1});
        }
    struct BoxResult {
        std::vector<ZeroRecord> zeros;
        std::optional<UnresolvedBoxInfo> unresolved;
    };
    std::vector<BoxResult> res(boxes.size());
    parallel_for(static_cast<int>(boxes.size()), [&](int bi) {
        auto f = F(o.fredholm);
        std::function<void(Region, int)> work = [&](Region b, int depth) {
            double est1, est2;
            auto w1 = detail::box_winding(f, b, 4, est1);
            auto w2 = detail::box_winding(f, b, 8, est2);
            if (!w1 || !w2 || *w1 != *w2) {
                res[bi].unresolved = UnresolvedBoxInfo{b, est2};
                return;
            }
            if (*w1 == 0) return;
            cplx c((b.re0 + b.re1) / 2, (b.im0 + b.im1) / 2);
            cplx z = detail::newton(f, c, 1e-14);
            double slack = 1e-9;
            bool inside = z.real() >= b.re0 - slack && z.real() <= b.re1 + slack &&
                          z.imag() >= b.im0 - slack && z.imag() <= b.im1 + slack;
            // Multiplicity from a micro-box around the refined zero.
            int micro = 0;
            if (inside) {
                double r = 1e-4 * std::max(1.0, std::abs(z));
                double e;
                auto wm = detail::box_winding(f, {z.real() - r, z.real() + r, z.imag() - r, z.imag() + r}, 4, e);
                micro = wm.value_or(0);
            }
            if ((!inside || micro != *w1) && depth < 5) {
                double xm = (b.re0 + b.re1) / 2, ym = (b.im0 + b.im1) / 2;
                for (Region sb : {Region{b.re0, xm, b.im0, ym}, Region{xm, b.re1, b.im0, ym},
                                  Region{b.re0, xm, ym, b.im1}, Region{xm, b.re1, ym, b.im1}})
                    work(sb, depth + 1);
                return;
            }
            if (!inside) {
                res[bi].unresolved = UnresolvedBoxInfo{b, est2};
                return;
            }
            ZeroRecord zr;
            zr.s = z;
            zr.winding = micro;
            zr.order = o.fredholm.order;
            FredholmOptions fo = o.fredholm;
            cplx prev = z;
            while (fo.order * 2 <= o.max_order) {
                fo = fo.doubled();
                cplx nz = detail::newton(F(fo), prev, 1e-14);
                zr.stability = std::abs(nz - prev);
                prev = nz;
                zr.order = fo.order;
                if (zr.stability < o.refine_tol) {
                    zr.stable = true;
                    break;
                }
            }
            zr.s = prev;
            res[bi].zeros.push_back(zr);
        };
        work(boxes[bi], 0);
    });
    for (auto& r : res) {
        for (auto& z : r.zeros) out.zeros.push_back(z);
        if (r.unresolved) out.unresolved.push_back(*r.unresolved);
    }
    std::sort(out.zeros.begin(), out.zeros.end(), [](const ZeroRecord& a, const ZeroRecord& b) {
        return a.s.imag() != b.s.imag() ? a.s.imag() < b.s.imag() : a.s.real() < b.s.real();
    });
    return out;
}

inline ZeroSearch find_zeros(const HeckeGroup& G, const UnitaryRep& chi, Region region,
                             const ZeroOptions& o = {}) {
    return find_zeros(build_fast(G, chi), region, o);
}

}  // namespace hecke
