// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include <hecke/hecke.hpp>

using namespace hecke;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

Outcome trace_identity() {
    double worst = 0, tail = 0;
    for (int q : {3, 4, 5}) {
        auto G = hecke_group_q(q);
        auto L = build_fast(G, trivial_rep(G));
        auto D = discretize(L, 2.0, 48);
        for (int n = 1; n <= 3; ++n) {
            auto A = trace_analytic(L, n, 2.0);
            worst = std::max(worst, std::abs(trace_power(D, n) - A.value));
            tail = std::max(tail, A.tail_bound);
        }
    }
    return {worst <= 1e-8 && tail < 1e-10, fmt("max |Tr M^n - word sum| = %.2e, word tail bound %.2e", worst, tail)};
}

Outcome two_routes() {
    std::mt19937_64 rng(2024);
    double worst = 0;
    for (auto G : {hecke_group_q(3), hecke_group_q(5), hecke_group_lambda(2), hecke_group_lambda(3)})
        for (auto chi : {trivial_rep(G), random_one_dim_rep(G, rng)})
            for (double s : {2.0, 2.5, 3.0}) {
                cplx e = euler_product(G, chi, s).value;
                cplx f = selberg_zeta(G, chi, s);
                worst = std::max(worst, std::abs(e - f) / std::abs(e));
            }
    return {worst <= 1e-6, fmt("max relative gap %.2e", worst)};
}

Outcome factorization() {
    auto G = hecke_group_lambda(3);
    std::mt19937_64 rng(7);
    double blocks = 0, det = 0;
    for (int i = 0; i < 5; ++i) {
        auto a = random_one_dim_rep(G, rng), b = random_one_dim_rep(G, rng);
        auto R = direct_sum_check(G, a, b, 2.0);
        blocks = std::max(blocks, R.block_residual);
        det = std::max(det, R.det_rel_error);
    }
    return {blocks == 0 && det <= 1e-10, fmt("block residual %.1e, det relative error %.2e", blocks, det)};
}

Outcome residues() {
    auto G3 = hecke_group_q(3);
    auto Gl = hecke_group_lambda(3);
    auto t3 = trivial_rep(G3), tl = trivial_rep(Gl);
    int r3 = residue_structure(build_fast(G3, t3), 0.5, 32).rank;
    int rl = residue_structure(build_fast(Gl, tl), 0.5, 32).rank;
    auto reg = one_dim_rep(G3, -1.0, -1.0);
    cplx d = selberg_zeta(G3, reg, 0.5);
    bool ok = r3 <= 4 * sd(t3) && rl <= 2 * sd(tl) && sd(reg) == 0 && std::isfinite(std::abs(d));
    char buf[200];
    std::snprintf(buf, sizeof buf, "rank %d <= %d (q=3), rank %d <= %d (lambda=3), det at 1/2 with chi(T)=-1: %.6f", r3,
                  4 * sd(t3), rl, 2 * sd(tl), std::abs(d));
    return {ok, buf};
}

Outcome discs() {
    double worst = 1e300;
    auto one = [&](const HeckeGroup& G) {
        worst = std::min(worst, certify_operator(build_fast(G, trivial_rep(G)), 360).worst());
        if (G.q) worst = std::min(worst, certify_small_discs(G, search_small_discs(G)).worst());
    };
    for (int q = 3; q <= 10; ++q) one(hecke_group_q(q));
    for (double l : {2.0, 2.5, 3.0}) one(hecke_group_lambda(l));
    return {worst >= 1e-3, fmt("smallest margin %.4f", worst)};
}

Outcome tails() {
    double worst = 0;
    auto f = [](cplx x) { return std::exp(x) / (x + 3.0); };
    for (auto G : {hecke_group_q(3), hecke_group_lambda(3)}) {
        auto L = build_fast(G, trivial_rep(G));
        for (auto& t : L.terms) {
            if (!t.parabolic) continue;
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j) {
                    cplx s(0.6 + 0.6 * i, -5 + 2.5 * j);
                    CMat a = tail_evaluate(L, t, s, 0.3, f, {.mode = TailMode::node_sum, .n_max = 20000});
                    CMat b = tail_evaluate(L, t, s, 0.3, f, {.mode = TailMode::split_m});
                    worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
                }
        }
    }
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    double shift = 0;
    for (int i = 0; i < 100; ++i) {
        cplx s(-3 + 7 * u(rng), -10 + 20 * u(rng));
        double a = u(rng) < 0.2 ? 0.0 : u(rng);
        cplx w(0.05 + 3 * u(rng), -2 + 4 * u(rng));
        if (a == 0 && std::abs(s - 1.0) < 1e-3) s += 0.5;
        cplx lhs = lerch_zeta(s, a, w);
        cplx rhs = std::polar(1.0, 2 * std::numbers::pi * a) * lerch_zeta(s, a, w + 1.0) + std::exp(-s * std::log(w));
        shift = std::max(shift, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
    return {worst <= 1e-8 && shift <= 1e-11, fmt("node-sum vs split-M %.2e, Lerch shift residual %.2e", worst, shift)};
}

Outcome zero_at_one() {
    double dist = 0, stab = 0;
    bool found = true;
    for (int q : {3, 5}) {
        auto G = hecke_group_q(q);
        ZeroOptions o;
        o.nx = o.ny = 1;
        Region r{0.9, 1.1, -0.1, 0.1};
        auto Z = find_zeros(G, trivial_rep(G), r, o);
        ZeroOptions o2 = o;
        o2.fredholm.tail.n_max *= 2;
        o2.fredholm.order *= 2;
        auto Z2 = find_zeros(G, trivial_rep(G), r, o2);
        if (Z.zeros.size() != 1 || Z2.zeros.size() != 1) {
            found = false;
            continue;
        }
        dist = std::max(dist, std::abs(Z.zeros[0].s - 1.0));
        stab = std::max({stab, Z.zeros[0].stability, std::abs(Z.zeros[0].s - Z2.zeros[0].s)});
    }
    return {found && dist <= 1e-6 && stab <= 1e-8, fmt("max |s* - 1| = %.2e, |Delta s*| under doubling %.2e", dist, stab)};
}

Outcome theta() {
    auto G = hecke_group_lambda(2);
    double worst = 0;
    for (double s : {2.0, 2.5, 3.0})
        for (auto& c : theta_lift_roundtrip(G, trivial_rep(G), s, 32)) worst = std::max(worst, c.residual);
    return {worst <= 1e-9, fmt("max lift residual %.2e", worst)};
}

Outcome billiard() {
    auto G = hecke_group_q(5);
    auto Lp = build_billiard_fast(G, trivial_rep(G, 1, 1.0));
    auto Lm = build_billiard_fast(G, trivial_rep(G, 1, -1.0));
    double prod = 0;
    for (double s : {2.0, 3.0}) {
        cplx full = selberg_zeta(G, trivial_rep(G), s);
        prod = std::max(prod, std::abs(selberg_zeta(Lp, s) * selberg_zeta(Lm, s) - full) / std::abs(full));
    }
    double dyn = 0;
    for (auto& L : {Lp, Lm}) dyn = std::max(dyn, std::abs(euler_product(L, 2.0).value - selberg_zeta(L, 2.0)));
    return {prod <= 1e-6 && dyn <= 1e-6, fmt("product identity %.2e, dynamical zeta vs determinant %.2e", prod, dyn)};
}

Outcome convergence() {
    auto T = convergence_study(2.0, [](const HeckeGroup& g) { return trivial_rep(g); }, {2.1, 2.01, 2.001, 2.0001});
    std::string d = "norms";
    for (auto& r : T.rows) d += fmt(" %.3e", r.norm);
    bool ok = T.strictly_decreasing && T.rows.back().norm < T.rows.front().norm / 10;
    return {ok, d};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"trace identity", trace_identity}, {"zeta two-route agreement", two_routes},
        {"factorization", factorization},   {"pole/residue structure", residues},
        {"disc certification", discs},      {"tail continuation consistency", tails},
        {"zero at s = 1", zero_at_one},     {"Theta full/reduced equivalence", theta},
        {"billiard factorization", billiard}, {"convergence lambda -> 2", convergence},
    };
    int failed = 0, n = 0;
    for (auto& [name, f] : criteria) {
        ++n;
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("Criterion %d: %s %s (%s)\n", n, o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
