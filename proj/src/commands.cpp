#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "cli.hpp"

namespace hecke::cli {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string part; std::getline(ss, part, sep);) out.push_back(part);
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    try {
        size_t pos;
        double v = std::stod(s, &pos);
        if (pos == s.size()) return v;
    } catch (...) {
    }
    throw DomainError("cannot read " + what + " from '" + s + "'");
}

int to_int(const std::string& s, const std::string& what) {
    double v = to_double(s, what);
    if (v != std::floor(v) || v < 1) throw DomainError(what + " must be a positive integer");
    return static_cast<int>(v);
}

cplx parse_point(const std::string& s) {
    auto p = split(s, ',');
    if (p.size() != 2) throw DomainError("--s expects RE,IM");
    return {to_double(p[0], "Re s"), to_double(p[1], "Im s")};
}

std::vector<double> parse_axis(const std::string& s, const std::string& what) {
    auto p = split(s, ':');
    if (p.size() != 3) throw DomainError(what + " expects LO:HI:COUNT");
    double lo = to_double(p[0], what), hi = to_double(p[1], what);
    int n = to_int(p[2], what + " count");
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    return v;
}

std::vector<cplx> parse_grid(const std::string& s) {
    auto p = split(s, ',');
    if (p.size() != 2) throw DomainError("--grid expects RE0:RE1:N,IM0:IM1:M");
    std::vector<cplx> pts;
    for (double x : parse_axis(p[0], "real axis"))
        for (double y : parse_axis(p[1], "imaginary axis")) pts.push_back({x, y});
    return pts;
}

Region parse_region(const std::string& s) {
    auto p = split(s, ',');
    if (p.size() != 2) throw DomainError("--region expects RE0:RE1,IM0:IM1");
    auto a = split(p[0], ':'), b = split(p[1], ':');
    if (a.size() != 2 || b.size() != 2) throw DomainError("--region expects RE0:RE1,IM0:IM1");
    Region r{to_double(a[0], "region"), to_double(a[1], "region"), to_double(b[0], "region"),
             to_double(b[1], "region")};
    if (!(r.re0 < r.re1) || !(r.im0 < r.im1)) throw DomainError("region corners must be increasing");
    return r;
}

json cj(cplx z) { return json::array({z.real(), z.imag()}); }

// Writes to a file or, for "-", to the given stream.
struct Sink {
    std::ofstream file;
    std::ostream* os;

    Sink(const std::string& path, std::ostream& fallback) : os(&fallback) {
        if (path.empty() || path == "-") return;
        file.open(path);
        if (!file) throw DomainError("cannot write " + path);
        os = &file;
    }
    void line(const json& j) { *os << j.dump() << '\n'; }
};

std::string num(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

}  // namespace

int cmd_zeta(const ZetaArgs& a, std::ostream& out) {
    if (a.route != "euler" && a.route != "fredholm" && a.route != "both")
        throw DomainError("--route must be euler, fredholm or both");
    if (a.order < 2) throw DomainError("--order must be at least 2");
    auto G = a.g.group();
    auto chi = a.g.rep(G);
    auto L = build_fast(G, chi);
    std::vector<cplx> pts = a.grid.empty() ? std::vector<cplx>{parse_point(a.s)} : parse_grid(a.grid);

    Sink sink(a.out, out);
    std::optional<Sink> csv;
    if (!a.csv.empty()) {
        csv.emplace(a.csv, out);
        *csv->os << "route,s_re,s_im,value_re,value_im,bound,gap\n";
    }
    FredholmOptions fo;
    fo.order = a.order;
    EulerCutoffs cut;
    cut.X = a.X;
    cut.k_max = a.kmax;

    for (cplx s : pts) {
        std::vector<json> recs;
        std::optional<cplx> ve, vf;
        if (a.route != "fredholm") {
            auto E = euler_product(L, s, cut);
            ve = E.value;
            recs.push_back({{"s", cj(s)},
                            {"value", cj(E.value)},
                            {"route", "euler"},
                            {"orders", {{"X", cut.X}, {"k_max", cut.k_max}, {"k_max_used", E.k_max_used},
                                        {"max_length", cut.max_length}}},
                            {"bounds", {{"truncation", E.bound}}},
                            {"classes", E.classes}});
        }
        if (a.route != "euler") {
            cplx v = selberg_zeta(L, s, fo);
            FredholmOptions half = fo;
            half.order = std::max(2, fo.order / 2);
            double change = std::abs(v - selberg_zeta(L, s, half));
            vf = v;
            recs.push_back({{"s", cj(s)},
                            {"value", cj(v)},
                            {"route", "fredholm"},
                            {"orders", {{"order", fo.order}, {"n_max", fo.tail.n_max}, {"tail", "node_sum"}}},
                            {"bounds", {{"order_halving", change}}}});
        }
        std::optional<double> gap;
        if (ve && vf) gap = std::abs(*ve - *vf) / std::abs(*ve);
        for (auto& r : recs) {
            if (gap) r["gap"] = *gap;
            sink.line(r);
            if (csv) {
                auto& b = r["bounds"];
                double bound = b.contains("truncation") ? b["truncation"].get<double>()
                                                        : b["order_halving"].get<double>();
                *csv->os << r["route"].get<std::string>() << ',' << num(s.real()) << ',' << num(s.imag())
                         << ',' << num(r["value"][0]) << ',' << num(r["value"][1]) << ',' << num(bound)
                         << ',' << (gap ? num(*gap) : "") << '\n';
            }
        }
    }
    return Exit::ok;
}

int cmd_resonances(const ResonanceArgs& a, std::ostream& out) {
    Region region = parse_region(a.region);
    auto g = split(a.grid, 'x');
    if (g.size() != 2) throw DomainError("--grid expects NxM");
    ZeroOptions o;
    o.nx = to_int(g[0], "grid");
    o.ny = to_int(g[1], "grid");
    o.refine_tol = a.tol;
    o.max_order = a.max_order;
    o.deflate = a.deflate;
    o.fredholm.order = a.order;
    auto G = a.g.group();
    auto L = build_fast(G, a.g.rep(G));
    if (!a.deflate) {
        auto p = poles_near(L, region);
        if (!p.empty())
            throw OutOfRegion("region comes within 1e-3 of the pole lattice at s = " + num(p.front()) +
                              "; move the region or pass --deflate");
    }
    auto Z = find_zeros(L, region, o);

    Sink sink(a.out, out);
    std::optional<Sink> csv;
    if (!a.csv.empty()) {
        csv.emplace(a.csv, out);
        *csv->os << "re,im,winding,stability,order,stable\n";
    }
    for (auto& z : Z.zeros) {
        sink.line({{"zero", cj(z.s)},
                   {"stability", z.stability},
                   {"winding", z.winding},
                   {"order", z.order},
                   {"stable", z.stable}});
        if (csv)
            *csv->os << num(z.s.real()) << ',' << num(z.s.imag()) << ',' << z.winding << ','
                     << num(z.stability) << ',' << z.order << ',' << (z.stable ? 1 : 0) << '\n';
    }
    for (auto& u : Z.unresolved)
        sink.line({{"unresolved", {u.box.re0, u.box.re1, u.box.im0, u.box.im1}},
                   {"winding_estimate", u.winding_estimate}});
    if (a.strict && !Z.unresolved.empty())
        throw UnresolvedBox(std::to_string(Z.unresolved.size()) + " box(es) without a stable winding count");
    return Exit::ok;
}

namespace {

struct Report {
    Sink& sink;
    std::string suite;
    bool all = true;

    enum Cmp { le, ge, lt };

    void check(const std::string& what, double value, double bound, Cmp cmp = le) {
        bool pass = cmp == le ? value <= bound : cmp == ge ? value >= bound : value < bound;
        all &= pass;
        const char* key = cmp == le ? "max" : cmp == ge ? "min" : "below";
        sink.line({{"suite", suite}, {"assertion", what}, {"value", value}, {key, bound}, {"pass", pass}});
    }
};

void suite_traces(const CheckArgs& a, Report& R) {
    auto G = a.g.group();
    auto L = build_fast(G, a.g.rep(G));
    const cplx s = 2;
    auto D = discretize(L, s, a.order ? a.order : 48);
    for (int n = 1; n <= 3; ++n) {
        auto A = trace_analytic(L, n, s);
        R.check("Tr M^" + std::to_string(n) + " = word sum", std::abs(trace_power(D, n) - A.value), 1e-8);
        R.check("word sum tail bound n=" + std::to_string(n), A.tail_bound, 1e-10);
    }
}

void suite_factorization(const CheckArgs& a, Report& R) {
    auto G = a.g.group();
    std::vector<std::pair<UnitaryRep, UnitaryRep>> pairs;
    if (a.g.reps.size() >= 2) {
        pairs.push_back({a.g.rep(G, 0), a.g.rep(G, 1)});
    } else {
        std::mt19937_64 rng(7);
        for (int i = 0; i < 5; ++i) {
            auto x = random_one_dim_rep(G, rng);
            pairs.push_back({x, random_one_dim_rep(G, rng)});
        }
    }
    for (size_t i = 0; i < pairs.size(); ++i) {
        auto r = direct_sum_check(G, pairs[i].first, pairs[i].second, 2.0, a.order ? a.order : 32);
        std::string tag = " (pair " + std::to_string(i + 1) + ")";
        R.check("block permutation" + tag, r.block_residual, 1e-13);
        R.check("Z(chi1+chi2) = Z(chi1) Z(chi2)" + tag, r.det_rel_error, 1e-10);
    }
}

void suite_theta(const CheckArgs& a, Report& R) {
    auto G = a.g.group();
    if (G.cls != GroupClass::Theta) throw DomainError("the theta suite needs --lambda 2");
    auto chi = a.g.rep(G);
    for (double s : {2.0, 2.5, 3.0})
        for (auto& c : theta_lift_roundtrip(G, chi, s, a.order ? a.order : 32)) {
            std::ostringstream w;
            w << "lift(restrict v) = v at s=" << s << ", mu=" << std::setprecision(6) << c.mu;
            R.check(w.str(), c.residual, 1e-9);
        }
}

void suite_billiard(const CheckArgs& a, Report& R) {
    auto G = a.g.group();
    FredholmOptions fo;
    if (a.order) fo.order = a.order;
    auto plus = trivial_rep(G, 1, 1.0), minus = trivial_rep(G, 1, -1.0);
    auto Lp = build_billiard_fast(G, plus), Lm = build_billiard_fast(G, minus);
    auto L = build_fast(G, trivial_rep(G));
    for (double s : {2.0, 3.0}) {
        cplx full = selberg_zeta(L, s, fo);
        cplx prod = selberg_zeta(Lp, s, fo) * selberg_zeta(Lm, s, fo);
        R.check("det(+) det(-) = det at s=" + num(s), std::abs(prod - full) / std::abs(full), 1e-6);
    }
    for (auto* chi : {&plus, &minus}) {
        auto& Lb = chi == &plus ? Lp : Lm;
        cplx dz = billiard_dynamical_zeta(G, *chi, 2.0).value;
        cplx det = selberg_zeta(Lb, 2.0, fo);
        R.check(std::string("dynamical zeta = det, chi(Q)=") + (chi == &plus ? "+1" : "-1"),
                std::abs(dz - det) / std::abs(det), 1e-6);
    }
}

void suite_converge(const CheckArgs& a, Report& R) {
    auto T = convergence_study(2.0, [](const HeckeGroup& g) { return trivial_rep(g); },
                               {2.1, 2.01, 2.001, 2.0001}, a.order ? a.order : 24);
    for (size_t i = 1; i < T.rows.size(); ++i)
        R.check("norm(" + num(T.rows[i].lambda) + ") < norm(" + num(T.rows[i - 1].lambda) + ")",
                T.rows[i].norm / T.rows[i - 1].norm, 1.0, Report::lt);
    R.check("final / first", T.rows.back().norm / T.rows.front().norm, 0.1, Report::lt);
}

void suite_discs(const CheckArgs& a, Report& R) {
    auto G = a.g.group();
    if (G.q) {
        auto C = certify_small_discs(G, search_small_discs(G));
        for (auto& c : C.conditions) R.check(c.condition, c.margin, 1e-3, Report::ge);
    }
    auto C = certify_operator(build_fast(G, trivial_rep(G)));
    for (auto& c : C.conditions) R.check(c.condition, c.margin, 1e-3, Report::ge);
}

}  // namespace

int cmd_check(const CheckArgs& a, std::ostream& out) {
    Sink sink(a.out, out);
    Report R{sink, a.suite};
    if (a.suite == "traces") suite_traces(a, R);
    else if (a.suite == "factorization") suite_factorization(a, R);
    else if (a.suite == "theta") suite_theta(a, R);
    else if (a.suite == "billiard") suite_billiard(a, R);
    else if (a.suite == "converge") suite_converge(a, R);
    else if (a.suite == "discs") suite_discs(a, R);
    else throw DomainError("unknown suite '" + a.suite + "'");
    return R.all ? Exit::ok : Exit::failed;
}

}  // namespace hecke::cli
