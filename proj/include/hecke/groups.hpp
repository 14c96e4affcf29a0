#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "moebius.hpp"

namespace hecke {

enum class Gen { S, T, Q };

struct GenPower {
    Gen gen;
    int pow;
    bool operator==(const GenPower&) const = default;
};

// A word in the generators S, T, Q; representations are evaluated on it.
using GenWord = std::vector<GenPower>;

// Group element together with an explicit word. The matrix may be a conjugate of the
// word's matrix (the fast system for lambda < 2 works with h = CgC^-1 but weights chi(g)).
struct Elem {
    GroupElement m;
    GenWord word;

    Elem operator*(const Elem& o) const {
        GenWord w = word;
        for (auto& l : o.word) push(w, l);
        return {m * o.m, w};
    }

    Elem inverse() const {
        GenWord w;
        for (auto it = word.rbegin(); it != word.rend(); ++it) w.push_back({it->gen, -it->pow});
        return {m.inverse(), w};
    }

    Elem pow(long n) const {
        Elem base = n < 0 ? inverse() : *this, r;
        for (long k = 0; k < std::labs(n); ++k) r = r * base;
        return r;
    }

    static void push(GenWord& w, GenPower l) {
        if (!w.empty() && w.back().gen == l.gen) {
            w.back().pow += l.pow;
            if (w.back().pow == 0) w.pop_back();
        } else if (l.pow != 0) {
            w.push_back(l);
        }
    }
};

enum class GroupClass { CofiniteSmall, Theta, NonCofinite };

inline const char* to_string(GroupClass c) {
    switch (c) {
        case GroupClass::CofiniteSmall: return "CofiniteSmall";
        case GroupClass::Theta: return "Theta";
        default: return "NonCofinite";
    }
}

struct HeckeGroup {
    double lambda = 1;
    std::optional<int> q;
    GroupClass cls = GroupClass::CofiniteSmall;
    Elem S, T, Q;
    std::optional<double> delta_hint;

    bool same_as(const HeckeGroup& o) const {
        return q == o.q && std::abs(lambda - o.lambda) <= 1e-12;
    }
};

inline double lambda_of_q(int q) { return 2 * std::cos(std::numbers::pi / q); }

namespace detail {
inline HeckeGroup make_group(double lambda, std::optional<int> q) {
    HeckeGroup G;
    G.lambda = lambda;
    G.q = q;
    G.cls = q ? GroupClass::CofiniteSmall
              : (std::abs(lambda - 2) <= 1e-12 ? GroupClass::Theta : GroupClass::NonCofinite);
    if (G.cls == GroupClass::Theta) G.lambda = 2;
    G.S = {GroupElement(0, 1, -1, 0), {{Gen::S, 1}}};
    G.T = {GroupElement(1, G.lambda, 0, 1), {{Gen::T, 1}}};
    G.Q = {GroupElement(0, 1, 1, 0), {{Gen::Q, 1}}};
    return G;
}
}  // namespace detail

inline HeckeGroup hecke_group_q(int q) {
    if (q < 3) throw NotFuchsian("q must be at least 3");
    return detail::make_group(lambda_of_q(q), q);
}

inline HeckeGroup hecke_group_lambda(double lambda) {
    if (!(lambda > 0)) throw NotFuchsian("lambda must be positive");
    if (lambda >= 2 - 1e-12) return detail::make_group(lambda, std::nullopt);
    // lambda(q) increases to 2; locate the candidate q by inverting the cosine.
    double qq = std::numbers::pi / std::acos(std::clamp(lambda / 2, -1.0, 1.0));
    for (long q = std::max(3L, std::lround(qq) - 1); q <= std::lround(qq) + 1 && q <= 1000000; ++q)
        if (std::abs(lambda - lambda_of_q(static_cast<int>(q))) <= 1e-12)
            return hecke_group_q(static_cast<int>(q));
    throw NotFuchsian("lambda < 2 is not of the form 2cos(pi/q)");
}

// Conjugator C = (1/sqrt 2)[[1,-1],[1,1]] of the fast system for lambda < 2.
inline GroupElement conjugator() { return GroupElement(1, -1, 1, 1); }

struct ElementFamilies {
    std::vector<Elem> g;  // g[1..q-1]
    std::vector<Elem> h;  // h[k] = C g[k] C^-1 with the word of g[k]
    std::map<std::string, Elem> named;
};

inline ElementFamilies element_families(const HeckeGroup& G) {
    ElementFamilies F;
    const Elem &S = G.S, &T = G.T;
    F.named["S"] = S;
    F.named["T"] = T;
    F.named["Q"] = G.Q;
    if (G.cls == GroupClass::CofiniteSmall) {
        int q = *G.q;
        Elem TS = T * S;
        F.g.resize(q);
        F.h.resize(q);
        Elem p = S;  // (TS)^k S
        auto C = conjugator();
        for (int k = 1; k < q; ++k) {
            p = TS * p;
            F.g[k] = p.inverse();
            F.h[k] = {C * F.g[k].m * C.inverse(), F.g[k].word};
            F.named["g" + std::to_string(k)] = F.g[k];
            F.named["h" + std::to_string(k)] = F.h[k];
        }
    } else {
        std::string p = G.cls == GroupClass::Theta ? "k" : "a";
        F.named[p + "1"] = T;
        F.named[p + "2"] = T.inverse() * S;
        F.named[p + "3"] = T * S;
        if (G.cls == GroupClass::Theta) F.named["k4"] = S;
    }
    // Second parabolic generator of the Theta group.
    if (G.cls == GroupClass::Theta) F.named["P-1"] = T.inverse() * S;
    return F;
}

// One block entry family of a fast operator: the element left * base^n * right acting
// from the source domain into the target row; n ranges over N when parabolic, else n = 1.
struct EdgeFamily {
    std::string name;
    int target = 0, source = 0;
    Elem left, base, right;
    bool parabolic = false;

    Elem element(long n) const { return parabolic ? left * base.pow(n) * right : left * right; }
};

struct Alphabet {
    std::vector<std::string> domains;
    std::vector<EdgeFamily> edges;
};

// Transition tables of the fast systems. Rows are targets, columns sources.
inline Alphabet fast_alphabet(const HeckeGroup& G) {
    auto F = element_families(G);
    Alphabet A;
    Elem one;
    auto fin = [&](std::string n, int t, int s, const Elem& e) {
        A.edges.push_back({n, t, s, e, one, one, false});
    };
    auto tail = [&](std::string n, int t, int s, const Elem& base) {
        A.edges.push_back({n, t, s, one, base, one, true});
    };
    if (G.cls == GroupClass::CofiniteSmall) {
        int q = *G.q;
        if (q == 3) {
            A.domains = {"E1", "E2"};
            tail("h2^n", 0, 1, F.h[2]);
            tail("h1^n", 1, 0, F.h[1]);
        } else {
            A.domains = {"E1", "Er", "E" + std::to_string(q - 1)};
            for (int t = 0; t < 3; ++t) {
                if (t != 0) tail("h1^n", t, 0, F.h[1]);
                for (int k = 2; k <= q - 2; ++k) fin("h" + std::to_string(k), t, 1, F.h[k]);
                if (t != 2) tail("h" + std::to_string(q - 1) + "^n", t, 2, F.h[q - 1]);
            }
        }
    } else if (G.cls == GroupClass::Theta) {
        const Elem &k1 = F.named["k1"], &k2 = F.named["k2"], &k3 = F.named["k3"];
        A.domains = {"D1", "D2", "D3", "D4", "D5", "D6"};
        Elem k1i = k1.inverse();
        tail("k1^-n", 0, 2, k1i);
        fin("k2", 0, 4, k2);
        tail("k2^n", 1, 0, k2);
        tail("k1^-n", 1, 2, k1i);
        fin("k2", 1, 4, k2);
        tail("k2^n", 2, 0, k2);
        fin("k2", 2, 4, k2);
        fin("k3", 3, 1, k3);
        tail("k3^n", 3, 5, k3);
        fin("k3", 4, 1, k3);
        tail("k1^n", 4, 3, k1);
        tail("k3^n", 4, 5, k3);
        fin("k3", 5, 1, k3);
        tail("k1^n", 5, 3, k1);
    } else {
        const Elem &a1 = F.named["a1"], &a2 = F.named["a2"], &a3 = F.named["a3"];
        A.domains = {"D1", "D2", "D3", "D1'"};
        fin("a2", 0, 0, a2);
        tail("a1^-n", 0, 1, a1.inverse());
        fin("a2", 0, 3, a2);
        fin("a2", 1, 0, a2);
        fin("a2", 1, 3, a2);
        fin("a3", 2, 0, a3);
        fin("a3", 2, 3, a3);
        fin("a3", 3, 0, a3);
        tail("a1^n", 3, 2, a1);
        fin("a3", 3, 3, a3);
    }
    return A;
}

// Fast billiard system for odd q: domains C^-1.E_{q-1} and C^-1.E_r, unconjugated elements.
inline Alphabet billiard_alphabet(const HeckeGroup& G) {
    if (!G.q) throw QEvenUnsupported("billiard operators need a cofinite group with lambda < 2");
    int q = *G.q;
    if (q % 2 == 0) throw QEvenUnsupported("q even is not supported");
    auto F = element_families(G);
    const Elem& Q = G.Q;
    int m = (q + 1) / 2;
    Alphabet A;
    A.domains = {"C^-1.E" + std::to_string(q - 1), "C^-1.Er"};
    Elem one;
    A.edges.push_back({"Qg" + std::to_string(q - 1) + "^n", 0, 0, Q, F.g[q - 1], one, true});
    for (int t = 0; t < 2; ++t)
        for (int k = m; k <= q - 2; ++k) {
            A.edges.push_back({"g" + std::to_string(k), t, 1, F.g[k], one, one, false});
            A.edges.push_back({"Qg" + std::to_string(k), t, 1, Q * F.g[k], one, one, false});
        }
    A.edges.push_back({"g" + std::to_string(q - 1) + "^n", 1, 0, one, F.g[q - 1], one, true});
    A.edges.push_back({"Qg" + std::to_string(q - 1) + "^n", 1, 0, Q, F.g[q - 1], one, true});
    return A;
}

}  // namespace hecke
