#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <ostream>

#include "errors.hpp"

namespace hecke {

enum class Kind { identity, elliptic, parabolic, hyperbolic };

inline const char* to_string(Kind k) {
    switch (k) {
        case Kind::identity: return "identity";
        case Kind::elliptic: return "elliptic";
        case Kind::parabolic: return "parabolic";
        default: return "hyperbolic";
    }
}

// Point of P^1(C) in homogeneous coordinates [z : w].
template <class Real>
struct BoundaryPointT {
    std::complex<Real> z{0}, w{1};

    static BoundaryPointT infinity() { return {std::complex<Real>(1), std::complex<Real>(0)}; }
    static BoundaryPointT finite(std::complex<Real> v) { return {v, std::complex<Real>(1)}; }

    bool is_infinite(Real tol = Real(1e-300)) const { return std::abs(w) <= tol * std::abs(z); }
    std::complex<Real> value() const { return z / w; }
};

// Projective real 2x2 matrix, stored with det = +-1 and first nonzero entry positive.
template <class Real>
class MobiusT {
public:
    Real a = 1, b = 0, c = 0, d = 1;

    MobiusT() = default;
    MobiusT(Real a_, Real b_, Real c_, Real d_) : a(a_), b(b_), c(c_), d(d_) { normalize(); }

    static MobiusT identity() { return {}; }

    int det_sign() const { return a * d - b * c > 0 ? 1 : -1; }
    Real det() const { return a * d - b * c; }
    Real trace() const { return a + d; }

    MobiusT operator*(const MobiusT& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }

    MobiusT inverse() const { return {d, -b, -c, a}; }

    MobiusT pow(long n) const {
        MobiusT base = n < 0 ? inverse() : *this, r;
        for (unsigned long k = n < 0 ? -static_cast<unsigned long>(n) : n; k; k >>= 1) {
            if (k & 1) r = r * base;
            base = base * base;
        }
        return r;
    }

    // Max entry difference after normalization.
    Real distance(const MobiusT& o) const {
        using std::abs;
        using std::max;
        return max(max(abs(a - o.a), abs(b - o.b)), max(abs(c - o.c), abs(d - o.d)));
    }
    bool equals(const MobiusT& o, Real tol = Real(1e-12)) const { return distance(o) <= tol; }

    std::complex<Real> apply(std::complex<Real> z) const { return (a * z + b) / (c * z + d); }
    Real apply(Real x) const { return (a * x + b) / (c * x + d); }

    BoundaryPointT<Real> apply(const BoundaryPointT<Real>& p) const {
        return {a * p.z + b * p.w, c * p.z + d * p.w};
    }

    // Derivative of z -> g.z.
    std::complex<Real> derivative(std::complex<Real> z) const {
        auto q = c * z + d;
        return det() / (q * q);
    }

private:
    void normalize() {
        using std::abs;
        using std::sqrt;
        Real scale = std::max(std::max(abs(a), abs(b)), std::max(abs(c), abs(d)));
        Real dt = a * d - b * c;
        if (!(scale > 0) || !(abs(dt) > Real(1e-13) * scale * scale))
            throw DegenerateMatrix("determinant vanishes");
        Real f = 1 / sqrt(abs(dt));
        a *= f, b *= f, c *= f, d *= f;
        Real eps = Real(1e-14);
        Real lead = abs(a) > eps ? a : abs(b) > eps ? b : abs(c) > eps ? c : d;
        if (lead < 0) a = -a, b = -b, c = -c, d = -d;
    }
};

template <class Real>
std::ostream& operator<<(std::ostream& os, const MobiusT<Real>& g) {
    return os << "[[" << g.a << "," << g.b << "],[" << g.c << "," << g.d << "]]";
}

using GroupElement = MobiusT<double>;
using BoundaryPoint = BoundaryPointT<double>;

inline constexpr double eps_cls = 1e-9;

template <class Real>
Kind classify(const MobiusT<Real>& g) {
    if (g.det_sign() < 0) return classify(g * g);
    if (g.equals(MobiusT<Real>::identity(), Real(1e-12))) return Kind::identity;
    Real t = std::abs(g.trace());
    if (t < 2 - Real(eps_cls)) return Kind::elliptic;
    if (t <= 2 + Real(eps_cls)) return Kind::parabolic;
    return Kind::hyperbolic;
}

// Square of the larger eigenvalue modulus; reflections use N(g^2)^(1/2).
template <class Real>
Real norm(const MobiusT<Real>& g) {
    if (g.det_sign() < 0) {
        auto g2 = g * g;
        if (classify(g2) != Kind::hyperbolic) throw NotHyperbolic("g^2 is not hyperbolic");
        return std::sqrt(norm(g2));
    }
    if (classify(g) != Kind::hyperbolic) throw NotHyperbolic("element is not hyperbolic");
    Real t = std::abs(g.trace());
    Real ev = (t + std::sqrt(t * t - 4)) / 2;
    return ev * ev;
}

// Attracting fixed point of g (g hyperbolic, or parabolic).
template <class Real>
Real attracting_fixed_point(const MobiusT<Real>& g) {
    auto m = g.det_sign() < 0 ? g * g : g;
    Real t = m.trace();
    if (t < 0) m = MobiusT<Real>(-m.a, -m.b, -m.c, -m.d), t = -t;
    if (std::abs(m.c) < Real(1e-300)) return std::numeric_limits<Real>::infinity();
    Real disc = t - 2 <= Real(eps_cls) ? Real(0) : t * t - 4;
    // Fixed points solve c x^2 + (d - a) x - b = 0; attracting one has |c x + d| > 1.
    Real r1 = ((m.a - m.d) + std::sqrt(disc)) / (2 * m.c);
    Real r2 = ((m.a - m.d) - std::sqrt(disc)) / (2 * m.c);
    return std::abs(m.c * r1 + m.d) >= std::abs(m.c * r2 + m.d) ? r1 : r2;
}

// j_s(g, x) for real x: (|det g| (cx+d)^-2)^s as a positive real power.
template <class Real>
std::complex<Real> j_s_real(const MobiusT<Real>& g, Real x, std::complex<Real> s) {
    Real q = std::abs(g.c * x + g.d);
    if (!(q > 0)) throw BranchViolation("cx+d = 0");
    return std::exp(Real(-2) * s * std::log(q));
}

// Branch certificate: sign of Re(cz+d) on a disc. The value is exp(-2s Log(sign (cz+d))),
// continuous on the disc and equal to the positive real power on its real trace.
struct BranchCert {
    int sign = 1;
};

template <class Real>
std::complex<Real> j_s(const MobiusT<Real>& g, std::complex<Real> z, std::complex<Real> s,
                       BranchCert cert) {
    auto q = Real(cert.sign) * (g.c * z + g.d);
    if (!(q.real() > 0)) throw BranchViolation("cz+d left the certified half plane");
    return std::exp(Real(-2) * s * std::log(q));
}

// Uncertified evaluation: picks the half plane from z itself.
template <class Real>
std::complex<Real> j_s(const MobiusT<Real>& g, std::complex<Real> z, std::complex<Real> s) {
    auto q = g.c * z + g.d;
    if (q == std::complex<Real>(0)) throw BranchViolation("cz+d = 0");
    return j_s(g, z, s, BranchCert{q.real() >= 0 ? 1 : -1});
}

}  // namespace hecke
