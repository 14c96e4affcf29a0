#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <type_traits>

#include "errors.hpp"

namespace hecke {

namespace detail {

// B_2, B_4, ..., B_40.
inline constexpr std::array<double, 20> bernoulli_even = {
    1.0 / 6,
    -1.0 / 30,
    1.0 / 42,
    -1.0 / 30,
    5.0 / 66,
    -691.0 / 2730,
    7.0 / 6,
    -3617.0 / 510,
    43867.0 / 798,
    -174611.0 / 330,
    854513.0 / 138,
    -236364091.0 / 2730,
    8553103.0 / 6,
    -23749461029.0 / 870,
    8615841276005.0 / 14322,
    -7709321041217.0 / 510,
    2577687858367.0 / 6,
    -26315271553053477373.0 / 1919190,
    2929993913841559.0 / 6,
    -261082718496449122051.0 / 13530,
};

template <class Real>
Real phase_distance(Real a) {
    Real f = a - std::floor(a);
    return std::min(f, 1 - f);
}

}  // namespace detail

inline constexpr double lerch_integer_tol = 1e-12;

template <class Real>
bool lerch_integral_phase(Real a) {
    return detail::phase_distance(a) <= Real(lerch_integer_tol);
}

// zeta(s, a, w) = sum_{n>=0} e^{2 pi i n a} (n+w)^{-s}, continued meromorphically in s.
template <class Real>
std::complex<Real> lerch_zeta(std::complex<Real> s, Real a, std::complex<Real> w) {
    using C = std::complex<Real>;
    if (!(w.real() > 0)) throw DomainError("Lerch zeta needs Re w > 0");
    const Real two_pi = 2 * std::numbers::pi_v<Real>;
    const Real delta = detail::phase_distance(a);
    const bool hurwitz = delta <= Real(lerch_integer_tol);
    if (hurwitz && std::abs(s - C(1)) < Real(1e-12)) throw PoleAt1("s = 1 with integral phase");
    // For Re s < 1 the direct sum and the tail both grow like x^(-Re s) and cancel.
    if constexpr (std::is_same_v<Real, double>) {
        if (s.real() < 1) {
            using E = long double;
            auto v = lerch_zeta<E>(std::complex<E>(s.real(), s.imag()), E(a), std::complex<E>(w.real(), w.imag()));
            return C(Real(v.real()), Real(v.imag()));
        }
    }
    const Real as = std::abs(s);

    // Direct part up to N, asymptotic tail at x = w + N.
    long N;
    if (hurwitz) {
        N = std::max(0L, static_cast<long>(std::ceil(as + 20 - w.real())));
    } else {
        Real need = Real(2) * (as + 40) / (two_pi * delta);
        N = std::max(0L, static_cast<long>(std::ceil(need - w.real())));
    }
    const C z = hurwitz ? C(1) : std::polar(Real(1), two_pi * (a - std::floor(a)));

    C sum = 0, zn = 1;
    const Real frac = a - std::floor(a);
    for (long n = 0; n < N; ++n) {
        sum += zn * std::exp(-s * std::log(C(Real(n)) + w));
        zn *= z;
    }
    if (!hurwitz) zn = std::polar(Real(1), two_pi * std::fmod(frac * Real(N), Real(1)));

    const C x = w + C(Real(N));
    const C logx = std::log(x);
    const C fx = std::exp(-s * logx);
    C tail;
    if (hurwitz) {
        // Euler-Maclaurin: int_x^inf + f(x)/2 - sum_k B_2k/(2k)! f^(2k-1)(x).
        tail = x * fx / (s - C(1)) + fx / Real(2);
        // f^(j)(x) = (-1)^j (s)_j x^{-s-j}; track (s)_j / j! and x^{-j}.
        C poch = 1, xinv = C(1) / x, xp = 1;
        Real fact = 1;
        for (int j = 1; j <= 39; ++j) {
            poch *= s + C(Real(j - 1));
            xp *= xinv;
            fact *= j;
            if (j % 2 == 1) {
                int k = (j + 1) / 2;
                // B_2k/(2k)! * f^(2k-1)(x), with f^(2k-1) = -(s)_{2k-1} x^{-s-2k+1}.
                C term = Real(detail::bernoulli_even[k - 1]) / (fact * Real(j + 1)) * poch * xp * fx;
                tail += term;
                if (std::abs(term) < Real(1e-18) * std::abs(tail) && k > 4) break;
            }
        }
    } else {
        // sum_m z^m f(x+m) = sum_k b_k(z) f^(k)(x), b_k = Li_{-k}(z)/k!.
        std::array<C, 128> b{};
        const C r = z / (C(1) - z);
        b[0] = C(1) / (C(1) - z);
        C poch = 1, xp = 1;
        const C xinv = C(1) / x;
        tail = b[0] * fx;
        Real prev = std::numeric_limits<Real>::infinity(), prev2 = prev;
        for (int k = 1; k < 128; ++k) {
            C acc = 0;
            Real inv_fact = 1;
            for (int j = 1; j <= k; ++j) {
                inv_fact /= j;
                acc += b[k - j] * inv_fact;
            }
            b[k] = r * acc;
            poch *= -(s + C(Real(k - 1)));
            xp *= xinv;
            C term = b[k] * poch * xp * fx;
            // Asymptotic series: stop once terms grow. b_k vanishes for even k >= 2 when z = -1,
            // so compare against the larger of the last two.
            const Real at = std::abs(term);
            if (at > std::max(prev, prev2) && k > 8) break;
            prev2 = prev, prev = at;
            tail += term;
            if (std::max(prev, prev2) < Real(1e-21) * std::abs(tail) && k > 8) break;
        }
    }
    return sum + zn * tail;
}

template <class Real>
std::complex<Real> lerch_residue_at_1(Real a, std::complex<Real> w) {
    if (!(w.real() > 0)) throw DomainError("Lerch zeta needs Re w > 0");
    if (!lerch_integral_phase(a)) throw NotAPole("phase is not integral; Lerch zeta is entire");
    return std::complex<Real>(1);
}

inline std::complex<double> lerch_zeta(std::complex<double> s, double a, double w) {
    return lerch_zeta<double>(s, a, std::complex<double>(w));
}

}  // namespace hecke
