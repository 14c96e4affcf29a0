#include <gtest/gtest.h>

#include <random>

#include <hecke/lerch.hpp>

using namespace hecke;
using C = std::complex<double>;

namespace {

const double pi = std::numbers::pi;

// Hurwitz zeta by direct summation plus the integral tail with two Euler-Maclaurin terms.
C hurwitz_series(C s, C w, long N = 200000) {
    C sum = 0;
    for (long n = 0; n < N; ++n) sum += std::exp(-s * std::log(C(double(n)) + w));
    C x = w + C(double(N));
    C fx = std::exp(-s * std::log(x));
    return sum + x * fx / (s - 1.0) + fx / 2.0 + s * fx / (12.0 * x);
}

// Rational phase p/m through Hurwitz values: sum_r e^{2 pi i r p/m} m^-s zeta_H(s, (w+r)/m).
C rational_phase(C s, int p, int m, C w) {
    C acc = 0;
    for (int r = 0; r < m; ++r)
        acc += std::polar(1.0, 2 * pi * r * p / m) * lerch_zeta<double>(s, 0.0, (w + double(r)) / double(m));
    return std::exp(-s * std::log(double(m))) * acc;
}

}  // namespace

TEST(Lerch, Examples) {
    EXPECT_NEAR(std::abs(lerch_zeta(C(2), 0.0, 1.0) - pi * pi / 6), 0, 1e-14);
    EXPECT_NEAR(std::abs(lerch_zeta(C(1), 0.5, 1.0) - std::log(2.0)), 0, 1e-14);
    EXPECT_NEAR(std::abs(lerch_zeta(C(2), 0.0, 2.0) - (pi * pi / 6 - 1)), 0, 1e-14);
}

TEST(Lerch, KnownContinuationValues) {
    // zeta(0, 0, w) = 1/2 - w and zeta(-1, 0, 1) = -1/12.
    EXPECT_NEAR(std::abs(lerch_zeta(C(0), 0.0, 0.3) - 0.2), 0, 1e-13);
    EXPECT_NEAR(std::abs(lerch_zeta(C(-1), 0.0, 1.0) + 1.0 / 12), 0, 1e-13);
    // Alternating case at s = 0: Abel sum 1/2.
    EXPECT_NEAR(std::abs(lerch_zeta(C(0), 0.5, 1.0) - 0.5), 0, 1e-13);
}

TEST(Lerch, Errors) {
    EXPECT_THROW(lerch_zeta(C(1), 0.0, 1.0), PoleAt1);
    EXPECT_THROW(lerch_zeta(C(1), 1.0, 2.0), PoleAt1);
    EXPECT_NO_THROW(lerch_zeta(C(1), 0.25, 2.0));
    EXPECT_THROW(lerch_zeta<double>(C(2), 0.3, C(-0.5, 0)), DomainError);
    EXPECT_THROW(lerch_zeta<double>(C(2), 0.3, C(0, 1)), DomainError);
}

TEST(Lerch, ResidueAtOne) {
    EXPECT_EQ(lerch_residue_at_1(0.0, C(1)), C(1));
    EXPECT_EQ(lerch_residue_at_1(0.0, C(3.7)), C(1));
    EXPECT_THROW(lerch_residue_at_1(1.0 / 3, C(1)), NotAPole);
}

TEST(LerchProperty, ShiftIdentity) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0, 1);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        C s(-3 + 7 * u(rng), -10 + 20 * u(rng));
        double a = u(rng) < 0.2 ? 0.0 : u(rng);
        C w(0.05 + 3 * u(rng), -2 + 4 * u(rng));
        if (a == 0 && std::abs(s - 1.0) < 1e-3) continue;
        C lhs = lerch_zeta<double>(s, a, w);
        C rhs = std::polar(1.0, 2 * pi * a) * lerch_zeta<double>(s, a, w + 1.0) + std::exp(-s * std::log(w));
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
    EXPECT_LE(worst, 1e-11);
}

TEST(LerchProperty, SeriesAgreementOnOverlapStrip) {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 12; ++i) {
        C s(1.05 + 1.95 * u(rng), -6 + 12 * u(rng));
        C w(0.2 + 2 * u(rng), 0);
        C ref = hurwitz_series(s, w);
        EXPECT_LE(std::abs(lerch_zeta<double>(s, 0.0, w) - ref), 1e-10 * std::max(1.0, std::abs(ref)));
    }
    // Non-integral phases p/m, checked against their Hurwitz decomposition.
    for (auto [p, m] : std::vector<std::pair<int, int>>{{1, 2}, {1, 3}, {2, 5}, {7, 8}})
        for (int i = 0; i < 5; ++i) {
            C s(1.05 + 1.95 * u(rng), -6 + 12 * u(rng));
            C w(0.2 + 2 * u(rng), 0);
            C ref = rational_phase(s, p, m, w);
            EXPECT_LE(std::abs(lerch_zeta<double>(s, double(p) / m, w) - ref), 1e-10 * std::max(1.0, std::abs(ref)));
        }
}

TEST(LerchProperty, HurwitzResidueLimit) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 10; ++i) {
        C dir = std::polar(1.0, 2 * pi * u(rng));
        C w(0.3 + 3 * u(rng), 0);
        // Richardson: r(h) = 1 + c h + O(h^2), so 2 r(h/2) - r(h) = 1 + O(h^2).
        auto r = [&](double h) { return h * dir * lerch_zeta<double>(1.0 + h * dir, 0.0, w); };
        double h = 1e-4;
        C lim = 2.0 * r(h / 2) - r(h);
        EXPECT_LE(std::abs(lim - 1.0), 1e-8);
    }
}

TEST(LerchProperty, EntireForNonIntegralPhase) {
    for (double a : {0.1, 0.5, 0.9})
        for (C s : {C(1), C(0), C(-1.5), C(0.5, 2)}) {
            C v = lerch_zeta<double>(s, a, C(1.3));
            EXPECT_TRUE(std::isfinite(v.real()) && std::isfinite(v.imag()));
        }
}
