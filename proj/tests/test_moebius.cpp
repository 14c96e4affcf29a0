#include <gtest/gtest.h>

#include <random>

#include <hecke/moebius.hpp>

using namespace hecke;
using C = std::complex<double>;

namespace {

GroupElement random_element(std::mt19937_64& rng, bool orientation_preserving = true) {
    std::uniform_real_distribution<double> u(-2, 2);
    for (;;) {
        double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
        double det = a * d - b * c;
        if (std::abs(det) < 0.2) continue;
        if (orientation_preserving && det < 0) std::swap(a, b), std::swap(c, d);
        return {a, b, c, d};
    }
}

}  // namespace

TEST(Moebius, ApplyExamples) {
    GroupElement S(0, 1, -1, 0), Q(0, 1, 1, 0), T1(1, 1, 0, 1);
    EXPECT_NEAR(std::abs(S.apply(BoundaryPoint::infinity()).value()), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(Q.apply(BoundaryPoint::infinity()).value()), 0.0, 1e-15);
    EXPECT_NEAR(T1.apply(0.0), 1.0, 1e-15);
    EXPECT_TRUE(T1.apply(BoundaryPoint::infinity()).is_infinite());
    EXPECT_TRUE(S.apply(BoundaryPoint::finite(0)).is_infinite());
}

TEST(Moebius, NormalizationMakesProjectiveEqualityExact) {
    GroupElement g(2, 4, 6, 10), h(-1, -2, -3, -5);
    EXPECT_TRUE(g.equals(h));
    EXPECT_NEAR(std::abs(g.det()), 1.0, 1e-14);
    EXPECT_GT(g.a, 0);
    GroupElement r(0, -2, 3, 1);
    EXPECT_GT(r.b, 0);
    EXPECT_THROW(GroupElement(1, 2, 2, 4), DegenerateMatrix);
}

TEST(Moebius, ClassifyExamples) {
    double lam = 3;
    GroupElement S(0, 1, -1, 0), T(1, lam, 0, 1);
    EXPECT_EQ(classify(T), Kind::parabolic);
    EXPECT_EQ(classify(S), Kind::elliptic);
    EXPECT_EQ(classify(T * S), Kind::hyperbolic);
    EXPECT_EQ(classify(GroupElement()), Kind::identity);
}

TEST(Moebius, NormExamples) {
    const double golden2 = std::pow((3 + std::sqrt(5.0)) / 2, 2);
    EXPECT_NEAR(norm(GroupElement(2, -1, -1, 1)), golden2, 1e-12);
    EXPECT_NEAR(golden2, 6.8541, 1e-4);
    GroupElement S(0, 1, -1, 0), T3(1, 3, 0, 1);
    EXPECT_NEAR(norm(T3 * S), golden2, 1e-12);
    EXPECT_THROW(norm(GroupElement(1, 2, 0, 1)), NotHyperbolic);
    EXPECT_THROW(norm(S), NotHyperbolic);
}

TEST(Moebius, ReflectionNormIsSquareRootOfSquare) {
    GroupElement Q(0, 1, 1, 0), g(2, 1, 1, 1);
    GroupElement r = Q * g;
    ASSERT_EQ(r.det_sign(), -1);
    EXPECT_NEAR(norm(r), std::sqrt(norm(r * r)), 1e-12);
    EXPECT_GT(norm(r), 1);
}

TEST(Moebius, JsExamples) {
    GroupElement S(0, 1, -1, 0), T(1, 1.7, 0, 1), I;
    C s(0.7, -2.3);
    EXPECT_NEAR(std::abs(j_s(I, C(0.3, 0.2), s) - 1.0), 0, 1e-15);
    EXPECT_NEAR(std::abs(j_s(S, C(2), C(1)) - 0.25), 0, 1e-15);
    EXPECT_NEAR(std::abs(j_s(T, C(-4, 1), s) - 1.0), 0, 1e-15);
    EXPECT_NEAR(std::abs(j_s_real(S, 2.0, C(1)) - 0.25), 0, 1e-15);
}

TEST(Moebius, JsBranchCertificate) {
    GroupElement S(0, 1, -1, 0);
    // -z has negative real part at z = 2; the certificate for sign +1 is violated.
    EXPECT_THROW(j_s(S, C(2, 0.1), C(1), BranchCert{1}), BranchViolation);
    C v = j_s(S, C(2, 0), C(0.5, 1), BranchCert{-1});
    EXPECT_NEAR(std::abs(v - j_s_real(S, 2.0, C(0.5, 1))), 0, 1e-14);
}

TEST(MoebiusProperty, ApplyIsAnAction) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 200; ++i) {
        auto g = random_element(rng, false), h = random_element(rng, false);
        C z(u(rng), u(rng));
        C lhs = (g * h).apply(z), rhs = g.apply(h.apply(z));
        EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::max(1.0, std::abs(lhs)));
    }
}

TEST(MoebiusProperty, JsCocycle) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-3, 3);
    int checked = 0;
    while (checked < 200) {
        auto g = random_element(rng, false), h = random_element(rng, false);
        double x = u(rng);
        double hx = h.apply(x);
        if (std::abs(h.c * x + h.d) < 0.1 || std::abs(g.c * hx + g.d) < 0.1) continue;
        C s(u(rng), u(rng));
        C lhs = j_s_real(g * h, x, s), rhs = j_s_real(g, hx, s) * j_s_real(h, x, s);
        EXPECT_LE(std::abs(lhs - rhs), 1e-10 * std::abs(lhs));
        ++checked;
    }
}

TEST(MoebiusProperty, NormIsConjugationInvariant) {
    std::mt19937_64 rng(3);
    GroupElement g(2, 1, 1, 1);
    for (int i = 0; i < 100; ++i) {
        auto k = random_element(rng);
        EXPECT_NEAR(norm(k * g * k.inverse()), norm(g), 1e-10 * norm(g));
    }
}

TEST(MoebiusProperty, ClassifyIsScaleInvariant) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.1, 10);
    for (auto g : {GroupElement(1, 3, 0, 1), GroupElement(0, 1, -1, 0), GroupElement(2, 1, 1, 1)})
        for (int i = 0; i < 20; ++i) {
            double mu = u(rng) * (i % 2 ? -1 : 1);
            EXPECT_EQ(classify(GroupElement(mu * g.a, mu * g.b, mu * g.c, mu * g.d)), classify(g));
        }
}

TEST(MoebiusProperty, AttractingFixedPoint) {
    GroupElement g(2, 1, 1, 1);
    double x = attracting_fixed_point(g);
    EXPECT_NEAR(g.apply(x), x, 1e-12);
    EXPECT_LT(std::abs(g.derivative(C(x))), 1.0);
}
