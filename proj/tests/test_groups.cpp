#include <gtest/gtest.h>

#include <set>

#include <hecke/zeta.hpp>

using namespace hecke;

namespace {

const double golden2 = std::pow((3 + std::sqrt(5.0)) / 2, 2);

}  // namespace

TEST(Groups, Constructors) {
    auto G3 = hecke_group_q(3);
    EXPECT_NEAR(G3.lambda, 1.0, 1e-15);
    EXPECT_EQ(G3.cls, GroupClass::CofiniteSmall);
    EXPECT_EQ(hecke_group_lambda(2).cls, GroupClass::Theta);
    EXPECT_EQ(hecke_group_lambda(3).cls, GroupClass::NonCofinite);
    EXPECT_THROW(hecke_group_lambda(1.5), NotFuchsian);
    EXPECT_THROW(hecke_group_q(2), NotFuchsian);
    auto G7 = hecke_group_lambda(2 * std::cos(std::numbers::pi / 7));
    ASSERT_TRUE(G7.q.has_value());
    EXPECT_EQ(*G7.q, 7);
}

TEST(Groups, CofiniteRelations) {
    for (int q = 3; q <= 9; ++q) {
        auto G = hecke_group_q(q);
        auto TS = (G.T * G.S).m;
        EXPECT_TRUE(TS.pow(q).equals(GroupElement::identity(), 1e-10)) << q;
        EXPECT_TRUE((G.S * G.S).m.equals(GroupElement::identity()));
    }
}

TEST(Groups, ElementFamilies) {
    for (int q : {3, 4, 5, 8}) {
        auto G = hecke_group_q(q);
        auto F = element_families(G);
        EXPECT_TRUE(F.g[1].m.equals(G.T.m.inverse(), 1e-12)) << q;
        EXPECT_TRUE(F.g[q - 1].m.equals(GroupElement(1, 0, -G.lambda, 1), 1e-12)) << q;
        auto C = conjugator();
        for (int k = 1; k < q; ++k) EXPECT_TRUE(F.h[k].m.equals(C * F.g[k].m * C.inverse(), 1e-12));
    }
    auto F2 = element_families(hecke_group_lambda(2));
    EXPECT_TRUE(F2.named.at("k2").m.equals(GroupElement(2, 1, -1, 0)));
    EXPECT_TRUE(F2.named.at("P-1").m.equals(GroupElement(2, 1, -1, 0)));
    auto F3 = element_families(hecke_group_lambda(3));
    EXPECT_TRUE(F3.named.at("a2").m.equals(GroupElement(3, 1, -1, 0)));
}

TEST(Groups, ElemWordTracksMatrix) {
    auto G = hecke_group_q(5);
    auto F = element_families(G);
    for (int k = 1; k < 5; ++k) {
        GroupElement m;
        for (auto& l : F.g[k].word) {
            GroupElement b = l.gen == Gen::S ? G.S.m : l.gen == Gen::T ? G.T.m : G.Q.m;
            m = m * b.pow(l.pow);
        }
        EXPECT_TRUE(m.equals(F.g[k].m, 1e-12));
    }
}

TEST(Words, SmallLengthSets) {
    auto G3 = hecke_group_q(3);
    auto L3 = build_fast(G3, trivial_rep(G3));
    auto P3 = enumerate_regular_words(L3, 2, 10);
    EXPECT_TRUE(P3[1].empty());
    bool found = false;
    for (auto& w : P3[2])
        if (w.letters.size() == 2 && w.letters[0].n == 1 && w.letters[1].n == 1) {
            EXPECT_NEAR(w.norm, golden2, 1e-10);
            found = true;
        }
    EXPECT_TRUE(found);

    auto G5 = hecke_group_q(5);
    auto L5 = build_fast(G5, trivial_rep(G5));
    auto P5 = enumerate_regular_words(L5, 1, 1e4);
    EXPECT_EQ(P5[1].size(), 2u);
    for (auto& w : P5[1]) EXPECT_FALSE(L5.terms[w.letters[0].edge].parabolic);
}

TEST(Words, PrimitiveData) {
    Letter h2{3, 1}, a{0, 1}, b{1, 1};
    auto sq = primitive_data(std::vector<Letter>{h2, h2});
    EXPECT_EQ(sq.n, 2);
    EXPECT_EQ(sq.p, 1);
    EXPECT_EQ(sq.root, std::vector<Letter>{h2});
    auto ab = primitive_data(std::vector<Letter>{a, b});
    EXPECT_EQ(ab.n, 1);
    EXPECT_EQ(ab.p, 2);
    auto abab = primitive_data(std::vector<Letter>{a, b, a, b});
    EXPECT_EQ(abab.n, 2);
    EXPECT_EQ(abab.p, 2);
    EXPECT_EQ(abab.root, (std::vector<Letter>{a, b}));
}

TEST(WordsProperty, RotationsAreConjugate) {
    for (double lam : {lambda_of_q(4), 2.0, 3.0}) {
        auto G = hecke_group_lambda(lam);
        auto L = build_fast(G, trivial_rep(G));
        auto P = enumerate_regular_words(L, 3, 200);
        for (int n = 1; n <= 3; ++n)
            for (auto& w : P[n]) {
                auto r = w.letters;
                std::rotate(r.begin(), r.begin() + 1, r.end());
                GroupElement m;
                for (auto& l : r) m = m * L.terms[l.edge].element(l.n).m;
                EXPECT_NEAR(std::abs(m.trace()), std::abs(w.matrix.trace()), 1e-10 * std::abs(m.trace()));
                EXPECT_NEAR(norm(m), w.norm, 1e-10 * w.norm);
            }
    }
}

TEST(WordsProperty, EnumeratedWordsAreHyperbolic) {
    for (double lam : {1.0, lambda_of_q(5), 2.0, 3.0}) {
        auto G = hecke_group_lambda(lam);
        auto L = build_fast(G, trivial_rep(G));
        auto P = enumerate_regular_words(L, 4, 500);
        for (auto& Pn : P)
            for (auto& w : Pn) {
                EXPECT_EQ(classify(w.matrix), Kind::hyperbolic);
                EXPECT_GT(w.norm, 1);
            }
    }
}

TEST(WordsProperty, SemigroupIsFree) {
    auto G = hecke_group_q(4);
    auto L = build_fast(G, trivial_rep(G));
    auto P = enumerate_regular_words(L, 4, 2000);
    std::vector<GroupElement> seen;
    for (auto& Pn : P)
        for (auto& w : Pn) {
            for (auto& m : seen) EXPECT_FALSE(m.equals(w.matrix, 1e-9));
            seen.push_back(w.matrix);
        }
    EXPECT_GT(seen.size(), 20u);
}

TEST(GroupsProperty, LambdaIncreasesToTwo) {
    double prev = 0;
    for (int q = 3; q < 2000; ++q) {
        double l = lambda_of_q(q);
        EXPECT_GT(l, prev);
        EXPECT_LT(l, 2);
        prev = l;
    }
    EXPECT_GT(prev, 2 - 1e-5);
}

TEST(Alphabet, BilliardNeedsOddQ) {
    EXPECT_THROW(billiard_alphabet(hecke_group_q(4)), QEvenUnsupported);
    EXPECT_THROW(billiard_alphabet(hecke_group_lambda(3)), QEvenUnsupported);
    auto A = billiard_alphabet(hecke_group_q(5));
    EXPECT_EQ(A.domains.size(), 2u);
}
