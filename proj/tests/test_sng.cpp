#include "dgmorse/morse.hpp"
#include "dgmorse/sng.hpp"

#include "sng_oracle.hpp"

#include <gtest/gtest.h>

using namespace dgmorse;
using Kind = FreeLoopClass::Kind;

namespace {

Monomial mono(const FiniteGroup& G, const char* g, int k)
{
    return Monomial{G.index(g), k};
}

FreeLoopClass xc(const FiniteGroup& G, const char* g, int k)
{
    return FreeLoopClass{Kind::x, class_index(G)[G.index(g)], k};
}

FreeLoopClass yc(const FiniteGroup& G, const char* g, int k)
{
    return FreeLoopClass{Kind::y, class_index(G)[G.index(g)], k};
}

} // namespace

TEST(ConjugacyClasses, SmallGroups)
{
    EXPECT_EQ(conjugacy_classes(cyclic_group(2)).size(), 2u);
    EXPECT_EQ(conjugacy_classes(cyclic_group(3)).size(), 3u);
    auto Q = quaternion_group(2);
    auto classes = conjugacy_classes(Q);
    ASSERT_EQ(classes.size(), 5u);
    std::vector<std::vector<std::string>> named;
    for (const auto& c : classes) {
        std::vector<std::string> labels;
        for (auto g : c)
            labels.push_back(Q.label(g));
        named.push_back(labels);
    }
    EXPECT_EQ(named, (std::vector<std::vector<std::string>>{{"1"}, {"-1"}, {"i", "-i"}, {"j", "-j"}, {"k", "-k"}}));
}

TEST(BasedCoproduct, ConstantLoopsHaveZeroCoproduct)
{
    auto G = cyclic_group(3);
    for (std::size_t g = 0; g < 3; ++g)
        EXPECT_TRUE(based_coproduct({{Monomial{g, 0}, Scalar(1)}}, G, 3).empty());
}

TEST(BasedCoproduct, CyclicTwoAtLevelTwo)
{
    auto G = cyclic_group(2);
    BasedTensor expected{{{mono(G, "s", 0), mono(G, "1", 1)}, Scalar(1)},
                         {{mono(G, "s", 1), mono(G, "1", 0)}, Scalar(1)},
                         {{mono(G, "1", 0), mono(G, "s", 1)}, Scalar(1)},
                         {{mono(G, "1", 1), mono(G, "s", 0)}, Scalar(1)}};
    BasedTensor got = based_coproduct({{mono(G, "s", 2), Scalar(1)}}, G, 3);
    EXPECT_EQ(got, expected);
    EXPECT_EQ(format_based(G, got), "1⊗s x + x⊗s + s⊗x + s x⊗1");
}

TEST(BasedCoproduct, CoefficientSumCountsTerms)
{
    for (const auto& G : {cyclic_group(2), cyclic_group(3), cyclic_group(5), quaternion_group(2)})
        for (int k = 0; k <= 4; ++k)
            for (std::size_t g = 0; g < G.order(); ++g) {
                Scalar total = 0;
                for (const auto& [pair, c] : based_coproduct({{Monomial{g, k}, Scalar(1)}}, G, 5)) {
                    EXPECT_EQ(monomial_degree(pair.first, 5) + monomial_degree(pair.second, 5), k * 4 - 4);
                    total += c;
                }
                EXPECT_EQ(total, Scalar(static_cast<long>(k * G.order())));
            }
}

TEST(BasedCoproduct, IsLinear)
{
    auto G = quaternion_group(2);
    BasedElement e{{mono(G, "i", 2), Scalar(3)}, {mono(G, "-j", 1), rational(-1, 2)}};
    BasedTensor expected = based_coproduct({{mono(G, "i", 2), Scalar(1)}}, G, 3);
    for (auto& [p, c] : expected)
        c *= 3;
    for (const auto& [p, c] : based_coproduct({{mono(G, "-j", 1), Scalar(1)}}, G, 3))
        expected[p] += rational(-1, 2) * c;
    EXPECT_EQ(based_coproduct(e, G, 3), expected);
}

TEST(BasedCoproduct, RejectsEvenOrSmallDimension)
{
    auto G = cyclic_group(2);
    BasedElement e{{Monomial{1, 1}, Scalar(1)}};
    EXPECT_THROW(based_coproduct(e, G, 4), std::invalid_argument);
    EXPECT_THROW(based_coproduct(e, G, 1), std::invalid_argument);
    EXPECT_THROW(loop_basis(G, 2, 3), std::invalid_argument);
}

TEST(PontryaginRing, XIsCentral)
{
    auto G = quaternion_group(2);
    BasedElement x{{Monomial{G.identity(), 1}, Scalar(1)}};
    for (std::size_t g = 0; g < G.order(); ++g) {
        BasedElement a{{Monomial{g, 2}, Scalar(1)}};
        EXPECT_EQ(pontryagin_product(G, x, a), pontryagin_product(G, a, x));
    }
    BasedElement i{{mono(G, "i", 0), Scalar(1)}}, j{{mono(G, "j", 0), Scalar(1)}};
    EXPECT_EQ(pontryagin_product(G, i, j), (BasedElement{{mono(G, "k", 0), Scalar(1)}}));
}

TEST(LoopBasis, ProjectiveThreeSpace)
{
    auto basis = loop_basis(cyclic_group(2), 3, 4);
    for (int d = 0; d <= 5; ++d) {
        auto it = basis.betti.find(d);
        std::size_t got = it == basis.betti.end() ? 0 : it->second;
        EXPECT_EQ(got, (std::vector<std::size_t>{2, 0, 2, 2, 2, 2})[static_cast<std::size_t>(d)]) << "degree " << d;
    }
}

TEST(LoopBasis, QuaternionDimensions)
{
    auto basis = loop_basis(quaternion_group(2), 3, 4);
    for (int k = 0; k <= 4; ++k) {
        EXPECT_EQ(basis.betti.at(2 * k), 5u);
        EXPECT_EQ(basis.betti.at(2 * k + 3), 5u);
    }
    EXPECT_EQ(basis.betti.count(1), 0u);
}

TEST(LoopBasis, RelativeModeDropsTheConstantClasses)
{
    auto G = cyclic_group(2);
    auto rel = loop_basis(G, 3, 2, true);
    EXPECT_EQ(rel.betti.at(0), 1u);
    EXPECT_EQ(rel.betti.at(3), 1u);
    EXPECT_EQ(rel.betti.at(2), 2u);
    EXPECT_EQ(rel.classes.size(), loop_basis(G, 3, 2).classes.size() - 2);
    for (const auto& c : rel.classes)
        EXPECT_FALSE(c.level == 0 && c.cls == class_index(G)[G.identity()]);
}

TEST(LoopBasis, DegreesFollowTheLevel)
{
    auto G = cyclic_group(3);
    for (const auto& c : loop_basis(G, 5, 3).classes)
        EXPECT_EQ(c.degree(5), c.level * 4 + (c.kind == Kind::y ? 5 : 0));
}

TEST(LiftedCoproduct, LevelZeroVanishes)
{
    auto G = quaternion_group(2);
    for (std::size_t c = 0; c < 5; ++c) {
        EXPECT_TRUE(lifted_coproduct(FreeLoopClass{Kind::x, c, 0}, G, 3).empty());
        EXPECT_TRUE(lifted_coproduct(FreeLoopClass{Kind::y, c, 0}, G, 3).empty());
    }
}

TEST(LiftedCoproduct, CyclicTwoXClass)
{
    auto G = cyclic_group(2);
    CoproductRow row = lifted_coproduct(xc(G, "s", 1), G, 3);
    CoproductRow expected{{{xc(G, "s", 0), xc(G, "1", 0)}, Scalar(1)}, {{xc(G, "1", 0), xc(G, "s", 0)}, Scalar(1)}};
    EXPECT_EQ(row, expected);
    EXPECT_EQ(format_row(G, row), "x_{[1],0}⊗x_{[s],0} + x_{[s],0}⊗x_{[1],0}");
}

TEST(LiftedCoproduct, CyclicTwoYClass)
{
    auto G = cyclic_group(2);
    CoproductRow expected{{{xc(G, "1", 0), yc(G, "1", 0)}, Scalar(1)},
                          {{yc(G, "1", 0), xc(G, "1", 0)}, Scalar(1)},
                          {{xc(G, "s", 0), yc(G, "s", 0)}, Scalar(1)},
                          {{yc(G, "s", 0), xc(G, "s", 0)}, Scalar(1)}};
    EXPECT_EQ(lifted_coproduct(yc(G, "1", 1), G, 3), expected);
}

TEST(LiftedCoproduct, QuaternionMultiplicities)
{
    auto G = quaternion_group(2);
    // x_{[1],1}: pairs (h^{-1}, h) over the 8 elements collapse to 1⊗1, -1⊗-1, and 2 for each of i, j, k.
    CoproductRow expected{{{xc(G, "1", 0), xc(G, "1", 0)}, Scalar(1)},
                          {{xc(G, "-1", 0), xc(G, "-1", 0)}, Scalar(1)},
                          {{xc(G, "i", 0), xc(G, "i", 0)}, Scalar(2)},
                          {{xc(G, "j", 0), xc(G, "j", 0)}, Scalar(2)},
                          {{xc(G, "k", 0), xc(G, "k", 0)}, Scalar(2)}};
    EXPECT_EQ(lifted_coproduct(xc(G, "1", 1), G, 3), expected);
}

TEST(LiftedCoproduct, AgreesWithClosedFormula)
{
    for (const auto& G : {cyclic_group(2), cyclic_group(3), quaternion_group(2)})
        for (int n : {3, 5})
            for (const auto& c : loop_basis(G, n, 4).classes)
                EXPECT_EQ(lifted_coproduct(c, G, n), oracle::closed_formula(G, c)) << G.name() << " " << class_label(G, c);
}

TEST(LiftedCoproduct, IndependentOfRepresentative)
{
    auto G = quaternion_group(2);
    EXPECT_EQ(parse_loop_class(G, "y,[-i],3"), parse_loop_class(G, "y,[i],3"));
    EXPECT_EQ(class_label(G, parse_loop_class(G, "x,[-k],2")), "x_{[k],2}");
    EXPECT_THROW(parse_loop_class(G, "z,[i],1"), std::invalid_argument);
    EXPECT_THROW(parse_loop_class(G, "x,i,1"), std::invalid_argument);
    EXPECT_THROW(parse_loop_class(G, "x,[q],1"), std::invalid_argument);
}

TEST(SngProperties, AllHoldOnTestGroups)
{
    for (const auto& G : {cyclic_group(2), cyclic_group(3), cyclic_group(5), quaternion_group(2)})
        for (int n : {3, 5}) {
            Report r = verify_sng_properties(G, n, 4);
            EXPECT_TRUE(r.pass()) << G.name() << " n = " << n << ": " << (r.pass() ? "" : r.first_failure()->name);
            ASSERT_EQ(r.checks.size(), 5u);
            EXPECT_EQ(r.checks.back().detail, "y-classes: swap-symmetric");
        }
}

TEST(SngProperties, CoassociativityByBruteForce)
{
    // Both iterates enumerate triples (a, b, c) of elements with abc = g, once each, for every level split.
    auto G = quaternion_group(2);
    auto idx = class_index(G);
    for (const auto& c : loop_basis(G, 3, 3).classes) {
        if (c.kind != Kind::x)
            continue;
        std::map<LoopTriple, Scalar> expected;
        std::size_t g = conjugacy_classes(G)[c.cls].front();
        for (int a = 0; a + 2 <= c.level; ++a)
            for (int b = 0; a + b + 2 <= c.level; ++b)
                for (std::size_t p = 0; p < G.order(); ++p)
                    for (std::size_t q = 0; q < G.order(); ++q) {
                        std::size_t r = G.multiply(G.inverse(G.multiply(p, q)), g);
                        expected[LoopTriple{FreeLoopClass{Kind::x, idx[p], a}, FreeLoopClass{Kind::x, idx[q], b},
                                            FreeLoopClass{Kind::x, idx[r], c.level - 2 - a - b}}] += 1;
                    }
        EXPECT_EQ(coproduct_left_iterate(c, G, 3), expected) << class_label(G, c);
        EXPECT_EQ(coproduct_right_iterate(c, G, 3), expected) << class_label(G, c);
    }
}

TEST(SngProperties, SpectralSequenceReproducesBetti)
{
    for (std::size_t m : {2u, 3u, 5u}) {
        auto G = cyclic_group(m);
        AlgebraPtr A = std::make_shared<const DGAlgebra>(group_algebra(G));
        auto E = build_enriched(conjugation_module(G, A, 3, 4), lens_cocycle(G, A, 3));
        auto pages = spectral_sequence(E, 3);
        std::map<int, std::size_t> total;
        for (const auto& [pq, d] : pages.infinity)
            if (d)
                total[pq.first + pq.second] += d;
        EXPECT_EQ(total, loop_basis(G, 3, 4).betti) << "m = " << m;
    }
}
