#include "dgmorse/morse.hpp"

#include "helpers.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

using namespace dgmorse;
using namespace dgmorse::testing;

namespace {

AlgebraPtr cyclic_algebra(std::size_t m)
{
    return std::make_shared<const DGAlgebra>(group_algebra(cyclic_group(m)));
}

std::map<int, std::size_t> lens_sphere_dims() { return {{0, 1}, {1, 0}, {2, 0}, {3, 1}}; }

/// Drops zero entries so that grids and homology maps compare by support.
std::map<int, std::size_t> nonzero(const std::map<int, std::size_t>& dims)
{
    std::map<int, std::size_t> out;
    for (const auto& [n, e] : dims)
        if (e)
            out[n] = e;
    return out;
}

ModulePtr promoted(const StrictModule& M, std::size_t K)
{
    return std::make_shared<const AInftyModule>(AInftyModule::from_strict(M, K));
}

/// i_∞∘p_∞ for the retract of M onto its homology: a morphism M → M with nonzero higher components.
AInftyMorphism transfer_loop(const StrictModule& M, const HomotopyRetract& R, std::size_t K)
{
    auto t = homotopy_transfer(M, R, K);
    return compose_morphisms(t.i, t.p);
}

} // namespace

TEST(CriticalSets, DuplicateLabelsRejected)
{
    EXPECT_THROW(critical_set({{"x", 0}, {"x", 1}}), std::invalid_argument);
    EXPECT_THROW(critical_set({{"x", -1}}), std::invalid_argument);
    EXPECT_EQ(critical_set({{"a", 0}, {"b", 2}})->dim(), 2u);
}

TEST(TwistingCocycles, ZeroCocyclePasses)
{
    auto A = cyclic_algebra(3);
    TwistingCocycle T(A, critical_set({{"x0", 0}, {"x1", 1}, {"x2", 2}}));
    EXPECT_TRUE(verify_twisting_cocycle(T).pass());
    EXPECT_EQ(T.longest_chain(), 0u);
}

TEST(TwistingCocycles, LensCocyclesPass)
{
    for (std::size_t m : {2u, 3u, 5u}) {
        auto A = cyclic_algebra(m);
        for (int top : {1, 3, 5}) {
            auto T = lens_cocycle(cyclic_group(m), A, top);
            EXPECT_TRUE(verify_twisting_cocycle(T).pass()) << "m = " << m << ", top = " << top;
            EXPECT_EQ(T.longest_chain(), static_cast<std::size_t>(top));
        }
    }
}

TEST(TwistingCocycles, MutatedEntryFailsAtTheUniquePair)
{
    auto G = cyclic_group(3);
    auto A = cyclic_algebra(3);
    auto T = lens_cocycle(G, A, 3);
    T.set("x1", "x0", A->element("s"));
    Report r = verify_twisting_cocycle(T);
    ASSERT_FALSE(r.pass());
    ASSERT_TRUE(r.first_failure()->witness);
    // N·s = N ≠ 0 while (s - 1)·N = 0, so only (x2, x0) breaks
    EXPECT_EQ(r.first_failure()->witness->tensor, "(x2, x0)");
}

TEST(TwistingCocycles, DegreeMismatchRejected)
{
    auto A = std::make_shared<const DGAlgebra>(acyclic_algebra());
    TwistingCocycle T(A, critical_set({{"a", 0}, {"b", 1}, {"c", 2}}));
    EXPECT_THROW(T.set("b", "a", A->element("e")), std::invalid_argument);
    EXPECT_THROW(T.set("a", "b", A->element("1")), std::invalid_argument);
    EXPECT_NO_THROW(T.set("c", "b", A->element("1")));
    EXPECT_NO_THROW(T.set("c", "a", A->element("e")));
}

TEST(TwistingCocycles, GradedIdentityWithIntermediatePoint)
{
    // over span{1, e} with de = 1: the pair (c, a) needs d m_{c,a} = -m_{c,b} m_{b,a} = -1
    auto A = std::make_shared<const DGAlgebra>(acyclic_algebra());
    TwistingCocycle T(A, critical_set({{"a", 0}, {"b", 1}, {"c", 2}}));
    T.set("b", "a", A->element("1"));
    T.set("c", "b", A->element("1"));
    T.set("c", "a", Vec{{Key{static_cast<std::int32_t>(A->space()->index("e"))}, Scalar(-1)}});
    EXPECT_TRUE(verify_twisting_cocycle(T).pass());
    EXPECT_EQ(T.longest_chain(), 2u);
    TwistingCocycle U = T;
    U.set("c", "a", A->element("e"));
    Report r = verify_twisting_cocycle(U);
    ASSERT_FALSE(r.pass());
    EXPECT_EQ(r.first_failure()->witness->tensor, "(c, a)");
    EXPECT_THROW(build_enriched(regular_module(A), U), std::invalid_argument);
    EXPECT_TRUE(verify_complex(build_enriched(regular_module(A), T).complex()).pass());
}

TEST(Enriched, ZeroCocycleGivesTensorDifferential)
{
    Rng rng(5);
    auto A = c2_algebra();
    auto F = random_strict_module(A, rng);
    TwistingCocycle T(A, critical_set({{"x0", 0}, {"x1", 1}, {"y1", 1}, {"x2", 2}}));
    auto E = build_enriched(F, T);
    ChainComplex expected = tensor_complex(F.complex(), ChainComplex::zero(T.crit()));
    ASSERT_TRUE(same_space(E.space(), expected.space()));
    EXPECT_TRUE(E.complex().differential() == expected.differential());
}

TEST(Enriched, LensWithRegularAndTrivialFibers)
{
    for (std::size_t m : {2u, 3u, 5u}) {
        auto A = cyclic_algebra(m);
        auto T = lens_cocycle(cyclic_group(m), A, 3);
        auto regular = build_enriched(regular_module(A), T);
        auto trivial = build_enriched(trivial_module(A), T);
        EXPECT_EQ(oracle::homology_dims(regular.complex().differential()), lens_sphere_dims()) << "m = " << m;
        EXPECT_EQ(oracle::homology_dims(trivial.complex().differential()), lens_sphere_dims()) << "m = " << m;
        EXPECT_EQ(homology_dims(regular.complex()), lens_sphere_dims());
        EXPECT_EQ(homology_dims(trivial.complex()), lens_sphere_dims());
    }
}

TEST(Enriched, TrivialFiberDifferentialIsMultiplicationByOrder)
{
    auto A = cyclic_algebra(3);
    auto E = build_enriched(trivial_module(A), lens_cocycle(cyclic_group(3), A, 3));
    const auto& S = *E.space();
    auto at = [&](const std::string& l) { return Key{static_cast<std::int32_t>(S.index(l))}; };
    const GradedMap& d = E.complex().differential();
    EXPECT_EQ(d.entry(at("1|x2"), at("1|x1")), Scalar(3));
    EXPECT_TRUE(d.column(at("1|x1")).empty());
    EXPECT_TRUE(d.column(at("1|x3")).empty());
}

TEST(Enriched, KoszulSignOnOddFiberElements)
{
    auto A = cyclic_algebra(2);
    auto F = free_module(A, ChainComplex::zero(make_space({{1, "v"}})));
    auto E = build_enriched(F, lens_cocycle(cyclic_group(2), A, 1));
    const auto& S = *E.space();
    auto at = [&](const std::string& l) { return Key{static_cast<std::int32_t>(S.index(l))}; };
    // d(v⊗x1) = (-1)^{|v|} v·(s - 1) ⊗ x0 with |v| = 1
    EXPECT_EQ(E.complex().differential().entry(at("v|1|x1"), at("v|s|x0")), Scalar(-1));
    EXPECT_EQ(E.complex().differential().entry(at("v|1|x1"), at("v|1|x0")), Scalar(1));
}

TEST(Enriched, BrokenCocycleRejected)
{
    auto A = cyclic_algebra(3);
    auto T = lens_cocycle(cyclic_group(3), A, 3);
    T.set("x1", "x0", A->element("s"));
    EXPECT_THROW(build_enriched(regular_module(A), T), std::invalid_argument);
    auto B = cyclic_algebra(2);
    EXPECT_THROW(build_enriched(regular_module(B), lens_cocycle(cyclic_group(3), A, 3)), std::invalid_argument);
}

TEST(Enriched, RandomFibersSquareToZeroAndMatchOracle)
{
    Rng rng(77);
    for (int trial = 0; trial < 12; ++trial) {
        std::size_t m = static_cast<std::size_t>(uniform(rng, 2, 3));
        auto A = cyclic_algebra(m);
        auto F = random_strict_module(A, rng, 0, 3, 2);
        auto E = build_enriched(F, lens_cocycle(cyclic_group(m), A, uniform(rng, 1, 3)));
        EXPECT_TRUE(verify_complex(E.complex()).pass());
        EXPECT_EQ(nonzero(homology_dims(E.complex())), nonzero(oracle::homology_dims(E.complex().differential())));
    }
}

TEST(Induced, StrictMorphismGivesTensorMap)
{
    Rng rng(8);
    auto A = c2_algebra();
    auto F = random_strict_module(A, rng, 0, 3, 2);
    auto T = lens_cocycle(cyclic_group(2), A, 3);
    auto E = build_enriched(F, T);
    auto P = promoted(F, 4);
    GradedMap g = identity_map(F.space()).scaled(Scalar(3));
    GradedMap tilde = induce_morphism(strict_morphism(P, P, g, 4), E, E);
    EXPECT_TRUE(tilde == flatten(tensor_maps_factored(g, identity_map(T.crit())), E.space(), E.space()));
}

TEST(Induced, ZeroCocycleIgnoresHigherComponents)
{
    Rng rng(9);
    auto A = c2_algebra();
    auto F = lens_module(A, cyclic_group(2), 3);
    TwistingCocycle T(A, critical_set({{"x0", 0}, {"x2", 2}}));
    auto E = build_enriched(F, T);
    auto eta = transfer_loop(F, retract_to_homology(F.complex()), 3);
    ASSERT_TRUE(verify_morphism(eta).pass());
    bool higher = false;
    for (std::size_t k = 2; k <= eta.arity(); ++k)
        higher = higher || !eta.map(k).is_zero();
    ASSERT_TRUE(higher);
    GradedMap tilde = induce_morphism(eta, E, E);
    EXPECT_TRUE(tilde == flatten(tensor_maps_factored(eta.map(1), identity_map(T.crit())), E.space(), E.space()));
}

TEST(Induced, RandomMorphismsAreChainMaps)
{
    Rng rng(10);
    auto A = c2_algebra();
    auto T = lens_cocycle(cyclic_group(2), A, 3);
    for (int trial = 0; trial < 8; ++trial) {
        auto F = random_strict_module(A, rng, 0, 3, 2);
        auto E = build_enriched(F, T);
        auto eta = transfer_loop(F, random_retract(F.complex(), rng), 4);
        ASSERT_TRUE(verify_morphism(eta).pass());
        GradedMap tilde = induce_morphism(eta, E, E);
        EXPECT_TRUE(verify_chain_map(tilde, E.complex(), E.complex()).pass());
    }
}

TEST(Induced, LensFiberWithHigherComponents)
{
    auto A = c2_algebra();
    auto F = lens_module(A, cyclic_group(2), 3);
    auto T = lens_cocycle(cyclic_group(2), A, 3);
    auto E = build_enriched(F, T);
    auto eta = transfer_loop(F, retract_to_homology(F.complex()), 4);
    ASSERT_FALSE(eta.map(2).is_zero());
    GradedMap tilde = induce_morphism(eta, E, E);
    EXPECT_TRUE(verify_chain_map(tilde, E.complex(), E.complex()).pass());
    // i∘p is homotopic to the identity, so the induced map is an isomorphism on homology
    EXPECT_TRUE(is_quasi_isomorphism(tilde, E.complex(), E.complex()));
}

TEST(Induced, CompositionIsFunctorial)
{
    Rng rng(12);
    auto A = c2_algebra();
    auto T = lens_cocycle(cyclic_group(2), A, 3);
    for (int trial = 0; trial < 4; ++trial) {
        auto F = random_strict_module(A, rng, 0, 3, 2);
        auto E = build_enriched(F, T);
        auto zeta = transfer_loop(F, random_retract(F.complex(), rng), 4);
        auto theta = transfer_loop(F, random_retract(F.complex(), rng), 4);
        GradedMap lhs = induce_morphism(compose_morphisms(theta, zeta), E, E);
        GradedMap rhs = compose(induce_morphism(theta, E, E), induce_morphism(zeta, E, E));
        EXPECT_TRUE(lhs == rhs);
    }
}

/// Over ℝ[x]/(x^3) with |x| = 2: two chains e → c → a and e → b → a through degree 2 coefficients.
TwistingCocycle polynomial_cocycle(const AlgebraPtr& A)
{
    TwistingCocycle T(A, critical_set({{"a", 0}, {"b", 1}, {"c", 3}, {"e", 4}}));
    T.set("b", "a", A->element("1"));
    T.set("c", "a", A->element("x"));
    T.set("e", "c", A->element("1"));
    T.set("e", "b", Vec{{A->element("x").begin()->first, Scalar(-1)}});
    return T;
}

TEST(Induced, GradedCoefficientsAreChainMapsAndFunctorial)
{
    Rng rng(13);
    auto A = std::make_shared<const DGAlgebra>(truncated_polynomial(2, 3));
    auto T = polynomial_cocycle(A);
    ASSERT_TRUE(verify_twisting_cocycle(T).pass());
    int nontrivial = 0;
    for (int trial = 0; trial < 6; ++trial) {
        auto F = random_strict_module(A, rng, 0, 3, 2);
        auto E = build_enriched(F, T);
        auto zeta = transfer_loop(F, random_retract(F.complex(), rng), 3);
        auto theta = transfer_loop(F, random_retract(F.complex(), rng), 3);
        GradedMap z = induce_morphism(zeta, E, E);
        EXPECT_TRUE(verify_chain_map(z, E.complex(), E.complex()).pass());
        EXPECT_TRUE(induce_morphism(compose_morphisms(theta, zeta), E, E) == compose(induce_morphism(theta, E, E), z));
        nontrivial += !(z == flatten(tensor_maps_factored(zeta.map(1), identity_map(T.crit())), E.space(), E.space()));
    }
    EXPECT_GT(nontrivial, 0);
}

TEST(Induced, ArityBoundTooSmall)
{
    auto A = c2_algebra();
    auto F = lens_module(A, cyclic_group(2), 3);
    auto E = build_enriched(F, lens_cocycle(cyclic_group(2), A, 3));
    auto eta = transfer_loop(F, retract_to_homology(F.complex()), 3);
    try {
        induce_morphism(eta, E, E);
        FAIL() << "expected the arity bound to be rejected";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("η_4"), std::string::npos) << e.what();
    }
}

TEST(Induced, BrokenMorphismRejected)
{
    auto A = c2_algebra();
    auto F = lens_module(A, cyclic_group(2), 3);
    auto E = build_enriched(F, lens_cocycle(cyclic_group(2), A, 3));
    auto eta = transfer_loop(F, retract_to_homology(F.complex()), 4);
    GradedMap& e2 = eta.map_mut(2);
    ASSERT_FALSE(e2.is_zero());
    Key col = e2.columns().begin()->first;
    Key row = e2.columns().begin()->second.begin()->first;
    e2.add_entry(col, row, Scalar(1));
    ASSERT_FALSE(verify_morphism(eta).pass());
    EXPECT_THROW(induce_morphism(eta, E, E), std::invalid_argument);
}

TEST(SpectralSequence, ZeroCocycleDegenerates)
{
    Rng rng(14);
    auto A = c2_algebra();
    auto F = random_strict_module(A, rng, 0, 3, 2);
    TwistingCocycle T(A, critical_set({{"x0", 0}, {"x1", 1}, {"y1", 1}, {"x3", 3}}));
    auto E = build_enriched(F, T);
    auto pages = spectral_sequence(E, 4);
    EXPECT_TRUE(verify_spectral_sequence(pages).pass());
    auto H = oracle::homology_dims(F.d());
    std::map<int, std::size_t> crit{{0, 1}, {1, 2}, {3, 1}};
    for (int p = 0; p <= 3; ++p)
        for (int q = -3; q <= 8; ++q) {
            std::size_t expected = (crit.count(p) ? crit[p] : 0) * (H.count(q) ? H[q] : 0);
            EXPECT_EQ(pages.dim(2, p, q), expected) << "(" << p << ", " << q << ")";
            for (std::size_t r = 1; r <= 4; ++r)
                EXPECT_EQ(pages.rank(r, p, q), 0u);
        }
}

TEST(SpectralSequence, FirstPageIsFiberHomologyTimesCriticalPoints)
{
    Rng rng(15);
    auto A = c2_algebra();
    auto F = random_strict_module(A, rng, 0, 3, 2);
    auto E = build_enriched(F, lens_cocycle(cyclic_group(2), A, 3));
    auto pages = spectral_sequence(E, 3);
    auto H = oracle::homology_dims(F.d());
    for (int p = 0; p <= 3; ++p)
        for (int q = -2; q <= 6; ++q) {
            EXPECT_EQ(pages.dim(0, p, q), F.space()->dim(q)) << "(" << p << ", " << q << ")";
            EXPECT_EQ(pages.dim(1, p, q), H.count(q) ? H[q] : 0) << "(" << p << ", " << q << ")";
        }
}

TEST(SpectralSequence, LensConjugationGrid)
{
    for (std::size_t m : {2u, 3u, 5u}) {
        auto G = cyclic_group(m);
        auto A = cyclic_algebra(m);
        auto F = conjugation_module(G, A, 3, 4);
        auto E = build_enriched(F, lens_cocycle(G, A, 3));
        auto pages = spectral_sequence(E, 3);
        EXPECT_TRUE(verify_spectral_sequence(pages).pass());
        for (int p = -1; p <= 4; ++p)
            for (int q = -1; q <= 9; ++q) {
                bool on = (p == 0 || p == 3) && q >= 0 && q <= 8 && q % 2 == 0;
                EXPECT_EQ(pages.dim(2, p, q), on ? m : 0u) << "m = " << m << " at (" << p << ", " << q << ")";
            }
    }
}

TEST(SpectralSequence, RegularFiberHasNonzeroFirstDifferential)
{
    auto A = cyclic_algebra(3);
    auto E = build_enriched(regular_module(A), lens_cocycle(cyclic_group(3), A, 3));
    auto pages = spectral_sequence(E, 3);
    EXPECT_TRUE(verify_spectral_sequence(pages).pass());
    EXPECT_EQ(pages.dim(1, 0, 0), 3u);
    EXPECT_EQ(pages.rank(1, 1, 0), 2u);
    EXPECT_EQ(pages.rank(1, 2, 0), 1u);
    EXPECT_EQ(pages.rank(1, 3, 0), 2u);
    EXPECT_EQ(pages.dim(2, 0, 0), 1u);
    EXPECT_EQ(pages.dim(2, 3, 0), 1u);
    EXPECT_EQ(pages.dim(2, 1, 0) + pages.dim(2, 2, 0), 0u);
}

TEST(SpectralSequence, RandomEnrichedComplexesConverge)
{
    Rng rng(16);
    for (int trial = 0; trial < 10; ++trial) {
        std::size_t m = static_cast<std::size_t>(uniform(rng, 2, 3));
        auto A = cyclic_algebra(m);
        auto F = random_strict_module(A, rng, 0, 3, 2);
        auto E = build_enriched(F, lens_cocycle(cyclic_group(m), A, uniform(rng, 2, 4)));
        auto pages = spectral_sequence(E, 5);
        EXPECT_TRUE(verify_spectral_sequence(pages).pass());
        std::map<int, std::size_t> total;
        for (const auto& [pq, e] : pages.infinity)
            total[pq.first + pq.second] += e;
        EXPECT_EQ(total, nonzero(oracle::homology_dims(E.complex().differential())));
    }
}
