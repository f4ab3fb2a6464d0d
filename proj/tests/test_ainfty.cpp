#include "helpers.hpp"

#include <gtest/gtest.h>

using namespace dgmorse;

using namespace dgmorse::testing;

TEST(Dga, GroupAlgebraPasses)
{
    EXPECT_TRUE(verify_dga(group_algebra(cyclic_group(2))).pass());
}

TEST(Dga, TruncatedPolynomialPasses)
{
    auto A = truncated_polynomial(2, 6);
    EXPECT_EQ(A.space()->dim(), 6u);
    EXPECT_EQ(A.space()->degree(5), 10);
    EXPECT_TRUE(verify_dga(A).pass());
}

TEST(Dga, CorruptedStructureConstantIsLocated)
{
    auto A = group_algebra(cyclic_group(3));
    GradedMap mu = A.mu();
    mu.add_entry(Key{1, 1}, Key{2}, Scalar(1));  // s·s = 2 s^2
    auto bad = DGAlgebra::unchecked(A.complex(), mu, A.unit());
    auto report = verify_dga(bad);
    ASSERT_FALSE(report.pass());
    const Check* c = report.first_failure();
    EXPECT_EQ(c->name, "associativity");
    ASSERT_TRUE(c->witness.has_value());
    EXPECT_THROW(DGAlgebra(A.complex(), mu, A.unit()), std::invalid_argument);
}

TEST(Dga, TensorAndAcyclicAlgebrasPass)
{
    EXPECT_TRUE(verify_dga(acyclic_algebra()).pass());
    auto T = tensor_algebra(group_algebra(cyclic_group(2)), acyclic_algebra());
    EXPECT_EQ(T.space()->dim(), 4u);
    EXPECT_TRUE(verify_dga(T).pass());
    EXPECT_EQ(homology(T.complex()).space->dim(), 0u);
}

TEST(StrictModules, PromotedStrictModulePasses)
{
    Rng rng(3);
    for (int t = 0; t < 10; ++t) {
        auto A = random_dga(rng);
        auto M = random_strict_module(A, rng);
        EXPECT_TRUE(verify_module(M).pass());
        auto report = verify_ainfty_module(AInftyModule::from_strict(M, 4));
        EXPECT_TRUE(report.pass()) << report.first_failure()->name;
    }
}

TEST(StrictModules, LensModuleIsAComplex)
{
    auto G = cyclic_group(3);
    auto A = std::make_shared<const DGAlgebra>(group_algebra(G));
    auto M = lens_module(A, G, 3);
    EXPECT_TRUE(verify_module(M).pass());
    auto dims = homology_dims(M.complex());
    EXPECT_EQ(dims[0], 1u);
    EXPECT_EQ(dims[1], 0u);
    EXPECT_EQ(dims[2], 0u);
    EXPECT_EQ(dims[3], 1u);
}

TEST(Transfer, IdentityRetractReturnsOriginalStructure)
{
    auto A = c2_algebra();
    auto M = lens_module(A, cyclic_group(2), 3);
    auto t = homotopy_transfer(M, identity_retract(M.complex()), 4);
    EXPECT_EQ(t.small->op(2), M.action());
    EXPECT_TRUE(t.small->op(3).is_zero());
    EXPECT_TRUE(t.small->op(4).is_zero());
}

TEST(Transfer, DeformationFreeRetractKillsHigherOperations)
{
    Rng rng(8);
    auto A = c2_algebra();
    auto M = random_strict_module(A, rng);
    auto P = random_automorphism(M.space(), rng);
    // i = P, p = P^{-1}, h = 0 onto the conjugated complex
    ChainComplex small(M.space(), compose(invert_map(P), compose(M.d(), P)));
    HomotopyRetract R{M.complex(), small, P, invert_map(P), GradedMap(M.space(), M.space(), 1)};
    auto t = homotopy_transfer(M, R, 4);
    GradedMap expected = compose(R.p, compose(M.action(), tensor_maps_factored(R.i, identity_map(A->space()))));
    EXPECT_EQ(t.small->op(2), expected);
    EXPECT_TRUE(t.small->op(3).is_zero());
    EXPECT_TRUE(t.small->op(4).is_zero());
    EXPECT_TRUE(verify_ainfty_module(*t.small).pass());
}

TEST(Transfer, LensModuleOntoHomologyUpToAritySix)
{
    auto G = cyclic_group(2);
    auto A = std::make_shared<const DGAlgebra>(group_algebra(G));
    auto M = lens_module(A, G, 3);
    auto t = homotopy_transfer(M, retract_to_homology(M.complex()), 6);
    auto report = verify_ainfty_module(*t.small);
    EXPECT_TRUE(report.pass()) << report.first_failure()->name;
    EXPECT_TRUE(verify_morphism(t.i).pass());
    EXPECT_TRUE(verify_morphism(t.p).pass());
}

TEST(Transfer, RandomRetractsGiveValidStructures)
{
    Rng rng(17);
    int nontrivial = 0;
    for (int t = 0; t < 12; ++t) {
        auto A = random_dga(rng);
        auto M = random_strict_module(A, rng);
        auto tr = homotopy_transfer(M, random_retract(M.complex(), rng), 5);
        auto rm = verify_ainfty_module(*tr.small);
        EXPECT_TRUE(rm.pass()) << "seed step " << t << ": " << rm.first_failure()->name << " at "
                               << rm.first_failure()->witness->tensor;
        auto ri = verify_morphism(tr.i);
        EXPECT_TRUE(ri.pass()) << "i: " << ri.first_failure()->name;
        auto rp = verify_morphism(tr.p);
        EXPECT_TRUE(rp.pass()) << "p: " << rp.first_failure()->name;
        nontrivial += !tr.small->op(3).is_zero();
    }
    EXPECT_GT(nontrivial, 0);
}

TEST(Transfer, PerturbedM3IsDetected)
{
    Rng rng(21);
    auto G = cyclic_group(2);
    auto A = std::make_shared<const DGAlgebra>(group_algebra(G));
    auto M = lens_module(A, G, 3);
    auto t = homotopy_transfer(M, identity_retract(M.complex()), 4);
    AInftyModule broken = *t.small;
    GradedMap& m3 = broken.op_mut(3);
    GradedMap perturbation = random_map(m3.source(), m3.target(), 1, rng);
    // only perturbations that are not cycles in the Hom complex can be seen at N = 3
    std::vector<const GradedMap*> diffs{&M.d(), &A->d(), &A->d()};
    bool cycle = true;
    for_each_key(m3.source(), [&](const Key& k) {
        Vec x = unit_vec(k);
        Vec v = apply_at(M.d(), 0, perturbation.apply(x), {M.space()});
        axpy(v, Scalar(1), perturbation.apply(tensor_differential(x, m3.source(), diffs)));
        cycle = cycle && v.empty();
    });
    ASSERT_FALSE(cycle);
    m3 += perturbation;
    auto report = verify_ainfty_module(broken);
    ASSERT_FALSE(report.pass());
    EXPECT_TRUE(report.first_failure()->name == "N = 3" || report.first_failure()->name == "N = 4");
}

TEST(Morphisms, IdentityAndZeroPass)
{
    Rng rng(4);
    auto A = c2_algebra();
    auto M = std::make_shared<const AInftyModule>(AInftyModule::from_strict(random_strict_module(A, rng), 4));
    EXPECT_TRUE(verify_morphism(identity_morphism(M)).pass());
    auto zero = strict_morphism(M, M, GradedMap(M->space(), M->space(), 0), 4);
    EXPECT_TRUE(verify_morphism(zero).pass());
}

TEST(Morphisms, ComposeWithIdentity)
{
    Rng rng(5);
    for (int t = 0; t < 4; ++t) {
        auto fx = random_infty_iso(rng, 4);
        const auto& f = fx.iso;
        EXPECT_TRUE(verify_morphism(f).pass());
        EXPECT_EQ(compose_morphisms(identity_morphism(f.target()), f), f);
        EXPECT_EQ(compose_morphisms(f, identity_morphism(f.source())), f);
    }
}

TEST(Morphisms, InverseRoundtrip)
{
    Rng rng(6);
    for (int t = 0; t < 6; ++t) {
        auto fx = random_infty_iso(rng, 5);
        const auto& f = fx.iso;
        auto g = invert_infty_iso(f);
        EXPECT_TRUE(verify_morphism(g).pass());
        EXPECT_EQ(compose_morphisms(g, f), identity_morphism(f.source()));
        EXPECT_EQ(compose_morphisms(f, g), identity_morphism(f.target()));
    }
}

TEST(Morphisms, StrictIsomorphismInvertsStrictly)
{
    Rng rng(7);
    auto A = c2_algebra();
    auto M = random_strict_module(A, rng);
    auto src = std::make_shared<const AInftyModule>(AInftyModule::from_strict(M, 4));
    GradedMap twoid = identity_map(M.space()).scaled(2);
    auto f = strict_morphism(src, src, twoid, 4);
    auto g = invert_infty_iso(f);
    EXPECT_EQ(g.map(1), identity_map(M.space()).scaled(rational(1, 2)));
    for (std::size_t k = 2; k <= 4; ++k)
        EXPECT_TRUE(g.map(k).is_zero());
}

TEST(Morphisms, SingularFirstComponentRejected)
{
    Rng rng(9);
    auto A = c2_algebra();
    auto M = std::make_shared<const AInftyModule>(AInftyModule::from_strict(random_strict_module(A, rng), 3));
    auto zero = strict_morphism(M, M, GradedMap(M->space(), M->space(), 0), 3);
    EXPECT_THROW(invert_infty_iso(zero), std::domain_error);
}

TEST(Morphisms, StrictFormAgreesOnStrictModules)
{
    Rng rng(10);
    auto A = c2_algebra();
    auto M = random_strict_module(A, rng);
    auto src = std::make_shared<const AInftyModule>(AInftyModule::from_strict(M, 3));
    auto good = identity_morphism(src);
    EXPECT_TRUE(verify_morphism_strict_form(good).pass());
    auto bad = good;
    bad.map_mut(2) = random_map(bad.map(2).source(), bad.map(2).target(), 1, rng);
    EXPECT_EQ(verify_morphism(bad).pass(), verify_morphism_strict_form(bad).pass());
    auto r1 = verify_morphism(bad), r2 = verify_morphism_strict_form(bad);
    for (std::size_t n = 0; n < r1.checks.size(); ++n)
        EXPECT_EQ(r1.checks[n].pass, r2.checks[n].pass) << r1.checks[n].name;
}

TEST(Morphisms, CompositionIsAssociative)
{
    Rng rng(11);
    auto fx = random_infty_iso(rng, 4);
    auto f = fx.iso;
    auto g = invert_infty_iso(f);
    auto lhs = compose_morphisms(compose_morphisms(f, g), f);
    auto rhs = compose_morphisms(f, compose_morphisms(g, f));
    EXPECT_EQ(lhs, rhs);
}
