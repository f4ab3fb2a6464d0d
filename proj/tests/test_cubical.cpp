#include "dgmorse/cubical.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

using namespace dgmorse;

namespace {

Vec chain(const CubicalSet& X, std::initializer_list<std::pair<const char*, long>> terms)
{
    Vec out;
    for (const auto& [label, c] : terms)
        add_term(out, Key{X.position(X.cube(label))}, Scalar(c));
    return out;
}

Vec tensor(const CubicalSet& X, std::initializer_list<std::tuple<const char*, const char*, long>> terms)
{
    Vec out;
    for (const auto& [a, b, c] : terms)
        add_term(out, Key{X.position(X.cube(a)), X.position(X.cube(b))}, Scalar(c));
    return out;
}

Vec diagonal_of(const CubicalSet& X, const char* label)
{
    return serre_diagonal(X).apply(chain(X, {{label, 1}}));
}

CubicalSet point()
{
    CubicalSet X;
    X.add_cube("p", 0, {});
    return X;
}

std::size_t binomial(int n, int k)
{
    std::size_t r = 1;
    for (int i = 1; i <= k; ++i)
        r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
    return r;
}

} // namespace

TEST(CubicalSets, StandardCubesSatisfyIdentities)
{
    for (int n = 0; n <= 4; ++n) {
        auto X = standard_cube(n);
        EXPECT_TRUE(verify_cubical_set(X).pass()) << "n = " << n;
        for (int k = 0; k <= n; ++k)
            EXPECT_EQ(X.count(k), binomial(n, k) << (n - k)) << "n = " << n << ", k = " << k;
    }
}

TEST(CubicalSets, SpheresTorusAndProductsSatisfyIdentities)
{
    EXPECT_TRUE(verify_cubical_set(sphere(1)).pass());
    EXPECT_TRUE(verify_cubical_set(sphere(2)).pass());
    EXPECT_TRUE(verify_cubical_set(sphere(3)).pass());
    EXPECT_TRUE(verify_cubical_set(torus()).pass());
    EXPECT_TRUE(verify_cubical_set(product(sphere(2), standard_cube(1))).pass());
}

TEST(CubicalSets, FacesOfDegenerateCubes)
{
    auto X = standard_cube(1);
    CubeRef c = X.cube("*");
    CubeRef s1 = X.degeneracy(c, 1);
    // s₁c(t₁, t₂) = c(t₂)
    EXPECT_EQ(X.face(s1, 1, 0), c);
    EXPECT_EQ(X.face(s1, 2, 1), X.degeneracy(X.cube("1"), 1));
    EXPECT_EQ(X.describe(X.degeneracy(s1, 3)), "s3(s1(*))");
}

TEST(CubicalSets, BrokenFaceTableIsLocated)
{
    CubicalSet X;
    X.add_cube("v", 0, {});
    X.add_cube("w", 0, {});
    CubeRef v = X.cube("v"), w = X.cube("w");
    X.add_cube("a", 1, {{v, w}});
    X.add_cube("b", 1, {{v, v}});
    CubeRef a = X.cube("a"), b = X.cube("b");
    X.add_cube("sq", 2, {{a, b}, {b, b}});
    Report r = verify_cubical_set(X);
    ASSERT_FALSE(r.pass());
    EXPECT_EQ(r.first_failure()->witness->tensor, "sq");
    EXPECT_THROW(cubical_chains(X), std::invalid_argument);
    EXPECT_FALSE(verify_serre_diagonal(X).pass());
}

TEST(CubicalSets, MalformedCubesRejected)
{
    CubicalSet X;
    X.add_cube("v", 0, {});
    EXPECT_THROW(X.add_cube("v", 0, {}), std::invalid_argument);
    EXPECT_THROW(X.add_cube("e", 1, {}), std::invalid_argument);
    EXPECT_THROW(X.add_cube("e", 2, {{X.cube("v"), X.cube("v")}, {X.cube("v"), X.cube("v")}}), std::invalid_argument);
}

TEST(Boundary, OneCube)
{
    auto X = standard_cube(1);
    EXPECT_EQ(cubical_boundary(X, X.cube("*")), chain(X, {{"1", 1}, {"0", -1}}));
}

TEST(Boundary, SquareExpansion)
{
    auto X = standard_cube(2);
    // d = (∂₁¹ - ∂₁⁰) - (∂₂¹ - ∂₂⁰)
    EXPECT_EQ(cubical_boundary(X, X.cube("**")), chain(X, {{"1*", 1}, {"0*", -1}, {"*1", -1}, {"*0", 1}}));
    for (std::size_t c = 0; c < X.count(2); ++c)
        EXPECT_TRUE(cubical_boundary(X, cubical_boundary(X, CubeRef{2, c, {}})).empty());
}

TEST(Boundary, DegenerateCubesVanish)
{
    auto X = standard_cube(2);
    EXPECT_TRUE(cubical_boundary(X, X.degeneracy(X.cube("00"), 1)).empty());
    EXPECT_TRUE(cubical_boundary(X, X.degeneracy(X.cube("*0"), 2)).empty());
    EXPECT_TRUE(cubical_boundary(X, X.degeneracy(X.cube("*0"), 1)).empty());
    EXPECT_TRUE(cube_chain(X, X.degeneracy(X.cube("1*"), 1)).empty());
}

TEST(Boundary, HomologyOfFixtures)
{
    auto dims = [](const CubicalSet& X) {
        std::map<int, std::size_t> out;
        for (const auto& [n, e] : oracle::homology_dims(cubical_chains(X).differential()))
            if (e)
                out[n] = e;
        return out;
    };
    EXPECT_EQ(dims(standard_cube(3)), (std::map<int, std::size_t>{{0, 1}}));
    EXPECT_EQ(dims(sphere(2)), (std::map<int, std::size_t>{{0, 1}, {2, 1}}));
    EXPECT_EQ(dims(torus()), (std::map<int, std::size_t>{{0, 1}, {1, 2}, {2, 1}}));
    EXPECT_EQ(dims(product(torus(), sphere(1))), (std::map<int, std::size_t>{{0, 1}, {1, 3}, {2, 3}, {3, 1}}));
}

TEST(CrossProduct, PointIsAUnit)
{
    auto P = point();
    auto Y = standard_cube(2);
    auto PY = product(P, Y);
    for (int k = 0; k <= 2; ++k)
        for (std::size_t c = 0; c < Y.count(k); ++c) {
            Vec b = cube_chain(Y, CubeRef{k, c, {}});
            Vec pb = cross_product(P, Y, PY, chain(P, {{"p", 1}}), b);
            ASSERT_EQ(pb.size(), 1u);
            EXPECT_EQ(PY.chain_space()->label(static_cast<std::size_t>(pb.begin()->first[0])), "p×" + Y.label(k, c));
            EXPECT_EQ(cubical_boundary(PY, pb), cross_product(P, Y, PY, chain(P, {{"p", 1}}), cubical_boundary(Y, b)));
        }
}

TEST(CrossProduct, IntervalTimesChain)
{
    auto I = standard_cube(1);
    auto Y = torus();
    auto IY = product(I, Y);
    Vec interval = chain(I, {{"*", 1}});
    for (int k = 0; k <= 2; ++k)
        for (std::size_t c = 0; c < Y.count(k); ++c) {
            Vec b = cube_chain(Y, CubeRef{k, c, {}});
            // d(I×b) = {1}×b - {0}×b - I×db
            Vec expected = cross_product(I, Y, IY, chain(I, {{"1", 1}}), b);
            axpy(expected, Scalar(-1), cross_product(I, Y, IY, chain(I, {{"0", 1}}), b));
            axpy(expected, Scalar(-1), cross_product(I, Y, IY, interval, cubical_boundary(Y, b)));
            EXPECT_EQ(cubical_boundary(IY, cross_product(I, Y, IY, interval, b)), expected);
        }
}

TEST(CrossProduct, LeibnizOnAllPairs)
{
    auto X = standard_cube(2);
    auto Y = sphere(2);
    auto XY = product(X, Y);
    for (int p = 0; p <= 2; ++p)
        for (std::size_t a = 0; a < X.count(p); ++a)
            for (int q = 0; q <= 2; ++q)
                for (std::size_t b = 0; b < Y.count(q); ++b) {
                    Vec ca = cube_chain(X, CubeRef{p, a, {}});
                    Vec cb = cube_chain(Y, CubeRef{q, b, {}});
                    Vec expected = cross_product(X, Y, XY, cubical_boundary(X, ca), cb);
                    axpy(expected, Scalar(sign_of(p)), cross_product(X, Y, XY, ca, cubical_boundary(Y, cb)));
                    EXPECT_EQ(cubical_boundary(XY, cross_product(X, Y, XY, ca, cb)), expected);
                }
}

TEST(SerreDiagonal, LowDimensionalCubes)
{
    auto X = standard_cube(2);
    EXPECT_EQ(diagonal_of(X, "01"), tensor(X, {{"01", "01", 1}}));
    auto I = standard_cube(1);
    EXPECT_EQ(diagonal_of(I, "*"), tensor(I, {{"0", "*", 1}, {"*", "1", 1}}));
    EXPECT_EQ(diagonal_of(X, "**"),
              tensor(X, {{"00", "**", 1}, {"*0", "1*", 1}, {"0*", "*1", -1}, {"**", "11", 1}}));
}

TEST(SerreDiagonal, SphereClassIsPrimitive)
{
    auto S = sphere(2);
    EXPECT_EQ(diagonal_of(S, "e2"), tensor(S, {{"pt", "e2", 1}, {"e2", "pt", 1}}));
    auto S3 = sphere(3);
    EXPECT_EQ(diagonal_of(S3, "e3"), tensor(S3, {{"pt", "e3", 1}, {"e3", "pt", 1}}));
}

TEST(SerreDiagonal, TorusTopCell)
{
    auto T = torus();
    EXPECT_EQ(diagonal_of(T, "e1×e1"), tensor(T, {{"pt×pt", "e1×e1", 1},
                                                  {"e1×pt", "pt×e1", 1},
                                                  {"pt×e1", "e1×pt", -1},
                                                  {"e1×e1", "pt×pt", 1}}));
}

TEST(SerreDiagonal, ChainMapCoassociativeAndCounital)
{
    std::vector<std::pair<std::string, CubicalSet>> fixtures{
        {"I^1", standard_cube(1)}, {"I^2", standard_cube(2)},   {"I^3", standard_cube(3)},
        {"I^4", standard_cube(4)}, {"S^2", sphere(2)},          {"S^3", sphere(3)},
        {"T^2", torus()},          {"T^2×I", product(torus(), standard_cube(1))},
        {"S^2×S^1", product(sphere(2), sphere(1))}};
    for (const auto& [name, X] : fixtures) {
        Report r = verify_serre_diagonal(X);
        EXPECT_TRUE(r.pass()) << name << ": " << (r.pass() ? "" : r.first_failure()->name);
    }
}

TEST(SerreDiagonal, WrongSignBreaksTheChainMapProperty)
{
    auto X = standard_cube(2);
    GradedMap delta = serre_diagonal(X);
    GradedMap d = cubical_boundary_map(X);
    auto col = Key{X.position(X.cube("**"))};
    auto row = Key{X.position(X.cube("0*")), X.position(X.cube("*1"))};
    delta.add_entry(col, row, Scalar(2));
    Vec x = unit_vec(col);
    Vec lhs = delta.apply(d.apply(x));
    axpy(lhs, Scalar(-1), tensor_differential(delta.apply(x), {X.chain_space(), X.chain_space()}, {&d, &d}));
    EXPECT_FALSE(lhs.empty());
}
