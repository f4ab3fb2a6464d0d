#ifndef DGMORSE_RANDOM_HPP
#define DGMORSE_RANDOM_HPP

#include "dgmorse/ainfty.hpp"
#include "dgmorse/pathmod.hpp"

#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

/**
 * @file
 * Seeded generators for property sweeps. Every generator draws only from the std::mt19937
 * passed in, so a seed reproduces the whole instance.
 */

namespace dgmorse {

using Rng = std::mt19937;

inline int uniform(Rng& rng, int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Small nonzero rational with numerator in [-3, 3] and denominator in [1, 3].
inline Scalar small_rational(Rng& rng)
{
    int p = 0;
    while (p == 0)
        p = uniform(rng, -3, 3);
    return rational(p, uniform(rng, 1, 3));
}

/// Random degree-preserving automorphism: a product of elementary row operations.
inline GradedMap random_automorphism(const SpacePtr& s, Rng& rng, int steps = 8)
{
    GradedMap P = identity_map(s);
    if (s->dim() < 2)
        return P;
    for (int t = 0; t < steps; ++t) {
        std::size_t i = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(s->dim()) - 1));
        std::size_t j = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(s->dim()) - 1));
        if (i == j || s->degree(i) != s->degree(j))
            continue;
        GradedMap E = identity_map(s);
        E.add_entry(i, j, Scalar(uniform(rng, -2, 2)));
        P = compose(E, P);
    }
    return P;
}

/**
 * Random complex with degrees in [lo, hi] and at most max_per_degree basis elements per degree:
 * a sum of one-term and acyclic two-term pieces, conjugated by a random automorphism.
 */
inline ChainComplex random_complex(Rng& rng, int lo, int hi, int max_per_degree, int pieces,
                                   const std::string& prefix = "e")
{
    std::vector<BasisElement> basis;
    std::vector<std::pair<std::size_t, std::size_t>> arrows;
    std::map<int, int> count;
    for (int t = 0; t < pieces; ++t) {
        int q = uniform(rng, lo, hi);
        bool pair = uniform(rng, 0, 1) == 1 && q > lo;
        if (count[q] >= max_per_degree || (pair && count[q - 1] >= max_per_degree))
            continue;
        basis.push_back({q, prefix + std::to_string(basis.size())});
        ++count[q];
        if (pair) {
            basis.push_back({q - 1, prefix + std::to_string(basis.size())});
            ++count[q - 1];
            arrows.push_back({basis.size() - 2, basis.size() - 1});
        }
    }
    if (basis.empty())
        basis.push_back({lo, prefix + "0"});
    auto s = make_space(basis);
    GradedMap d0(s, s, -1);
    for (auto [a, b] : arrows)
        d0.add_entry(s->index(basis[a].degree, basis[a].label), s->index(basis[b].degree, basis[b].label), Scalar(1));
    GradedMap P = random_automorphism(s, rng);
    return ChainComplex(s, compose(P, compose(d0, invert_map(P))));
}

/// One of a fixed menu of small DGAs (dimension ≤ 4).
inline AlgebraPtr random_dga(Rng& rng)
{
    switch (uniform(rng, 0, 5)) {
    case 0:
        return std::make_shared<const DGAlgebra>(group_algebra(cyclic_group(2)));
    case 1:
        return std::make_shared<const DGAlgebra>(group_algebra(cyclic_group(3)));
    case 2:
        return std::make_shared<const DGAlgebra>(truncated_polynomial(2, 3));
    case 3:
        return std::make_shared<const DGAlgebra>(truncated_polynomial(1, 2));
    case 4:
        return std::make_shared<const DGAlgebra>(acyclic_algebra());
    default:
        return std::make_shared<const DGAlgebra>(tensor_algebra(group_algebra(cyclic_group(2)), acyclic_algebra()));
    }
}

/**
 * A-linear automorphism of a free module V⊗A fixing nothing in particular: generator v is sent
 * to v⊗1 + Σ_{w later than v} w⊗a_{vw} with random homogeneous a_{vw}.
 */
inline GradedMap random_linear_automorphism(const StrictModule& M, const SpacePtr& generators, Rng& rng)
{
    const SpacePtr& S = M.space();
    const SpacePtr& A = M.algebra()->space();
    const auto unit = static_cast<std::uint32_t>(M.algebra()->unit());
    GradedMap phi(S, S, 0);
    for (std::size_t v = 0; v < generators->dim(); ++v) {
        Vec image{{Key{static_cast<std::int32_t>(*S->find_parts({static_cast<std::uint32_t>(v), unit}))}, Scalar(1)}};
        for (std::size_t w = v + 1; w < generators->dim(); ++w) {
            int need = generators->degree(v) - generators->degree(w);
            auto [b, e] = A->range(need);
            for (std::size_t a = b; a < e; ++a)
                if (uniform(rng, 0, 2) == 0)
                    add_term(image, Key{static_cast<std::int32_t>(*S->find_parts({static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(a)}))},
                             Scalar(uniform(rng, -2, 2)));
        }
        for (std::size_t b = 0; b < A->dim(); ++b) {
            Vec moved = apply_at(M.action(), 0, [&] {
                Vec t;
                for (const auto& [k, c] : image)
                    add_term(t, Key{k[0], static_cast<std::int32_t>(b)}, c);
                return t;
            }(), Factors{S, A});
            auto col = static_cast<std::int32_t>(*S->find_parts({static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(b)}));
            phi.add_column(Key{col}, moved);
        }
    }
    return phi;
}

/**
 * Pairs (s, t) of nonzero homogeneous cycles with st = ts = 0, drawn from basis elements,
 * differences b - 1 and sums of degree-0 basis elements.
 */
inline std::vector<std::pair<Vec, Vec>> annihilating_pairs(const DGAlgebra& A)
{
    const SpacePtr& S = A.space();
    const auto unit = static_cast<std::int32_t>(A.unit());
    std::vector<Vec> candidates;
    Vec norm;
    for (std::size_t b = 0; b < S->dim(); ++b) {
        const auto k = static_cast<std::int32_t>(b);
        candidates.push_back(unit_vec(Key{k}));
        if (S->degree(b) == 0) {
            add_term(norm, Key{k}, Scalar(1));
            if (k != unit)
                candidates.push_back(Vec{{Key{k}, Scalar(1)}, {Key{unit}, Scalar(-1)}});
        }
    }
    candidates.push_back(norm);
    std::vector<std::pair<Vec, Vec>> out;
    for (const auto& s : candidates)
        for (const auto& t : candidates) {
            if (!apply_at(A.d(), 0, s, {S}).empty() || !apply_at(A.d(), 0, t, {S}).empty())
                continue;
            if (A.multiply(s, t).empty() && A.multiply(t, s).empty())
                out.emplace_back(s, t);
        }
    return out;
}

/**
 * Random strict module: either a free module on a random complex or a chain module alternating
 * an annihilating pair, then twisted by a random A-linear automorphism.
 */
inline StrictModule random_strict_module(const AlgebraPtr& A, Rng& rng, int lo = -2, int hi = 4, int pieces = 3)
{
    auto pairs = annihilating_pairs(*A);
    if (!pairs.empty() && uniform(rng, 0, 2) != 0) {
        const auto& [s, t] = pairs[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(pairs.size()) - 1))];
        const int qs = A->space()->degree(static_cast<std::size_t>(s.begin()->first[0]));
        const int qt = A->space()->degree(static_cast<std::size_t>(t.begin()->first[0]));
        std::vector<Vec> ts;
        int top = lo;
        int length = uniform(rng, 1, 3);
        for (int j = 0; j < length; ++j) {
            const Vec& next = (j % 2 == 0) ? s : t;
            int step = ((j % 2 == 0) ? qs : qt) + 1;
            if (top + step > hi + 2)
                break;
            top += step;
            ts.push_back(next);
        }
        if (!ts.empty()) {
            StrictModule C = chain_module(A, ts, lo);
            return conjugate_module(C, random_linear_automorphism(C, C.space()->factors()[0], rng));
        }
    }
    ChainComplex V = random_complex(rng, lo, hi, 2, pieces, "v");
    StrictModule F = free_module(A, V);
    return conjugate_module(F, random_linear_automorphism(F, V.space(), rng));
}

/// Retract onto homology computed in a randomly changed basis and transported back.
inline HomotopyRetract random_retract(const ChainComplex& C, Rng& rng)
{
    GradedMap P = random_automorphism(C.space(), rng, 12);
    GradedMap Pi = invert_map(P);
    ChainComplex C2(C.space(), compose(P, compose(C.differential(), Pi)));
    HomotopyRetract R = retract_to_homology(C2);
    return {C, R.small, compose(Pi, R.i), compose(R.p, P), compose(Pi, compose(R.h, P))};
}

/**
 * Genuine ∞-isomorphism between two transferred structures on the homology of a random strict
 * module: p' ∘ i for two different retracts.
 */
struct IsoFixture {
    StrictModule module;
    AInftyMorphism iso;
};

inline IsoFixture random_infty_iso(Rng& rng, std::size_t K)
{
    for (;;) {
        AlgebraPtr A = random_dga(rng);
        StrictModule M = random_strict_module(A, rng);
        HomotopyRetract R1 = retract_to_homology(M.complex());
        if (R1.small.space()->dim() == 0)
            continue;
        HomotopyRetract R2 = random_retract(M.complex(), rng);
        auto t1 = homotopy_transfer(M, R1, K);
        auto t2 = homotopy_transfer(M, R2, K);
        return {M, compose_morphisms(t2.p, t1.i)};
    }
}

/**
 * Coefficient complex W for tensor path pairs: w0 and u in degree 0, v and w1 in degree 1, with
 * dv = u. Its homology is spanned by w0 and w1.
 */
inline ChainComplex path_coefficients()
{
    auto W = make_space({{0, "w0"}, {0, "u"}, {1, "v"}, {1, "w1"}});
    GradedMap d(W, W, -1);
    d.add_entry(W->index(1, "v"), W->index(0, "u"), Scalar(1));
    return ChainComplex(W, std::move(d));
}

/// Strict path module over A⊗W for a random strict module, with an ∞-isomorphism between two transfers.
struct PathIsoFixture {
    StrictModule module;
    PathModule strict;
    PathMorphism iso;
};

inline PathIsoFixture random_path_iso(Rng& rng, std::size_t K)
{
    for (;;) {
        AlgebraPtr A = random_dga(rng);
        StrictModule M = random_strict_module(A, rng);
        HomotopyRetract R1 = retract_to_homology(M.complex());
        if (R1.small.space()->dim() == 0)
            continue;
        auto pair = std::make_shared<const PathPair>(PathPair::tensor(A, path_coefficients(), "w0"));
        PathModule E = strict_path_module(M, pair);
        auto t1 = transfer_path(E, path_retract(E, R1), K);
        auto t2 = transfer_path(E, path_retract(E, random_retract(M.complex(), rng)), K);
        return {M, E, compose_path(t2.p, t1.i)};
    }
}

} // namespace dgmorse

#endif // DGMORSE_RANDOM_HPP
