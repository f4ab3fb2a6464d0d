#ifndef DGMORSE_TEST_HELPERS_HPP
#define DGMORSE_TEST_HELPERS_HPP

#include "dgmorse/random.hpp"

#include <memory>
#include <string>
#include <vector>

namespace dgmorse::testing {

inline AlgebraPtr c2_algebra()
{
    return std::make_shared<const DGAlgebra>(group_algebra(cyclic_group(2)));
}

/// g - 1 and the norm element 1 + g + ... + g^{m-1} of ℝ[G] for the generator g = s.
inline std::pair<Vec, Vec> lens_elements(const DGAlgebra& A, const FiniteGroup& G)
{
    Vec t{{Key{static_cast<std::int32_t>(A.space()->index(0, G.label(1)))}, Scalar(1)},
          {Key{static_cast<std::int32_t>(A.unit())}, Scalar(-1)}};
    Vec norm;
    for (std::size_t g = 0; g < G.order(); ++g)
        add_term(norm, Key{static_cast<std::int32_t>(A.space()->index(0, G.label(g)))}, Scalar(1));
    return {t, norm};
}

/// Regular lens complex over ℝ[ℤ/m] in degrees 0..top: free on w_0..w_top with
/// d w_j = w_{j-1}·(g - 1) for odd j and w_{j-1}·N for even j.
inline StrictModule lens_module(const AlgebraPtr& A, const FiniteGroup& G, int top)
{
    auto [t, norm] = lens_elements(*A, G);
    std::vector<Vec> ts;
    for (int j = 1; j <= top; ++j)
        ts.push_back(j % 2 == 1 ? t : norm);
    return chain_module(A, ts, 0);
}

/// Random map with entries in about half the admissible positions.
inline GradedMap random_map(const Factors& src, const Factors& tgt, int degree, Rng& rng)
{
    GradedMap f(src, tgt, degree);
    for_each_key(src, [&](const Key& k) {
        int q = key_degree(src, k) + degree;
        auto [b, e] = tgt[0]->range(q);
        for (std::size_t i = b; i < e; ++i)
            if (uniform(rng, 0, 1) == 1)
                f.add_entry(k, Key{static_cast<std::int32_t>(i)}, small_rational(rng));
    });
    return f;
}

} // namespace dgmorse::testing

#endif // DGMORSE_TEST_HELPERS_HPP
