#ifndef DGMORSE_TEST_SNG_ORACLE_HPP
#define DGMORSE_TEST_SNG_ORACLE_HPP

#include "dgmorse/sng.hpp"

namespace dgmorse::oracle {

/**
 * Brute-force expansion of the closed coproduct formula: for every split i + j = k - 1 and every
 * factorization g = ab over group elements, x_{[g],k} gains x_{[a],i}⊗x_{[b],j}, and y_{[g],k}
 * gains x_{[a],i}⊗y_{[b],j} + y_{[a],i}⊗x_{[b],j}. Terms are then collapsed to classes.
 */
inline CoproductRow closed_formula(const FiniteGroup& G, const FreeLoopClass& c)
{
    using Kind = FreeLoopClass::Kind;
    CoproductRow out;
    auto idx = class_index(G);
    std::size_t g = 0;
    while (idx[g] != c.cls)
        ++g;
    for (int i = 0; i < c.level; ++i)
        for (std::size_t h = 0; h < G.order(); ++h) {
            std::size_t left = 0;
            while (G.multiply(left, h) != g)
                ++left;
            FreeLoopClass L{Kind::x, idx[left], i}, R{Kind::x, idx[h], c.level - 1 - i};
            if (c.kind == Kind::x) {
                out[{L, R}] += 1;
            } else {
                out[{L, FreeLoopClass{Kind::y, R.cls, R.level}}] += 1;
                out[{FreeLoopClass{Kind::y, L.cls, L.level}, R}] += 1;
            }
        }
    return out;
}

} // namespace dgmorse::oracle

#endif // DGMORSE_TEST_SNG_ORACLE_HPP
