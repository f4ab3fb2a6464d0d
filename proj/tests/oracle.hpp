#ifndef DGMORSE_TEST_ORACLE_HPP
#define DGMORSE_TEST_ORACLE_HPP

#include "dgmorse/ainfty.hpp"
#include "dgmorse/graded_map.hpp"

#include <gmpxx.h>

#include <functional>
#include <map>
#include <vector>

namespace dgmorse::oracle {

using Dense = std::vector<std::vector<mpq_class>>;

/// Rank by plain Gaussian elimination on a copy.
inline std::size_t dense_rank(Dense m)
{
    std::size_t rank = 0;
    const std::size_t rows = m.size();
    const std::size_t cols = rows ? m[0].size() : 0;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t piv = rank;
        while (piv < rows && m[piv][c] == 0)
            ++piv;
        if (piv == rows)
            continue;
        std::swap(m[piv], m[rank]);
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == rank || m[r][c] == 0)
                continue;
            mpq_class f = m[r][c] / m[rank][c];
            for (std::size_t k = c; k < cols; ++k)
                m[r][k] -= f * m[rank][k];
        }
        ++rank;
    }
    return rank;
}

/// Dense matrix of a single-factor map from degree q, indexed by absolute basis positions.
inline Dense dense_block(const GradedMap& f, int q)
{
    const auto& src = *f.source_space();
    const auto& tgt = *f.target_space();
    std::vector<std::size_t> cols, rows;
    for (std::size_t j = 0; j < src.dim(); ++j)
        if (src.degree(j) == q)
            cols.push_back(j);
    for (std::size_t i = 0; i < tgt.dim(); ++i)
        if (tgt.degree(i) == q + f.degree())
            rows.push_back(i);
    Dense m(rows.size(), std::vector<mpq_class>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (std::size_t r = 0; r < rows.size(); ++r)
            m[r][c] = f.entry(Key{static_cast<std::int32_t>(cols[c])}, Key{static_cast<std::int32_t>(rows[r])});
    return m;
}

/// dim H_n = dim C_n - rank d_n - rank d_{n+1}, for every degree carrying basis elements.
inline std::map<int, std::size_t> homology_dims(const GradedMap& d)
{
    const auto& S = *d.source_space();
    std::map<int, std::size_t> count;
    for (std::size_t i = 0; i < S.dim(); ++i)
        ++count[S.degree(i)];
    std::map<int, std::size_t> out;
    for (const auto& [n, c] : count)
        out[n] = c - dense_rank(dense_block(d, n)) - dense_rank(dense_block(d, n + 1));
    return out;
}

/// A tensor as basis tuples with coefficients, expanded without the sparse engine.
using Expansion = std::map<std::vector<int>, mpq_class>;

/// Positions of the factor spaces of a tensor, together with their degrees.
struct Shape {
    std::vector<SpacePtr> factors;

    int degree(const std::vector<int>& t, std::size_t upto) const
    {
        int d = 0;
        for (std::size_t j = 0; j < upto; ++j)
            d += factors[j]->degree(static_cast<std::size_t>(t[j]));
        return d;
    }
};

/// Applies a multilinear map at `pos` by reading every matrix entry, with sign (-1)^{|op|·(degrees in front)}.
inline Expansion expand_at(const GradedMap& op, std::size_t pos, const Expansion& x, const Shape& shape)
{
    const std::size_t width = op.source_arity();
    const SpacePtr& out = op.target_space();
    Expansion res;
    for (const auto& [t, c] : x) {
        Key col;
        for (std::size_t j = 0; j < width; ++j)
            col.push(t[pos + j]);
        const mpq_class sign = (op.degree() * shape.degree(t, pos)) % 2 == 0 ? 1 : -1;
        for (std::size_t row = 0; row < out->dim(); ++row) {
            mpq_class e = op.entry(col, Key{static_cast<std::int32_t>(row)});
            if (e == 0)
                continue;
            std::vector<int> u(t.begin(), t.begin() + static_cast<long>(pos));
            u.push_back(static_cast<int>(row));
            u.insert(u.end(), t.begin() + static_cast<long>(pos + width), t.end());
            res[u] += sign * c * e;
        }
    }
    std::erase_if(res, [](const auto& kv) { return kv.second == 0; });
    return res;
}

/// Shape after replacing `width` factors at `pos` by the target of op.
inline Shape replaced(const Shape& s, std::size_t pos, const GradedMap& op)
{
    Shape r;
    r.factors.assign(s.factors.begin(), s.factors.begin() + static_cast<long>(pos));
    r.factors.push_back(op.target_space());
    r.factors.insert(r.factors.end(), s.factors.begin() + static_cast<long>(pos + op.source_arity()), s.factors.end());
    return r;
}

inline void accumulate(Expansion& into, const mpq_class& c, const Expansion& x)
{
    for (const auto& [t, v] : x)
        into[t] += c * v;
    std::erase_if(into, [](const auto& kv) { return kv.second == 0; });
}

/// Σ_i (-1)^{|x_0|+...+|x_{i-1}|} x_0⊗...⊗d x_i⊗...: the module differential on the first factor, d_A elsewhere.
inline Expansion koszul_differential(const GradedMap& d0, const GradedMap& dA, const Expansion& x, const Shape& shape)
{
    Expansion res;
    for (std::size_t i = 0; i < shape.factors.size(); ++i)
        accumulate(res, 1, expand_at(i == 0 ? d0 : dA, i, x, shape));
    return res;
}

/// Every basis tuple of the given shape.
inline void for_each_tuple(const Shape& shape, const std::function<void(const std::vector<int>&)>& fn)
{
    std::vector<int> t(shape.factors.size(), 0);
    for (const auto& f : shape.factors)
        if (f->dim() == 0)
            return;
    while (true) {
        fn(t);
        std::size_t i = t.size();
        while (i > 0) {
            --i;
            if (++t[i] < static_cast<int>(shape.factors[i]->dim()))
                break;
            t[i] = 0;
            if (i == 0)
                return;
        }
        if (t.empty())
            return;
    }
}

inline Shape module_shape(const AInftyModule& M, std::size_t arity)
{
    Shape s{{M.space()}};
    for (std::size_t j = 1; j < arity; ++j)
        s.factors.push_back(M.algebra()->space());
    return s;
}

/// m_k with m_k = 0 beyond the arity bound.
inline const GradedMap* module_op(const AInftyModule& M, std::size_t k)
{
    return k <= M.arity() ? &M.op(k) : nullptr;
}

/**
 * Left side of the module equation at N ≥ 2 on a basis tuple of M⊗A^{⊗N-1}:
 *
 *   d m_N + (-1)^{N+1} m_N D + Σ_{t=1}^{N-2} (-1)^{(N-t)t} m_{t+1}(m_{N-t}⊗id^t)
 *   + Σ_{r=1}^{N-2} (-1)^r m_{N-1}(id^r⊗μ⊗id^{N-2-r}).
 */
inline Expansion module_equation(const AInftyModule& M, std::size_t N, const std::vector<int>& t)
{
    const DGAlgebra& A = *M.algebra();
    const Shape X = module_shape(M, N);
    const Expansion x{{t, 1}};
    const GradedMap& d = M.op(1);
    Expansion res;
    const GradedMap& mN = M.op(N);
    accumulate(res, 1, expand_at(d, 0, expand_at(mN, 0, x, X), Shape{{M.space()}}));
    accumulate(res, (N + 1) % 2 == 0 ? 1 : -1, expand_at(mN, 0, koszul_differential(d, A.d(), x, X), X));
    for (std::size_t s = 1; s + 2 <= N; ++s) {
        const GradedMap& inner = M.op(N - s);
        const GradedMap& outer = M.op(s + 1);
        accumulate(res, ((N - s) * s) % 2 == 0 ? 1 : -1, expand_at(outer, 0, expand_at(inner, 0, x, X), replaced(X, 0, inner)));
    }
    for (std::size_t r = 1; r + 2 <= N; ++r)
        accumulate(res, r % 2 == 0 ? 1 : -1, expand_at(M.op(N - 1), 0, expand_at(A.mu(), r, x, X), replaced(X, r, A.mu())));
    return res;
}

/**
 * Left side of the morphism equation at N ≥ 1 on a basis tuple of M⊗A^{⊗N}, for g of degree m:
 *
 *   -(-1)^m d g_{N+1} + (-1)^N g_{N+1} D - Σ_{r=1}^{N} (-1)^{(N-r)r + m(r+1)} m^T_{r+1}(g_{N-r+1}⊗id^r)
 *   + Σ_{r=1}^{N} (-1)^{(N-r)(r+1)} g_{N-r+1}(m^S_{r+1}⊗id^{N-r}) + Σ_{r=1}^{N-1} (-1)^r g_N(id^r⊗μ⊗id^{N-1-r}).
 */
inline Expansion morphism_equation(const AInftyMorphism& g, std::size_t N, const std::vector<int>& t)
{
    const AInftyModule& S = *g.source();
    const AInftyModule& T = *g.target();
    const DGAlgebra& A = *S.algebra();
    const long m = g.shift();
    auto sign = [](long e) { return mpq_class(((e % 2) + 2) % 2 == 0 ? 1 : -1); };
    const Shape X = module_shape(S, N + 1);
    const Expansion x{{t, 1}};
    Expansion res;
    const GradedMap& gN1 = g.map(N + 1);
    accumulate(res, -sign(m), expand_at(T.op(1), 0, expand_at(gN1, 0, x, X), Shape{{T.space()}}));
    accumulate(res, sign(static_cast<long>(N)), expand_at(gN1, 0, koszul_differential(S.op(1), A.d(), x, X), X));
    for (std::size_t r = 1; r <= N; ++r) {
        const GradedMap& inner = g.map(N - r + 1);
        if (const GradedMap* outer = module_op(T, r + 1))
            accumulate(res, -sign(static_cast<long>((N - r) * r) + m * static_cast<long>(r + 1)),
                       expand_at(*outer, 0, expand_at(inner, 0, x, X), replaced(X, 0, inner)));
        if (const GradedMap* src = module_op(S, r + 1))
            accumulate(res, sign(static_cast<long>((N - r) * (r + 1))),
                       expand_at(g.map(N - r + 1), 0, expand_at(*src, 0, x, X), replaced(X, 0, *src)));
    }
    for (std::size_t r = 1; r + 1 <= N; ++r)
        accumulate(res, sign(static_cast<long>(r)), expand_at(g.map(N), 0, expand_at(A.mu(), r, x, X), replaced(X, r, A.mu())));
    return res;
}

/// Per-equation verdicts "N = 1", ..., "N = K" of a module by brute-force expansion.
inline std::vector<bool> module_verdicts(const AInftyModule& M)
{
    std::vector<bool> out;
    bool ok = true;
    for_each_tuple(module_shape(M, 1), [&](const std::vector<int>& t) {
        ok = ok && expand_at(M.op(1), 0, expand_at(M.op(1), 0, Expansion{{t, 1}}, {{M.space()}}), {{M.space()}}).empty();
    });
    out.push_back(ok);
    for (std::size_t N = 2; N <= M.arity(); ++N) {
        ok = true;
        for_each_tuple(module_shape(M, N), [&](const std::vector<int>& t) { ok = ok && module_equation(M, N, t).empty(); });
        out.push_back(ok);
    }
    return out;
}

/// Per-equation verdicts "N = 0", ..., "N = K-1" of a morphism by brute-force expansion.
inline std::vector<bool> morphism_verdicts(const AInftyMorphism& g)
{
    std::vector<bool> out;
    const AInftyModule& S = *g.source();
    const AInftyModule& T = *g.target();
    const mpq_class sm = g.shift() % 2 == 0 ? 1 : -1;
    bool ok = true;
    for_each_tuple(module_shape(S, 1), [&](const std::vector<int>& t) {
        Expansion x{{t, 1}};
        Expansion r = expand_at(g.map(1), 0, expand_at(S.op(1), 0, x, {{S.space()}}), {{S.space()}});
        accumulate(r, -sm, expand_at(T.op(1), 0, expand_at(g.map(1), 0, x, {{S.space()}}), {{T.space()}}));
        ok = ok && r.empty();
    });
    out.push_back(ok);
    for (std::size_t N = 1; N + 1 <= g.arity(); ++N) {
        ok = true;
        for_each_tuple(module_shape(S, N + 1), [&](const std::vector<int>& t) { ok = ok && morphism_equation(g, N, t).empty(); });
        out.push_back(ok);
    }
    return out;
}

} // namespace dgmorse::oracle

#endif // DGMORSE_TEST_ORACLE_HPP
