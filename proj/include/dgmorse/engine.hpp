#ifndef DGMORSE_ENGINE_HPP
#define DGMORSE_ENGINE_HPP

#include "dgmorse/complex.hpp"
#include "dgmorse/dga.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

/**
 * @file
 * Structure equations, composition, inversion and transfer for families of multilinear maps
 * over a strict DGA A, written once for both A∞-modules and path modules.
 *
 * An arity-k operation eats F⊗A^{⊗k-2}⊗L where the last factor L is A itself (modules) or a
 * left A-module P containing A (path modules). Its "fiber part" is the restriction to
 * F⊗A^{⊗k-1}, landing in F. Inner operations that never see the last factor use fiber parts;
 * operations that do see it use the full maps.
 */

namespace dgmorse::detail {

/// The algebra together with the last tensor factor and the left action on it.
struct Frame {
    const DGAlgebra* algebra = nullptr;
    SpacePtr last;
    const GradedMap* d_last = nullptr;
    const GradedMap* act_last = nullptr;  // A⊗L → L
};

/// Read-only view of a module-like family (m_k), k ≥ 2; m_1 is the pair of differentials.
struct ModuleView {
    SpacePtr total;
    SpacePtr fiber;
    const GradedMap* d_total = nullptr;
    const GradedMap* d_fiber = nullptr;
    std::vector<const GradedMap*> full;  // index k; null for absent or zero
    std::vector<const GradedMap*> fib;   // index k
    std::size_t arity = 1;

    const GradedMap* full_op(std::size_t k) const { return k < full.size() ? full[k] : nullptr; }
    const GradedMap* fib_op(std::size_t k) const { return k < fib.size() ? fib[k] : nullptr; }
};

/// Read-only view of a morphism-like family: f_1 on totals and fibers, f_k for k ≥ 2.
struct MorphismView {
    const GradedMap* first = nullptr;
    const GradedMap* first_fib = nullptr;
    std::vector<const GradedMap*> full;
    std::vector<const GradedMap*> fib;
    int shift = 0;
    std::size_t arity = 1;

    const GradedMap* full_op(std::size_t k) const { return k < full.size() ? full[k] : nullptr; }
    const GradedMap* fib_op(std::size_t k) const
    {
        if (k == 1)
            return first_fib;
        return k < fib.size() ? fib[k] : nullptr;
    }
};

/// F ⊗ A^{⊗n-2} ⊗ L, the source of an arity-n operation (n ≥ 2).
inline Factors full_factors(const Frame& fr, const SpacePtr& fiber, std::size_t n)
{
    Factors out{fiber};
    for (std::size_t i = 2; i < n; ++i)
        out.push_back(fr.algebra->space());
    out.push_back(fr.last);
    return out;
}

/// F ⊗ A^{⊗n-1}, the source of the fiber part of an arity-n operation.
inline Factors fiber_factors(const Frame& fr, const SpacePtr& fiber, std::size_t n)
{
    Factors out{fiber};
    for (std::size_t i = 1; i < n; ++i)
        out.push_back(fr.algebra->space());
    return out;
}

/// Koszul differential on F ⊗ A^{⊗n-2} ⊗ L.
inline Vec full_differential(const Frame& fr, const GradedMap& d_fiber, const Vec& x, const Factors& X)
{
    std::vector<const GradedMap*> diffs{&d_fiber};
    for (std::size_t i = 1; i + 1 < X.size(); ++i)
        diffs.push_back(&fr.algebra->d());
    diffs.push_back(fr.d_last);
    return tensor_differential(x, X, diffs);
}

/// Applies op at position 0 and returns the result with its factor list.
inline Vec apply_front(const GradedMap* op, const Vec& x, const Factors& X, Factors& out_factors)
{
    out_factors = replaced_factors(X, 0, *op);
    return apply_at(*op, 0, x, X);
}

/// Residual of the module equation at N ≥ 2, evaluated on x ∈ F⊗A^{⊗N-2}⊗L. Zero iff the equation holds.
inline Vec module_residual(const Frame& fr, const ModuleView& M, std::size_t N, const Vec& x)
{
    const Factors X = full_factors(fr, M.fiber, N);
    const Factors E{M.total};
    Vec res;
    Factors Y;
    if (const GradedMap* mN = M.full_op(N)) {
        axpy(res, Scalar(1), apply_at(*M.d_total, 0, apply_at(*mN, 0, x, X), E));
        axpy(res, Scalar(sign_of(static_cast<long>(N) + 1)), apply_at(*mN, 0, full_differential(fr, *M.d_fiber, x, X), X));
    }
    for (std::size_t t = 1; t + 2 <= N; ++t) {
        const GradedMap* inner = M.fib_op(N - t);
        const GradedMap* outer = M.full_op(t + 1);
        if (!inner || !outer)
            continue;
        Vec y = apply_front(inner, x, X, Y);
        axpy(res, Scalar(sign_of(static_cast<long>((N - t) * t))), apply_at(*outer, 0, y, Y));
    }
    if (const GradedMap* outer = M.full_op(N - 1))
        for (std::size_t r = 1; r + 2 <= N; ++r) {
            const GradedMap& mu = (r == N - 2) ? *fr.act_last : fr.algebra->mu();
            Vec y = apply_at(mu, r, x, X);
            axpy(res, Scalar(sign_of(static_cast<long>(r))), apply_at(*outer, 0, y, replaced_factors(X, r, mu)));
        }
    return res;
}

/**
 * Residual of the morphism equation at N ≥ 1 on x ∈ F1⊗A^{⊗N-1}⊗L:
 *
 *   -(-1)^m d g_{N+1} - Σ_r (-1)^{(N-r)r + m(r+1)} m^T_{r+1}(g_{N-r+1}⊗id^r)
 *   + Σ_r (-1)^{(N-r)(r+1)} g_{N-r+1}(m^S_{r+1}⊗id^{N-r}) + (-1)^N g_{N+1} D
 *   + Σ_{r=1}^{N-1} (-1)^r g_N(id^r⊗μ⊗id^{N-1-r}).
 *
 * For m = 0 this is the equation obtained by expanding the composite differential; the
 * (-1)^{m(r+1)} factor carries it over to morphisms of nonzero degree.
 */
inline Vec morphism_residual(const Frame& fr, const ModuleView& S, const ModuleView& T, const MorphismView& g,
                             std::size_t N, const Vec& x)
{
    const Factors X = full_factors(fr, S.fiber, N + 1);
    const int m = g.shift;
    Vec res;
    Factors Y;
    if (const GradedMap* gN1 = g.full_op(N + 1)) {
        axpy(res, Scalar(-sign_of(m)), apply_at(*T.d_total, 0, apply_at(*gN1, 0, x, X), {T.total}));
        axpy(res, Scalar(sign_of(static_cast<long>(N))), apply_at(*gN1, 0, full_differential(fr, *S.d_fiber, x, X), X));
    }
    for (std::size_t r = 1; r <= N; ++r) {
        const GradedMap* inner = g.fib_op(N - r + 1);
        const GradedMap* outer = T.full_op(r + 1);
        if (inner && outer) {
            Vec y = apply_front(inner, x, X, Y);
            long e = static_cast<long>((N - r) * r) + static_cast<long>(m) * static_cast<long>(r + 1);
            axpy(res, Scalar(-sign_of(e)), apply_at(*outer, 0, y, Y));
        }
        const GradedMap* src = (r < N) ? S.fib_op(r + 1) : S.full_op(N + 1);
        const GradedMap* out = (r < N) ? g.full_op(N - r + 1) : g.first;
        if (src && out) {
            Vec y = apply_front(src, x, X, Y);
            axpy(res, Scalar(sign_of(static_cast<long>((N - r) * (r + 1)))), apply_at(*out, 0, y, Y));
        }
    }
    if (const GradedMap* gN = (N >= 2) ? g.full_op(N) : nullptr)
        for (std::size_t r = 1; r + 1 <= N; ++r) {
            const GradedMap& mu = (r == N - 1) ? *fr.act_last : fr.algebra->mu();
            Vec y = apply_at(mu, r, x, X);
            axpy(res, Scalar(sign_of(static_cast<long>(r))), apply_at(*gN, 0, y, replaced_factors(X, r, mu)));
        }
    return res;
}

/// Runs fn on every basis tensor and reports the first nonzero result.
inline std::optional<Witness> first_nonzero(const Factors& X, const Factors& out,
                                            const std::function<Vec(const Vec&)>& fn)
{
    std::optional<Witness> w;
    for_each_key(X, [&](const Key& k) {
        if (w)
            return;
        Vec v = fn(unit_vec(k));
        if (!v.empty())
            w = Witness{key_degree(X, k), key_label(X, k), format_vec(out, v)};
    });
    return w;
}

inline Report verify_module_view(const Frame& fr, const ModuleView& M)
{
    Report r;
    r.subject = "module structure";
    auto w = nonzero_witness(compose(*M.d_total, *M.d_total));
    r.add("N = 1", !w, w);
    for (std::size_t N = 2; N <= M.arity; ++N) {
        Factors X = full_factors(fr, M.fiber, N);
        w = first_nonzero(X, {M.total}, [&](const Vec& x) { return module_residual(fr, M, N, x); });
        r.add("N = " + std::to_string(N), !w, w);
    }
    return r;
}

/// Checks the morphism equations for g_1, ..., g_K, i.e. N = 0, ..., K-1.
inline Report verify_morphism_view(const Frame& fr, const ModuleView& S, const ModuleView& T, const MorphismView& g)
{
    Report r;
    r.subject = "morphism";
    GradedMap chain = compose(*g.first, *S.d_total) - compose(*T.d_total, *g.first).scaled(sign_of(g.shift));
    auto w = nonzero_witness(chain);
    r.add("N = 0", !w, w);
    for (std::size_t N = 1; N + 1 <= g.arity; ++N) {
        Factors X = full_factors(fr, S.fiber, N + 1);
        w = first_nonzero(X, {T.total}, [&](const Vec& x) { return morphism_residual(fr, S, T, g, N, x); });
        r.add("N = " + std::to_string(N), !w, w);
    }
    return r;
}

/// Arity-k component (k ≥ 2) of the composite η∘ζ, as a full map F1⊗A^{⊗k-2}⊗L → E3.
inline GradedMap compose_component(const Frame& fr, const SpacePtr& fiber1, const SpacePtr& total3,
                                   const MorphismView& eta, const MorphismView& zeta, std::size_t k)
{
    const std::size_t N = k - 1;
    const Factors X = full_factors(fr, fiber1, k);
    return from_function(X, {total3}, eta.shift + zeta.shift + static_cast<int>(N), [&](const Key& key) {
        Vec x = unit_vec(key);
        Vec out;
        Factors Y;
        if (const GradedMap* z = zeta.full_op(N + 1))
            axpy(out, Scalar(1), apply_at(*eta.first, 0, apply_at(*z, 0, x, X), {z->target_space()}));
        for (std::size_t j = 1; j <= N; ++j) {
            const GradedMap* inner = zeta.fib_op(N - j + 1);
            const GradedMap* outer = eta.full_op(j + 1);
            if (!inner || !outer)
                continue;
            Vec y = apply_front(inner, x, X, Y);
            long e = static_cast<long>(j * (N - j)) + static_cast<long>(j) * zeta.shift;
            axpy(out, Scalar(sign_of(e)), apply_at(*outer, 0, y, Y));
        }
        return out;
    });
}

/**
 * Arity-(N+1) component of the inverse g of f, given g_1 = f_1^{-1} and the lower components of g:
 * g_{N+1} = -f_1^{-1} Σ_{j=1}^{N} (-1)^{j(N-j) + j·m_g} f_{j+1}(g_{N-j+1}⊗id^j).
 */
inline GradedMap inverse_component(const Frame& fr, const SpacePtr& fiber2, const SpacePtr& total1,
                                   const MorphismView& f, const MorphismView& g, std::size_t k)
{
    const std::size_t N = k - 1;
    const Factors X = full_factors(fr, fiber2, k);
    return from_function(X, {total1}, g.shift + static_cast<int>(N), [&](const Key& key) {
        Vec x = unit_vec(key);
        Vec acc;
        Factors Y;
        for (std::size_t j = 1; j <= N; ++j) {
            const GradedMap* inner = g.fib_op(N - j + 1);
            const GradedMap* outer = f.full_op(j + 1);
            if (!inner || !outer)
                continue;
            Vec y = apply_front(inner, x, X, Y);
            long e = static_cast<long>(j * (N - j)) + static_cast<long>(j) * g.shift;
            axpy(acc, Scalar(-sign_of(e)), apply_at(*outer, 0, y, Y));
        }
        return apply_at(*g.first, 0, acc, {f.first->target_space()});
    });
}

/// Output of a homotopy transfer, as plain map families indexed by arity.
struct TransferMaps {
    std::vector<GradedMap> m;  // index k ≥ 2: F'⊗A^{k-2}⊗L → E'
    std::vector<GradedMap> i;  // index k ≥ 2: F'⊗A^{k-2}⊗L → E
    std::vector<GradedMap> p;  // index k ≥ 2: F⊗A^{k-2}⊗L → E'
};

/**
 * Transfers a strict structure (μ_F on the fiber, μ_E = m_2 on the total) along retracts of the
 * total and of the fiber. With T_1 = i, T_j = hμ(T_{j-1}⊗id) and S_1 = h, S_j = hμ(S_{j-1}⊗id),
 * all built on the fiber:
 *
 *   m_k = -(-1)^{k(k-1)/2} p μ_E(T_{k-1}⊗id),  i_k = (-1)^{k(k-1)/2} h μ_E(T_{k-1}⊗id),
 *   p_k = (-1)^{(k-1)(k-2)/2} p μ_E(S_{k-1}⊗id).
 */
inline TransferMaps transfer(const Frame& fr, const GradedMap& mu_fiber, const GradedMap& mu_total,
                             const HomotopyRetract& RE, const HomotopyRetract& RF, std::size_t K)
{
    const SpacePtr& A = fr.algebra->space();
    const SpacePtr F = RF.big.space();
    const SpacePtr Fs = RF.small.space();
    const SpacePtr E = RE.big.space();
    std::vector<GradedMap> T(K + 1), S(K + 1);
    if (K >= 1) {
        T[1] = RF.i;
        S[1] = RF.h;
    }
    auto step = [&](const GradedMap& prev, const SpacePtr& src, std::size_t j) {
        Factors X{src};
        for (std::size_t t = 1; t < j; ++t)
            X.push_back(A);
        Factors Y{F, A};
        return from_function(X, {F}, prev.degree() + 1, [&](const Key& key) {
            Vec x = unit_vec(key);
            Vec y = apply_at(prev, 0, x, X);
            Vec z = apply_at(mu_fiber, 0, y, Y);
            return apply_at(RF.h, 0, z, {F});
        });
    };
    for (std::size_t j = 2; j + 1 <= K; ++j) {
        T[j] = step(T[j - 1], Fs, j);
        S[j] = step(S[j - 1], F, j);
    }
    auto last_step = [&](const GradedMap& prev, const SpacePtr& src, std::size_t k, const GradedMap& post, int sign) {
        Factors X = full_factors(fr, src, k);
        Factors Y{F, fr.last};
        return from_function(X, {post.target_space()}, prev.degree() + post.degree(), [&](const Key& key) {
            Vec y = apply_at(prev, 0, unit_vec(key), X);
            Vec z = apply_at(mu_total, 0, y, Y);
            Vec out = apply_at(post, 0, z, {E});
            if (sign < 0)
                for (auto& [kk, c] : out)
                    c = -c;
            return out;
        });
    };
    TransferMaps out;
    out.m.resize(K + 1);
    out.i.resize(K + 1);
    out.p.resize(K + 1);
    for (std::size_t k = 2; k <= K; ++k) {
        const long kk = static_cast<long>(k);
        out.m[k] = last_step(T[k - 1], Fs, k, RE.p, -sign_of(kk * (kk - 1) / 2));
        out.i[k] = last_step(T[k - 1], Fs, k, RE.h, sign_of(kk * (kk - 1) / 2));
        out.p[k] = last_step(S[k - 1], F, k, RE.p, sign_of((kk - 1) * (kk - 2) / 2));
    }
    return out;
}

} // namespace dgmorse::detail

#endif // DGMORSE_ENGINE_HPP
