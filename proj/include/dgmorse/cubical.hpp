#ifndef DGMORSE_CUBICAL_HPP
#define DGMORSE_CUBICAL_HPP

#include "dgmorse/complex.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgmorse {

/**
 * A cube x∘π_D: the nondegenerate cell `cell` of dimension `base` precomposed with the projection
 * I^k → I^{k-|D|} forgetting the coordinates in D (1-based, sorted). It is degenerate iff D is nonempty.
 */
struct CubeRef {
    int base = 0;
    std::size_t cell = 0;
    std::vector<int> dummies;

    int dim() const { return base + static_cast<int>(dummies.size()); }
    bool degenerate() const { return !dummies.empty(); }

    friend bool operator==(const CubeRef&, const CubeRef&) = default;
    friend auto operator<=>(const CubeRef&, const CubeRef&) = default;
};

/**
 * Finite cubical set presented by its nondegenerate cubes and their faces ∂ᵢᵉ, 1 ≤ i ≤ k, ε ∈ {0, 1}.
 * Faces may be degenerate. Degeneracies sᵢ are free: every cube is uniquely x∘π_D.
 */
class CubicalSet {
public:
    using Faces = std::vector<std::array<CubeRef, 2>>;

    /// Adds a nondegenerate k-cube with faces[i-1][ε] = ∂ᵢᵉ. Throws on duplicate labels or wrong face dimensions.
    std::size_t add_cube(const std::string& label, int dim, Faces faces)
    {
        if (dim < 0)
            throw std::invalid_argument("cube '" + label + "' has negative dimension");
        if (index_.count(label))
            throw std::invalid_argument("cube '" + label + "' defined twice");
        if (static_cast<int>(faces.size()) != dim)
            throw std::invalid_argument("cube '" + label + "' needs " + std::to_string(dim) + " pairs of faces");
        for (const auto& pair : faces)
            for (const auto& f : pair) {
                if (f.dim() != dim - 1)
                    throw std::invalid_argument("face of '" + label + "' has the wrong dimension");
                if (f.base < 0 || static_cast<std::size_t>(f.base) >= labels_.size() || f.cell >= labels_[f.base].size())
                    throw std::invalid_argument("face of '" + label + "' refers to an unknown cube");
                for (std::size_t j = 0; j < f.dummies.size(); ++j)
                    if (f.dummies[j] < 1 || f.dummies[j] > f.dim() || (j && f.dummies[j] <= f.dummies[j - 1]))
                        throw std::invalid_argument("face of '" + label + "' has malformed degeneracy coordinates");
            }
        if (static_cast<std::size_t>(dim) >= labels_.size()) {
            labels_.resize(static_cast<std::size_t>(dim) + 1);
            faces_.resize(static_cast<std::size_t>(dim) + 1);
        }
        labels_[dim].push_back(label);
        faces_[dim].push_back(std::move(faces));
        const std::size_t cell = labels_[dim].size() - 1;
        index_[label] = {dim, cell};
        space_.reset();
        return cell;
    }

    int top_dim() const { return static_cast<int>(labels_.size()) - 1; }
    std::size_t count(int dim) const { return dim >= 0 && dim <= top_dim() ? labels_[dim].size() : 0; }
    const std::string& label(int dim, std::size_t cell) const { return labels_.at(dim).at(cell); }

    /// The nondegenerate cube with this label.
    CubeRef cube(const std::string& label) const
    {
        auto it = index_.find(label);
        if (it == index_.end())
            throw std::invalid_argument("unknown cube '" + label + "'");
        return {it->second.first, it->second.second, {}};
    }

    /// Degeneracy sᵢ, 1 ≤ i ≤ k+1: the new coordinate i is a dummy.
    CubeRef degeneracy(const CubeRef& c, int i) const
    {
        if (i < 1 || i > c.dim() + 1)
            throw std::out_of_range("degeneracy s_" + std::to_string(i) + " of a " + std::to_string(c.dim()) + "-cube");
        CubeRef out{c.base, c.cell, {}};
        for (int d : c.dummies)
            out.dummies.push_back(d < i ? d : d + 1);
        out.dummies.push_back(i);
        std::sort(out.dummies.begin(), out.dummies.end());
        return out;
    }

    /// Face ∂ᵢᵉ, 1 ≤ i ≤ k.
    CubeRef face(const CubeRef& c, int i, int eps) const
    {
        if (i < 1 || i > c.dim() || (eps != 0 && eps != 1))
            throw std::out_of_range("face " + std::to_string(i) + " of a " + std::to_string(c.dim()) + "-cube");
        std::vector<int> kept;
        int before = 0;
        bool dummy = false;
        for (int d : c.dummies) {
            if (d == i)
                dummy = true;
            else
                kept.push_back(d < i ? d : d - 1);
            before += d < i;
        }
        if (dummy)
            return {c.base, c.cell, kept};
        const CubeRef& y = faces_.at(c.base).at(c.cell).at(static_cast<std::size_t>(i - before - 1))[eps];
        // coordinates of I^{k-1} that survive the outer projection, in order
        std::vector<int> free;
        for (int r = 1; r <= c.dim() - 1; ++r)
            if (!std::binary_search(kept.begin(), kept.end(), r))
                free.push_back(r);
        for (int j : y.dummies)
            kept.push_back(free.at(static_cast<std::size_t>(j - 1)));
        std::sort(kept.begin(), kept.end());
        return {y.base, y.cell, kept};
    }

    /// Restriction to the subcube where the coordinates in `fixed` take the given values (each 0 or 1).
    CubeRef restrict(const CubeRef& c, const std::vector<std::pair<int, int>>& fixed) const
    {
        auto sorted = fixed;
        std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
        CubeRef out = c;
        for (const auto& [i, eps] : sorted)
            out = face(out, i, eps);
        return out;
    }

    /// Every cube of dimension k ≤ max_dim, nondegenerate ones first in each dimension.
    std::vector<CubeRef> all_cubes(int max_dim) const
    {
        std::vector<CubeRef> out;
        for (int k = 0; k <= max_dim; ++k)
            for (int m = std::min(k, top_dim()); m >= 0; --m)
                for (std::size_t cell = 0; cell < count(m); ++cell)
                    for (const auto& D : subsets(k, k - m))
                        out.push_back({m, cell, D});
        return out;
    }

    std::string describe(const CubeRef& c) const
    {
        std::string s = label(c.base, c.cell);
        // x∘π_D = s_{d_r}⋯s_{d_1}(x) for d_1 < ⋯ < d_r
        for (int d : c.dummies)
            s = "s" + std::to_string(d) + "(" + s + ")";
        return s;
    }

    /// Graded space of nondegenerate cubes, degree = dimension, basis in (dimension, insertion) order.
    const SpacePtr& chain_space() const
    {
        if (!space_) {
            std::vector<BasisElement> basis;
            for (int k = 0; k <= top_dim(); ++k)
                for (const auto& l : labels_[k])
                    basis.push_back({k, l});
            space_ = make_space(std::move(basis));
        }
        return space_;
    }

    /// Basis position of a nondegenerate cube in chain_space().
    std::int32_t position(const CubeRef& c) const
    {
        return static_cast<std::int32_t>(chain_space()->range(c.base).first + c.cell);
    }

private:
    static std::vector<std::vector<int>> subsets(int n, int r)
    {
        std::vector<std::vector<int>> out;
        if (r < 0 || r > n)
            return out;
        std::vector<int> cur;
        std::function<void(int)> rec = [&](int next) {
            if (static_cast<int>(cur.size()) == r) {
                out.push_back(cur);
                return;
            }
            for (int v = next; v <= n; ++v) {
                cur.push_back(v);
                rec(v + 1);
                cur.pop_back();
            }
        };
        rec(1);
        return out;
    }

    std::vector<std::vector<std::string>> labels_;
    std::vector<std::vector<Faces>> faces_;
    std::map<std::string, std::pair<int, std::size_t>> index_;
    mutable SpacePtr space_;
};

/**
 * Checks the cubical identities on every cube up to one dimension above the top:
 * ∂ᵢᵉ∂ⱼᵈ = ∂_{j-1}ᵈ∂ᵢᵉ (i < j), ∂ᵢᵉsⱼ = s_{j-1}∂ᵢᵉ (i < j), ∂ⱼᵉsⱼ = id, ∂ᵢᵉsⱼ = sⱼ∂_{i-1}ᵉ (i > j)
 * and sᵢsⱼ = s_{j+1}sᵢ (i ≤ j).
 */
inline Report verify_cubical_set(const CubicalSet& X)
{
    Report r;
    r.subject = "cubical set";
    std::optional<Witness> ff, fs, ss;
    auto fail = [&](std::optional<Witness>& w, const CubeRef& c, const std::string& what) {
        if (!w)
            w = Witness{c.dim(), X.describe(c), what};
    };
    for (const auto& c : X.all_cubes(X.top_dim() + 1)) {
        const int k = c.dim();
        for (int i = 1; i <= k; ++i)
            for (int j = i + 1; j <= k; ++j)
                for (int e = 0; e < 2; ++e)
                    for (int d = 0; d < 2; ++d)
                        if (!(X.face(X.face(c, j, d), i, e) == X.face(X.face(c, i, e), j - 1, d)))
                            fail(ff, c, "∂" + std::to_string(i) + "∂" + std::to_string(j));
        for (int j = 1; j <= k + 1; ++j) {
            CubeRef s = X.degeneracy(c, j);
            for (int i = 1; i <= k + 1; ++i)
                for (int e = 0; e < 2; ++e) {
                    CubeRef lhs = X.face(s, i, e);
                    CubeRef rhs = i < j ? X.degeneracy(X.face(c, i, e), j - 1) : i == j ? c : X.degeneracy(X.face(c, i - 1, e), j);
                    if (!(lhs == rhs))
                        fail(fs, c, "∂" + std::to_string(i) + "s" + std::to_string(j));
                }
            for (int i = 1; i <= j; ++i)
                if (!(X.degeneracy(X.degeneracy(c, j), i) == X.degeneracy(X.degeneracy(c, i), j + 1)))
                    fail(ss, c, "s" + std::to_string(i) + "s" + std::to_string(j));
        }
    }
    r.add("∂ᵢᵉ∂ⱼᵈ = ∂_{j-1}ᵈ∂ᵢᵉ for i < j", !ff, ff);
    r.add("face-degeneracy relations", !fs, fs);
    r.add("sᵢsⱼ = s_{j+1}sᵢ for i ≤ j", !ss, ss);
    return r;
}

/// The standard n-cube: k-cubes are words in {0, 1, *} with k stars, and ∂ᵢᵉ replaces the i-th star by ε.
inline CubicalSet standard_cube(int n)
{
    CubicalSet X;
    std::map<std::string, CubeRef> made;
    for (int k = 0; k <= n; ++k) {
        std::vector<std::string> words;
        for (int mask = 0; mask < (1 << n); ++mask)
            for (int bits = 0; bits < (1 << n); ++bits) {
                if (__builtin_popcount(static_cast<unsigned>(mask)) != k || (bits & mask))
                    continue;
                std::string w;
                for (int j = 0; j < n; ++j)
                    w += (mask >> j) & 1 ? '*' : (bits >> j) & 1 ? '1' : '0';
                words.push_back(w);
            }
        std::sort(words.begin(), words.end());
        words.erase(std::unique(words.begin(), words.end()), words.end());
        for (const auto& w : words) {
            CubicalSet::Faces faces;
            int star = 0;
            for (std::size_t j = 0; j < w.size(); ++j)
                if (w[j] == '*') {
                    ++star;
                    std::string lo = w, hi = w;
                    lo[j] = '0';
                    hi[j] = '1';
                    faces.push_back({made.at(lo), made.at(hi)});
                }
            std::size_t cell = X.add_cube(w, k, std::move(faces));
            made[w] = {k, cell, {}};
        }
    }
    return X;
}

/// Sⁿ with one vertex and one n-cube whose faces are all the degenerate vertex.
inline CubicalSet sphere(int n)
{
    if (n < 1)
        throw std::invalid_argument("sphere needs n >= 1");
    CubicalSet X;
    X.add_cube("pt", 0, {});
    CubeRef collapsed{0, 0, {}};
    for (int j = 1; j < n; ++j)
        collapsed.dummies.push_back(j);
    X.add_cube("e" + std::to_string(n), n, CubicalSet::Faces(static_cast<std::size_t>(n), {collapsed, collapsed}));
    return X;
}

/// Product cubical set: (x, y) has faces ∂ᵢx × y for i ≤ |x| and x × ∂_{i-|x|}y otherwise. Labels are "x×y".
inline CubicalSet product(const CubicalSet& X, const CubicalSet& Y)
{
    CubicalSet P;
    std::map<std::pair<std::pair<int, std::size_t>, std::pair<int, std::size_t>>, std::size_t> cell_of;
    auto pair_ref = [&](const CubeRef& a, const CubeRef& b) {
        // (x∘π_D) × (y∘π_E) = (x × y)∘π_{D ∪ (E + |a|)}
        std::vector<int> dummies = a.dummies;
        for (int e : b.dummies)
            dummies.push_back(e + a.dim());
        return CubeRef{a.base + b.base, cell_of.at({{a.base, a.cell}, {b.base, b.cell}}), dummies};
    };
    const int top = std::max(0, X.top_dim()) + std::max(0, Y.top_dim());
    for (int k = 0; k <= top; ++k)
        for (int p = 0; p <= k; ++p)
            for (std::size_t x = 0; x < X.count(p); ++x)
                for (std::size_t y = 0; y < Y.count(k - p); ++y) {
                    CubeRef a{p, x, {}}, b{k - p, y, {}};
                    CubicalSet::Faces faces;
                    for (int i = 1; i <= k; ++i) {
                        std::array<CubeRef, 2> f;
                        for (int e = 0; e < 2; ++e)
                            f[e] = i <= p ? pair_ref(X.face(a, i, e), b) : pair_ref(a, Y.face(b, i - p, e));
                        faces.push_back(f);
                    }
                    cell_of[{{p, x}, {k - p, y}}] = P.add_cube(X.label(p, x) + "×" + Y.label(k - p, y), k, std::move(faces));
                }
    return P;
}

inline CubicalSet torus()
{
    return product(sphere(1), sphere(1));
}

/// A single cube as a normalized chain: zero if degenerate.
inline Vec cube_chain(const CubicalSet& X, const CubeRef& c)
{
    return c.degenerate() ? Vec{} : unit_vec(Key{X.position(c)});
}

/// Σᵢ (-1)^{i-1}(∂ᵢ¹c - ∂ᵢ⁰c) for any cube, degenerate or not, with degenerate faces dropped.
inline Vec cubical_boundary(const CubicalSet& X, const CubeRef& c)
{
    Vec out;
    for (int i = 1; i <= c.dim(); ++i)
        for (int e = 0; e < 2; ++e)
            axpy(out, Scalar(sign_of(i - 1) * (e == 1 ? 1 : -1)), cube_chain(X, X.face(c, i, e)));
    return out;
}

/// d = Σᵢ (-1)^{i-1}(∂ᵢ¹ - ∂ᵢ⁰) on nondegenerate cubes; degenerate faces are dropped.
inline GradedMap cubical_boundary_map(const CubicalSet& X)
{
    const SpacePtr& S = X.chain_space();
    GradedMap d(S, S, -1);
    for (int k = 1; k <= X.top_dim(); ++k)
        for (std::size_t cell = 0; cell < X.count(k); ++cell) {
            CubeRef c{k, cell, {}};
            for (const auto& [row, x] : cubical_boundary(X, c))
                d.add_entry(Key{X.position(c)}, row, x);
        }
    return d;
}

/// Normalized cubical chains. Throws std::invalid_argument if d∘d ≠ 0, which signals a broken face table.
inline ChainComplex cubical_chains(const CubicalSet& X)
{
    return ChainComplex(X.chain_space(), cubical_boundary_map(X));
}

/// Boundary of a chain given on the nondegenerate cubes.
inline Vec cubical_boundary(const CubicalSet& X, const Vec& chain)
{
    return cubical_boundary_map(X).apply(chain);
}

/// a × b in C(X×Y), where X×Y = product(X, Y).
inline Vec cross_product(const CubicalSet& X, const CubicalSet& Y, const CubicalSet& XY, const Vec& a, const Vec& b)
{
    const auto& SX = *X.chain_space();
    const auto& SY = *Y.chain_space();
    Vec out;
    for (const auto& [ka, ca] : a)
        for (const auto& [kb, cb] : b) {
            const std::string label = SX.label(static_cast<std::size_t>(ka[0])) + "×" + SY.label(static_cast<std::size_t>(kb[0]));
            add_term(out, Key{XY.position(XY.cube(label))}, ca * cb);
        }
    return out;
}

/**
 * Serre diagonal Δ(σ) = Σ_{J⊔K = {1..n}} sgn(J,K) σ|_{I^J×{0}^K} ⊗ σ|_{{1}^J×I^K}, with
 * sgn(J,K) = (-1)^{#{(j,k) ∈ J×K : j > k}}; terms with a degenerate factor vanish.
 */
inline GradedMap serre_diagonal(const CubicalSet& X)
{
    const SpacePtr& S = X.chain_space();
    GradedMap delta(Factors{S}, Factors{S, S}, 0);
    for (int k = 0; k <= X.top_dim(); ++k)
        for (std::size_t cell = 0; cell < X.count(k); ++cell) {
            CubeRef c{k, cell, {}};
            for (int mask = 0; mask < (1 << k); ++mask) {
                std::vector<std::pair<int, int>> front, back;
                int inversions = 0;
                for (int j = 1; j <= k; ++j) {
                    bool inJ = (mask >> (j - 1)) & 1;
                    (inJ ? back : front).push_back({j, inJ ? 1 : 0});
                    if (inJ)
                        for (int l = 1; l < j; ++l)
                            inversions += !((mask >> (l - 1)) & 1);
                }
                CubeRef a = X.restrict(c, front);
                CubeRef b = X.restrict(c, back);
                if (a.degenerate() || b.degenerate())
                    continue;
                delta.add_entry(Key{X.position(c)}, Key{X.position(a), X.position(b)}, Scalar(sign_of(inversions)));
            }
        }
    return delta;
}

/// Augmentation ε: C_0 → ℝ sending every vertex to 1, as a map into the one-dimensional space {"1"}.
inline GradedMap augmentation(const CubicalSet& X)
{
    static const SpacePtr unit = make_space({{0, "1"}});
    GradedMap eps(X.chain_space(), unit, 0);
    for (std::size_t v = 0; v < X.count(0); ++v)
        eps.add_entry(Key{X.position({0, v, {}})}, Key{0}, Scalar(1));
    return eps;
}

/// Δ is a chain map, coassociative and counital, and d∘d = 0, all checked on every nondegenerate cube.
inline Report verify_serre_diagonal(const CubicalSet& X)
{
    Report r;
    r.subject = "Serre diagonal";
    const SpacePtr& S = X.chain_space();
    const GradedMap d = cubical_boundary_map(X);
    GradedMap delta = serre_diagonal(X);
    GradedMap eps = augmentation(X);
    std::optional<Witness> chain, coassoc, counit;
    const Factors SS{S, S};
    const Factors SSS{S, S, S};
    for (std::size_t i = 0; i < S->dim(); ++i) {
        const Vec x = unit_vec(Key{static_cast<std::int32_t>(i)});
        const int q = S->degree(i);
        Vec dx = delta.apply(x);
        Vec lhs = delta.apply(d.apply(x));
        Vec rhs = tensor_differential(dx, SS, {&d, &d});
        axpy(lhs, Scalar(-1), rhs);
        if (!lhs.empty() && !chain)
            chain = Witness{q, S->label(i), format_vec(SS, lhs)};
        Vec left = apply_at(delta, 0, dx, SS);
        Vec right = apply_at(delta, 1, dx, SS);
        axpy(left, Scalar(-1), right);
        if (!left.empty() && !coassoc)
            coassoc = Witness{q, S->label(i), format_vec(SSS, left)};
        Vec l = apply_at(eps, 0, dx, SS);
        Vec rr = apply_at(eps, 1, dx, SS);
        Vec lres, rres;
        for (const auto& [k, c] : l)
            add_term(lres, Key{k[1]}, c);
        for (const auto& [k, c] : rr)
            add_term(rres, Key{k[0]}, c);
        axpy(lres, Scalar(-1), x);
        axpy(rres, Scalar(-1), x);
        if ((!lres.empty() || !rres.empty()) && !counit)
            counit = Witness{q, S->label(i), format_vec({S}, lres.empty() ? rres : lres)};
    }
    auto dd = nonzero_witness(compose(d, d));
    r.add("d∘d = 0", !dd, dd);
    r.add("Δ∘d = (d⊗1 + 1⊗d)∘Δ", !chain, chain);
    r.add("(Δ⊗1)Δ = (1⊗Δ)Δ", !coassoc, coassoc);
    r.add("(ε⊗1)Δ = id = (1⊗ε)Δ", !counit, counit);
    return r;
}

} // namespace dgmorse

#endif // DGMORSE_CUBICAL_HPP
