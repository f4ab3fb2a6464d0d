#ifndef DGMORSE_MORSE_HPP
#define DGMORSE_MORSE_HPP

#include "dgmorse/ainfty.hpp"
#include "dgmorse/group.hpp"
#include "dgmorse/linalg.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dgmorse {

/// Critical points with their Morse indices, as a graded space whose degree is the index.
inline SpacePtr critical_set(const std::vector<std::pair<std::string, int>>& points)
{
    std::set<std::string> seen;
    std::vector<BasisElement> basis;
    for (const auto& [label, index] : points) {
        if (index < 0)
            throw std::invalid_argument("critical point '" + label + "' has negative index");
        if (!seen.insert(label).second)
            throw std::invalid_argument("critical point '" + label + "' listed twice");
        basis.push_back({index, label});
    }
    return make_space(std::move(basis));
}

/**
 * Connection coefficients m_{x,y} ∈ A for pairs of critical points with |x| > |y|,
 * each homogeneous of degree |x| - |y| - 1. Missing entries are zero.
 */
class TwistingCocycle {
public:
    TwistingCocycle() = default;

    TwistingCocycle(AlgebraPtr algebra, SpacePtr crit) : algebra_(std::move(algebra)), crit_(std::move(crit))
    {
        if (!algebra_ || !crit_)
            throw std::invalid_argument("twisting cocycle needs an algebra and a critical set");
        std::set<std::string> labels;
        for (const auto& b : crit_->basis())
            if (!labels.insert(b.label).second)
                throw std::invalid_argument("critical point '" + b.label + "' listed twice");
    }

    const AlgebraPtr& algebra() const { return algebra_; }
    const SpacePtr& crit() const { return crit_; }
    int index(std::size_t x) const { return crit_->degree(x); }

    /// Sets m_{x,y}; throws std::invalid_argument on a degree mismatch.
    void set(std::size_t x, std::size_t y, Vec value)
    {
        const int want = index(x) - index(y) - 1;
        for (const auto& [k, c] : value) {
            if (index(x) <= index(y))
                throw std::invalid_argument("m_{" + crit_->label(x) + "," + crit_->label(y) +
                                            "} must vanish unless the first index is larger");
            int q = algebra_->space()->degree(static_cast<std::size_t>(k[0]));
            if (q != want)
                throw std::invalid_argument("m_{" + crit_->label(x) + "," + crit_->label(y) + "} must have degree " +
                                            std::to_string(want) + ", found a term of degree " + std::to_string(q));
        }
        if (value.empty())
            entries_.erase({x, y});
        else
            entries_[{x, y}] = std::move(value);
    }

    void set(const std::string& x, const std::string& y, Vec value) { set(crit_->index(x), crit_->index(y), std::move(value)); }

    const Vec& entry(std::size_t x, std::size_t y) const
    {
        static const Vec zero;
        auto it = entries_.find({x, y});
        return it == entries_.end() ? zero : it->second;
    }

    const std::map<std::pair<std::size_t, std::size_t>, Vec>& entries() const { return entries_; }
    bool is_zero() const { return entries_.empty(); }

    /// Number of factors in the longest nonzero product m_{z_0 z_1} ⊗ ... ⊗ m_{z_{k-1} z_k}.
    std::size_t longest_chain() const
    {
        const std::size_t n = crit_->dim();
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i)
            order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return index(a) < index(b); });
        std::vector<std::size_t> len(n, 0);
        std::size_t best = 0;
        for (std::size_t x : order) {
            for (const auto& [xy, v] : entries_)
                if (xy.first == x)
                    len[x] = std::max(len[x], len[xy.second] + 1);
            best = std::max(best, len[x]);
        }
        return best;
    }

    friend bool operator==(const TwistingCocycle& a, const TwistingCocycle& b)
    {
        return same_space(a.crit_, b.crit_) && same_space(a.algebra_->space(), b.algebra_->space()) &&
               a.entries_ == b.entries_;
    }

private:
    AlgebraPtr algebra_;
    SpacePtr crit_;
    std::map<std::pair<std::size_t, std::size_t>, Vec> entries_;
};

/// Checks d m_{x,y} = Σ_z (-1)^{|x|-|z|} m_{x,z} m_{z,y} for every pair; the witness names the pair (x, y).
inline Report verify_twisting_cocycle(const TwistingCocycle& T)
{
    Report r;
    r.subject = "twisting cocycle";
    const DGAlgebra& A = *T.algebra();
    const SpacePtr& C = T.crit();
    std::optional<Witness> witness;
    for (std::size_t x = 0; x < C->dim() && !witness; ++x)
        for (std::size_t y = 0; y < C->dim() && !witness; ++y) {
            if (T.index(x) <= T.index(y))
                continue;
            Vec res = A.d().apply(T.entry(x, y));
            for (std::size_t z = 0; z < C->dim(); ++z) {
                if (T.index(z) >= T.index(x) || T.index(z) <= T.index(y))
                    continue;
                axpy(res, Scalar(-sign_of(T.index(x) - T.index(z))), A.multiply(T.entry(x, z), T.entry(z, y)));
            }
            if (!res.empty())
                witness = Witness{T.index(x) - T.index(y) - 2, "(" + C->label(x) + ", " + C->label(y) + ")",
                                  format_vec({A.space()}, res)};
        }
    r.add("d m_{x,y} = Σ_z (-1)^{|x|-|z|} m_{x,z} m_{z,y}", !witness, witness);
    return r;
}

/// Lens-space cocycle on x_0, ..., x_top with m_{x_j,x_{j-1}} = g - 1 for odd j and the norm element for even j.
inline TwistingCocycle lens_cocycle(const FiniteGroup& G, const AlgebraPtr& A, int top, std::size_t generator = 1)
{
    if (top < 0)
        throw std::invalid_argument("lens cocycle needs a nonnegative top index");
    if (G.order() < 2 || generator >= G.order())
        throw std::invalid_argument("lens cocycle needs a nontrivial generator");
    std::vector<std::pair<std::string, int>> points;
    for (int j = 0; j <= top; ++j)
        points.push_back({"x" + std::to_string(j), j});
    TwistingCocycle T(A, critical_set(points));
    auto at = [&](std::size_t g) { return Key{static_cast<std::int32_t>(A->space()->index(0, G.label(g)))}; };
    Vec t;
    add_term(t, at(generator), Scalar(1));
    add_term(t, at(G.identity()), Scalar(-1));
    Vec norm;
    for (std::size_t g = 0; g < G.order(); ++g)
        add_term(norm, at(g), Scalar(1));
    for (int j = 1; j <= top; ++j)
        T.set(static_cast<std::size_t>(j), static_cast<std::size_t>(j - 1), j % 2 == 1 ? t : norm);
    return T;
}

/**
 * The complex 𝓕 ⊗ span(Crit) with d_F(α⊗x) = dα⊗x + (-1)^{|α|} Σ_y α·m_{x,y} ⊗ y.
 * Basis labels are "α|x".
 */
class EnrichedComplex {
public:
    EnrichedComplex() = default;

    EnrichedComplex(StrictModule fiber, TwistingCocycle cocycle, ChainComplex total)
        : fiber_(std::move(fiber)), cocycle_(std::move(cocycle)), total_(std::move(total))
    {
    }

    const StrictModule& fiber() const { return fiber_; }
    const TwistingCocycle& cocycle() const { return cocycle_; }
    const ChainComplex& complex() const { return total_; }
    const SpacePtr& space() const { return total_.space(); }

    /// Critical index p of basis element i.
    int filtration(std::size_t i) const { return cocycle_.crit()->degree(space()->parts(i)[1]); }

private:
    StrictModule fiber_;
    TwistingCocycle cocycle_;
    ChainComplex total_;
};

inline GradedMap enriched_differential(const StrictModule& F, const TwistingCocycle& T)
{
    SpacePtr S = tensor_product({F.space(), T.crit()});
    GradedMap d(S, S, -1);
    auto at = [&](std::size_t a, std::size_t x) {
        return static_cast<std::int32_t>(*S->find_parts({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(x)}));
    };
    for (std::size_t i = 0; i < S->dim(); ++i) {
        const std::size_t a = S->parts(i)[0];
        const std::size_t x = S->parts(i)[1];
        const Key col{static_cast<std::int32_t>(i)};
        for (const auto& [row, c] : F.d().column(Key{static_cast<std::int32_t>(a)}))
            d.add_entry(col, Key{at(static_cast<std::size_t>(row[0]), x)}, c);
        const Scalar sign = sign_of(F.space()->degree(a));
        for (const auto& [xy, m] : T.entries()) {
            if (xy.first != x)
                continue;
            for (const auto& [b, cb] : m)
                for (const auto& [row, c] : F.action().column(Key{static_cast<std::int32_t>(a), b[0]}))
                    d.add_entry(col, Key{at(static_cast<std::size_t>(row[0]), xy.second)}, sign * cb * c);
        }
    }
    return d;
}

/// Assembles d_F and checks d_F² = 0. Throws std::invalid_argument on mismatched algebras or d_F² ≠ 0.
inline EnrichedComplex build_enriched(const StrictModule& F, const TwistingCocycle& T)
{
    if (!same_space(F.algebra()->space(), T.algebra()->space()))
        throw std::invalid_argument("fiber module and cocycle live over different algebras");
    GradedMap d = enriched_differential(F, T);
    SpacePtr S = d.source_space();
    if (auto w = nonzero_witness(compose(d, d)))
        throw std::invalid_argument("d_F∘d_F != 0 at " + w->tensor + ": " + w->value +
                                    " (the cocycle identity or the module axioms fail)");
    return EnrichedComplex(F, T, ChainComplex(S, std::move(d)));
}

/**
 * η̃ = Σ_k (η_{k+1}⊗id)∘(id⊗𝒎̃^k), where 𝒎̃ appends m_{z,y} and passes the
 * fiber element and the earlier algebra factors with a Koszul sign.
 * Throws std::invalid_argument if the fibers or cocycles do not match, if the arity bound of η is
 * below the longest chain of the cocycle plus one, or if the result fails the chain-map contract.
 */
inline GradedMap induce_morphism(const AInftyMorphism& eta, const EnrichedComplex& E1, const EnrichedComplex& E2)
{
    if (!same_space(eta.source()->space(), E1.fiber().space()) || !same_space(eta.target()->space(), E2.fiber().space()))
        throw std::invalid_argument("morphism source and target must be the fibers of the enriched complexes");
    if (!(E1.cocycle() == E2.cocycle()))
        throw std::invalid_argument("enriched complexes must share the twisting cocycle");
    const TwistingCocycle& T = E1.cocycle();
    const std::size_t need = T.longest_chain() + 1;
    if (eta.arity() < need)
        throw std::invalid_argument("arity bound " + std::to_string(eta.arity()) + " is too small: the cocycle needs η_1, ..., η_" +
                                    std::to_string(need));
    const SpacePtr& S1 = E1.space();
    const SpacePtr& S2 = E2.space();
    const SpacePtr& F1 = E1.fiber().space();
    const SpacePtr& SA = T.algebra()->space();
    GradedMap out(S1, S2, eta.shift());
    for (std::size_t i = 0; i < S1->dim(); ++i) {
        const Key col{static_cast<std::int32_t>(i)};
        // level k: critical point z ↦ element of F1⊗A^{⊗k}
        std::map<std::size_t, Vec> level{{S1->parts(i)[1], unit_vec(Key{static_cast<std::int32_t>(S1->parts(i)[0])})}};
        for (std::size_t k = 0; !level.empty(); ++k) {
            Factors X{F1};
            for (std::size_t j = 0; j < k; ++j)
                X.push_back(SA);
            for (const auto& [z, v] : level)
                for (const auto& [row, c] : eta.map(k + 1).apply(v))
                    out.add_entry(col,
                                  Key{static_cast<std::int32_t>(*S2->find_parts(
                                      {static_cast<std::uint32_t>(row[0]), static_cast<std::uint32_t>(z)}))},
                                  c);
            std::map<std::size_t, Vec> next;
            for (const auto& [z, v] : level)
                for (const auto& [zy, m] : T.entries()) {
                    if (zy.first != z)
                        continue;
                    Vec& w = next[zy.second];
                    for (const auto& [key, c] : v) {
                        const Scalar sign = sign_of(key_degree(X, key));
                        for (const auto& [b, cb] : m) {
                            Key ext = key;
                            ext.push(b[0]);
                            add_term(w, ext, sign * c * cb);
                        }
                    }
                }
            for (auto it = next.begin(); it != next.end();)
                it = it->second.empty() ? next.erase(it) : std::next(it);
            level = std::move(next);
        }
    }
    if (const Check* c = verify_chain_map(out, E1.complex(), E2.complex()).first_failure())
        throw std::invalid_argument("induced map is not a chain map at " + c->witness->tensor + ": " + c->witness->value +
                                    " (is η a morphism of A∞-modules?)");
    return out;
}

/// Dimensions E^r_{p,q} and ranks of d^r: E^r_{p,q} → E^r_{p-r,q+r-1} for r = 0, ..., r_max, plus E^∞.
struct FiltrationPages {
    using Grid = std::map<std::pair<int, int>, std::size_t>;
    std::vector<Grid> dims;
    std::vector<Grid> ranks;
    Grid infinity;
    std::map<int, std::size_t> homology;

    /// dim E^r_{p,q}, zero outside the stored support.
    std::size_t dim(std::size_t r, int p, int q) const
    {
        const Grid& g = r < dims.size() ? dims.at(r) : infinity;
        auto it = g.find({p, q});
        return it == g.end() ? 0 : it->second;
    }

    std::size_t rank(std::size_t r, int p, int q) const
    {
        auto it = ranks.at(r).find({p, q});
        return it == ranks.at(r).end() ? 0 : it->second;
    }
};

namespace detail {

/// Exact linear algebra on the filtration F_p C_n = span{α⊗x : |x| ≤ p} of an enriched complex.
class FilteredComplex {
public:
    explicit FilteredComplex(const EnrichedComplex& E) : E_(E)
    {
        for (std::size_t i = 0; i < E.space()->dim(); ++i)
            levels_.insert(E.filtration(i));
    }

    const std::set<int>& levels() const { return levels_; }
    int lowest() const { return levels_.empty() ? 0 : *levels_.begin(); }
    int highest() const { return levels_.empty() ? 0 : *levels_.rbegin(); }

    /// Z^r_{p,n} = {c ∈ F_p C_n : dc ∈ F_{p-r} C_{n-1}}.
    std::vector<std::vector<Scalar>> cycles(int r, int p, int n) const
    {
        const auto& S = *E_.space();
        auto [b, e] = S.range(n);
        auto [tb, te] = S.range(n - 1);
        std::vector<std::size_t> cols, rows;
        for (std::size_t j = b; j < e; ++j)
            if (E_.filtration(j) <= p)
                cols.push_back(j);
        for (std::size_t i = tb; i < te; ++i)
            if (E_.filtration(i) > p - r)
                rows.push_back(i);
        Matrix m(rows.size(), cols.size());
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const Vec& v = E_.complex().differential().column(Key{static_cast<std::int32_t>(cols[c])});
            for (std::size_t rr = 0; rr < rows.size(); ++rr) {
                auto it = v.find(Key{static_cast<std::int32_t>(rows[rr])});
                if (it != v.end())
                    m(rr, c) = it->second;
            }
        }
        std::vector<std::vector<Scalar>> out;
        for (const auto& k : kernel_basis(m)) {
            std::vector<Scalar> full(e - b);
            for (std::size_t c = 0; c < cols.size(); ++c)
                full[cols[c] - b] = k[c];
            out.push_back(std::move(full));
        }
        return out;
    }

    /// d applied to vectors of C_n, as vectors of C_{n-1}.
    std::vector<std::vector<Scalar>> boundaries(const std::vector<std::vector<Scalar>>& vs, int n) const
    {
        Matrix d = block(E_.complex().differential(), n);
        std::vector<std::vector<Scalar>> out;
        for (const auto& v : vs) {
            std::vector<Scalar> w(d.rows());
            for (std::size_t i = 0; i < d.rows(); ++i)
                for (std::size_t j = 0; j < d.cols(); ++j)
                    if (sgn(d(i, j)) != 0 && sgn(v[j]) != 0)
                        w[i] += d(i, j) * v[j];
            out.push_back(std::move(w));
        }
        return out;
    }

    std::size_t span_dim(const std::vector<std::vector<Scalar>>& vs, int n) const
    {
        const std::size_t len = E_.space()->dim(n);
        Matrix m(len, vs.size());
        for (std::size_t j = 0; j < vs.size(); ++j)
            for (std::size_t i = 0; i < len; ++i)
                m(i, j) = vs[j][i];
        return rank(m);
    }

    /// Z^{r-1}_{p-1,n} + d Z^{r-1}_{p+r-1,n+1}, the subspace divided out of Z^r_{p,n}.
    std::vector<std::vector<Scalar>> denominator(int r, int p, int n) const
    {
        auto out = cycles(r - 1, p - 1, n);
        auto dz = boundaries(cycles(r - 1, p + r - 1, n + 1), n + 1);
        out.insert(out.end(), dz.begin(), dz.end());
        return out;
    }

    std::size_t page_dim(int r, int p, int n) const
    {
        return span_dim(cycles(r, p, n), n) - span_dim(denominator(r, p, n), n);
    }

    /// Rank of d^r on E^r_{p,n}: the image of Z^r_{p,n} modulo the denominator at (p - r, n - 1).
    std::size_t page_rank(int r, int p, int n) const
    {
        auto den = denominator(r, p - r, n - 1);
        auto img = boundaries(cycles(r, p, n), n);
        const std::size_t base = span_dim(den, n - 1);
        img.insert(img.end(), den.begin(), den.end());
        return span_dim(img, n - 1) - base;
    }

private:
    const EnrichedComplex& E_;
    std::set<int> levels_;
};

} // namespace detail

/**
 * Spectral sequence of the critical-index filtration, p = critical index and q = fiber degree.
 * E^0 is the associated graded 𝓕 ⊗ Crit with d^0 = d_𝓕 ⊗ id, so E^1_{p,q} = H_q(𝓕) ⊗ Crit_p and d^1 is
 * induced by the index-drop-one part of d_F.
 */
inline FiltrationPages spectral_sequence(const EnrichedComplex& E, std::size_t r_max)
{
    detail::FilteredComplex fc(E);
    FiltrationPages out;
    const auto& S = *E.space();
    const int stable = fc.highest() - fc.lowest() + 2;
    auto fill = [&](int r, FiltrationPages::Grid& dims, FiltrationPages::Grid* ranks) {
        for (int n : S.degrees())
            for (int p : fc.levels()) {
                std::size_t e = fc.page_dim(r, p, n);
                if (e != 0)
                    dims[{p, n - p}] = e;
                if (ranks && e != 0) {
                    std::size_t k = fc.page_rank(r, p, n);
                    if (k != 0)
                        (*ranks)[{p, n - p}] = k;
                }
            }
    };
    for (std::size_t r = 0; r <= r_max; ++r) {
        out.dims.emplace_back();
        out.ranks.emplace_back();
        fill(static_cast<int>(r), out.dims.back(), &out.ranks.back());
    }
    fill(std::max(stable, static_cast<int>(r_max) + 1), out.infinity, nullptr);
    out.homology = homology_dims(E.complex());
    return out;
}

/// Checks E^{r+1} = H(E^r, d^r) dimensionwise on every stored page and Σ_{p+q=n} dim E^∞_{p,q} = dim H_n.
inline Report verify_spectral_sequence(const FiltrationPages& pages)
{
    Report r;
    r.subject = "spectral sequence";
    std::set<std::pair<int, int>> support;
    for (const auto& g : pages.dims)
        for (const auto& [pq, e] : g)
            support.insert(pq);
    for (std::size_t k = 0; k + 1 < pages.dims.size(); ++k) {
        std::optional<Witness> w;
        const int rr = static_cast<int>(k);
        for (const auto& [p, q] : support) {
            long lhs = static_cast<long>(pages.dim(k + 1, p, q));
            long rhs = static_cast<long>(pages.dim(k, p, q)) - static_cast<long>(pages.rank(k, p, q)) -
                       static_cast<long>(pages.rank(k, p + rr, q - rr + 1));
            if (lhs != rhs && !w)
                w = Witness{p + q, "(" + std::to_string(p) + ", " + std::to_string(q) + ")",
                            "dim E^" + std::to_string(k + 1) + " = " + std::to_string(lhs) + ", homology of E^" +
                                std::to_string(k) + " has dimension " + std::to_string(rhs)};
        }
        r.add("E^" + std::to_string(k + 1) + " = H(E^" + std::to_string(k) + ", d^" + std::to_string(k) + ")", !w, w);
    }
    std::map<int, std::size_t> total;
    for (const auto& [pq, e] : pages.infinity)
        total[pq.first + pq.second] += e;
    std::optional<Witness> w;
    std::set<int> degrees;
    for (const auto& [n, e] : total)
        degrees.insert(n);
    for (const auto& [n, e] : pages.homology)
        degrees.insert(n);
    for (int n : degrees) {
        std::size_t a = total.count(n) ? total.at(n) : 0;
        std::size_t b = pages.homology.count(n) ? pages.homology.at(n) : 0;
        if (a != b && !w)
            w = Witness{n, "total degree " + std::to_string(n),
                        "Σ dim E^∞ = " + std::to_string(a) + ", dim H = " + std::to_string(b)};
    }
    r.add("Σ_{p+q=n} dim E^∞_{p,q} = dim H_n", !w, w);
    return r;
}

} // namespace dgmorse

#endif // DGMORSE_MORSE_HPP
