#ifndef DGMORSE_COMPLEX_HPP
#define DGMORSE_COMPLEX_HPP

#include "dgmorse/graded_map.hpp"
#include "dgmorse/linalg.hpp"
#include "dgmorse/report.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgmorse {

/// First nonzero column of a map, rendered as a witness.
inline std::optional<Witness> nonzero_witness(const GradedMap& m)
{
    if (m.is_zero())
        return std::nullopt;
    const auto& [k, v] = *m.columns().begin();
    return Witness{key_degree(m.source(), k), key_label(m.source(), k), format_vec(m.target(), v)};
}

/// Chain complex (C, d) with d of degree -1.
class ChainComplex {
public:
    ChainComplex() = default;

    ChainComplex(SpacePtr space, GradedMap d) : space_(std::move(space)), d_(std::move(d))
    {
        check_shape();
        auto w = nonzero_witness(compose(d_, d_));
        if (w)
            throw std::invalid_argument("d∘d != 0 at " + w->tensor + " (degree " + std::to_string(w->degree) +
                                        "): " + w->value);
    }

    /// Skips the d∘d check, for building deliberately broken fixtures.
    static ChainComplex unchecked(SpacePtr space, GradedMap d)
    {
        ChainComplex c;
        c.space_ = std::move(space);
        c.d_ = std::move(d);
        c.check_shape();
        return c;
    }

    static ChainComplex zero(SpacePtr space)
    {
        GradedMap d(space, space, -1);
        return ChainComplex(std::move(space), std::move(d));
    }

    const SpacePtr& space() const { return space_; }
    const GradedMap& differential() const { return d_; }

private:
    void check_shape() const
    {
        if (!space_)
            throw std::invalid_argument("chain complex without a carrier space");
        if (d_.degree() != -1 || d_.source_arity() != 1 || !same_space(d_.source_space(), space_) ||
            !same_space(d_.target_space(), space_))
            throw std::invalid_argument("differential must be a degree -1 endomorphism of the carrier");
    }

    SpacePtr space_;
    GradedMap d_;
};

inline Report verify_complex(const ChainComplex& c)
{
    Report r;
    r.subject = "complex";
    auto w = nonzero_witness(compose(c.differential(), c.differential()));
    r.add("d∘d = 0", !w, w);
    return r;
}

/// Σ^k C: degrees raised by k, differential (-1)^k d.
inline ChainComplex shift(const ChainComplex& c, int k)
{
    SpacePtr s = shifted_space(c.space(), k);
    GradedMap d(s, s, -1);
    const Scalar sign = sign_of(k);
    for (const auto& [col, v] : c.differential().columns())
        for (const auto& [row, x] : v)
            d.add_entry(col, row, sign * x);
    return ChainComplex(s, std::move(d));
}

/// Checks f∘d_source = (-1)^{|f|} d_target∘f.
inline Report verify_chain_map(const GradedMap& f, const ChainComplex& source, const ChainComplex& target)
{
    Report r;
    r.subject = "chain map";
    GradedMap lhs = compose(f, source.differential());
    GradedMap rhs = compose(target.differential(), f).scaled(sign_of(f.degree()));
    auto w = nonzero_witness(lhs - rhs);
    r.add("f∘d = (-1)^|f| d∘f", !w, w);
    return r;
}

/// Data (i, p, h) exhibiting `small` as a homotopy retract of `big`.
struct HomotopyRetract {
    ChainComplex big;
    ChainComplex small;
    GradedMap i;
    GradedMap p;
    GradedMap h;
};

/// Checks the retract identities, with the side conditions h∘h = 0, h∘i = 0, p∘h = 0 as separate checks.
inline Report verify_retract(const HomotopyRetract& R)
{
    Report r;
    r.subject = "homotopy retract";
    r.merge(verify_chain_map(R.i, R.small, R.big), "i: ");
    r.merge(verify_chain_map(R.p, R.big, R.small), "p: ");
    const auto& d = R.big.differential();
    GradedMap homotopy = compose(d, R.h) + compose(R.h, d);
    GradedMap expected = identity_map(R.big.space()) - compose(R.i, R.p);
    auto w = nonzero_witness(homotopy - expected);
    r.add("dh + hd = id - ip", !w, w);
    w = nonzero_witness(compose(R.p, R.i) - identity_map(R.small.space()));
    r.add("pi = id", !w, w);
    w = nonzero_witness(compose(R.h, R.h));
    r.add("hh = 0", !w, w);
    w = nonzero_witness(compose(R.h, R.i));
    r.add("hi = 0", !w, w);
    w = nonzero_witness(compose(R.p, R.h));
    r.add("ph = 0", !w, w);
    return r;
}

inline HomotopyRetract identity_retract(const ChainComplex& c)
{
    return {c, c, identity_map(c.space()), identity_map(c.space()), GradedMap(c.space(), c.space(), 1)};
}

/**
 * Retract onto homology. Each C_q splits as B_q ⊕ H_q ⊕ A_q where A_q is spanned by the basis
 * elements whose boundaries are independent (chosen greedily in basis order), B_q is spanned by
 * their images from degree q+1, and H_q by kernel vectors completing B_q to a basis of the cycles.
 * Then h = (d|_A)^{-1} on B and 0 on H ⊕ A.
 *
 * A homology class is labeled by the basis element whose coefficient is 1 in its representative.
 */
inline HomotopyRetract retract_to_homology(const ChainComplex& c)
{
    const auto& space = *c.space();
    const auto& d = c.differential();
    const auto& degrees = space.degrees();

    struct Split {
        std::vector<std::vector<Scalar>> boundaries;   // B_q, dense in C_q
        std::vector<std::size_t> boundary_sources;     // basis index in C_{q+1} whose image is boundaries[j]
        std::vector<std::vector<Scalar>> cycles;       // H_q representatives
        std::vector<std::size_t> cycle_labels;         // basis index naming each class
        std::vector<std::size_t> pivots;               // A_q as basis indices
    };
    std::map<int, Split> split;

    for (int q : degrees) {
        Matrix dq = block(d, q);
        std::vector<std::vector<Scalar>> cols;
        for (std::size_t j = 0; j < dq.cols(); ++j)
            cols.push_back(dq.column(j));
        auto chosen = independent_subset(cols, dq.rows());
        auto s0 = space.range(q).first;
        for (auto j : chosen) {
            split[q].pivots.push_back(s0 + j);
            split[q - 1].boundaries.push_back(cols[j]);
            split[q - 1].boundary_sources.push_back(s0 + j);
        }
    }
    for (int q : degrees) {
        Matrix dq = block(d, q);
        Split& s = split[q];
        auto kernel = kernel_basis(dq);
        Echelon e = row_reduce(dq);
        std::vector<bool> is_pivot(dq.cols(), false);
        for (auto col : e.pivot_columns)
            is_pivot[col] = true;
        std::vector<std::size_t> free_cols;
        for (std::size_t j = 0; j < dq.cols(); ++j)
            if (!is_pivot[j])
                free_cols.push_back(j);
        std::vector<std::vector<Scalar>> all = s.boundaries;
        all.insert(all.end(), kernel.begin(), kernel.end());
        auto chosen = independent_subset(all, dq.cols());
        auto s0 = space.range(q).first;
        for (auto idx : chosen)
            if (idx >= s.boundaries.size()) {
                s.cycles.push_back(kernel[idx - s.boundaries.size()]);
                s.cycle_labels.push_back(s0 + free_cols[idx - s.boundaries.size()]);
            }
    }

    std::vector<BasisElement> hbasis;
    std::map<int, std::size_t> hstart;
    for (int q : degrees) {
        hstart[q] = hbasis.size();
        for (auto l : split[q].cycle_labels)
            hbasis.push_back({q, space.label(l)});
    }
    SpacePtr H = make_space(hbasis, degrees);
    GradedMap i(H, c.space(), 0), p(c.space(), H, 0), h(c.space(), c.space(), 1);

    for (int q : degrees) {
        const Split& s = split[q];
        auto [b0, b1] = space.range(q);
        const std::size_t n = b1 - b0;
        for (std::size_t j = 0; j < s.cycles.size(); ++j)
            for (std::size_t t = 0; t < n; ++t)
                if (sgn(s.cycles[j][t]) != 0)
                    i.add_entry(hstart[q] + j, b0 + t, s.cycles[j][t]);
        if (n == 0)
            continue;
        std::vector<std::vector<Scalar>> basis = s.boundaries;
        basis.insert(basis.end(), s.cycles.begin(), s.cycles.end());
        for (auto a : s.pivots) {
            std::vector<Scalar> e(n);
            e[a - b0] = 1;
            basis.push_back(std::move(e));
        }
        auto T = inverse(Matrix::from_columns(basis, n));
        if (!T)
            throw std::logic_error("homology splitting failed in degree " + std::to_string(q));
        const std::size_t nb = s.boundaries.size();
        const std::size_t nh = s.cycles.size();
        for (std::size_t t = 0; t < n; ++t) {
            for (std::size_t j = 0; j < nh; ++j)
                if (sgn((*T)(nb + j, t)) != 0)
                    p.add_entry(b0 + t, hstart[q] + j, (*T)(nb + j, t));
            for (std::size_t j = 0; j < nb; ++j)
                if (sgn((*T)(j, t)) != 0)
                    h.add_entry(b0 + t, s.boundary_sources[j], (*T)(j, t));
        }
    }
    return {c, ChainComplex::zero(H), std::move(i), std::move(p), std::move(h)};
}

/// Homology with explicit cycle representatives (the inclusion of the retract onto homology).
struct Homology {
    SpacePtr space;
    GradedMap representatives;
};

inline Homology homology(const ChainComplex& c)
{
    auto R = retract_to_homology(c);
    return {R.small.space(), R.i};
}

inline std::map<int, std::size_t> homology_dims(const ChainComplex& c)
{
    std::map<int, std::size_t> dims;
    auto H = homology(c).space;
    for (int q : c.space()->degrees())
        dims[q] = H->dim(q);
    return dims;
}

/// C ⊗ D with the Koszul differential d⊗1 + 1⊗d, on the flattened tensor space.
inline ChainComplex tensor_complex(const ChainComplex& a, const ChainComplex& b)
{
    SpacePtr s = tensor_spaces(a.space(), b.space());
    GradedMap d = tensor_maps_factored(a.differential(), identity_map(b.space())) +
                  tensor_maps_factored(identity_map(a.space()), b.differential());
    return ChainComplex(s, flatten(d, s, s));
}

/// Tensor product of retracts: i⊗i, p⊗p, h⊗1 + ip⊗h.
inline HomotopyRetract tensor_retract(const HomotopyRetract& r1, const HomotopyRetract& r2)
{
    ChainComplex big = tensor_complex(r1.big, r2.big);
    ChainComplex small = tensor_complex(r1.small, r2.small);
    auto i = flatten(tensor_maps_factored(r1.i, r2.i), small.space(), big.space());
    auto p = flatten(tensor_maps_factored(r1.p, r2.p), big.space(), small.space());
    GradedMap hf = tensor_maps_factored(r1.h, identity_map(r2.big.space())) +
                   tensor_maps_factored(compose(r1.i, r1.p), r2.h);
    auto h = flatten(hf, big.space(), big.space());
    return {big, small, std::move(i), std::move(p), std::move(h)};
}

} // namespace dgmorse

#endif // DGMORSE_COMPLEX_HPP
