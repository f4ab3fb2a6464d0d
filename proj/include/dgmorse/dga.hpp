#ifndef DGMORSE_DGA_HPP
#define DGMORSE_DGA_HPP

#include "dgmorse/complex.hpp"
#include "dgmorse/group.hpp"

#include <memory>
#include <string>
#include <vector>

namespace dgmorse {

/// Strict differential graded algebra (A, d, μ) with a unit basis element.
class DGAlgebra {
public:
    DGAlgebra() = default;

    /// Throws std::invalid_argument if any axiom fails.
    DGAlgebra(ChainComplex complex, GradedMap mu, std::size_t unit);

    /// Shape checks only; for deliberately broken fixtures.
    static DGAlgebra unchecked(ChainComplex complex, GradedMap mu, std::size_t unit)
    {
        DGAlgebra a;
        a.complex_ = std::move(complex);
        a.mu_ = std::move(mu);
        a.unit_ = unit;
        a.check_shape();
        return a;
    }

    const ChainComplex& complex() const { return complex_; }
    const SpacePtr& space() const { return complex_.space(); }
    const GradedMap& d() const { return complex_.differential(); }
    /// Product A⊗A → A as a map with two source factors.
    const GradedMap& mu() const { return mu_; }
    std::size_t unit() const { return unit_; }

    Vec multiply(const Vec& a, const Vec& b) const
    {
        Vec out;
        for (const auto& [ka, ca] : a)
            for (const auto& [kb, cb] : b)
                axpy(out, ca * cb, mu_.column(Key{ka[0], kb[0]}));
        return out;
    }

    Vec element(const std::string& label) const { return unit_vec(Key{static_cast<std::int32_t>(space()->index(label))}); }

private:
    void check_shape() const
    {
        const auto& A = complex_.space();
        if (mu_.degree() != 0 || mu_.source().size() != 2 || mu_.target().size() != 1 ||
            !same_space(mu_.source()[0], A) || !same_space(mu_.source()[1], A) || !same_space(mu_.target()[0], A))
            throw std::invalid_argument("product must be a degree 0 map A⊗A → A");
        if (unit_ >= A->dim() || A->degree(unit_) != 0)
            throw std::invalid_argument("unit must be a degree 0 basis element");
    }

    ChainComplex complex_;
    GradedMap mu_;
    std::size_t unit_ = 0;
};

using AlgebraPtr = std::shared_ptr<const DGAlgebra>;

/// Checks d² = 0, associativity, two-sided unit and the Leibniz rule on every basis tuple.
inline Report verify_dga(const DGAlgebra& A)
{
    Report r;
    r.subject = "dga";
    r.merge(verify_complex(A.complex()));
    const SpacePtr& S = A.space();
    const Factors three{S, S, S};
    const Factors two{S, S};
    const GradedMap& mu = A.mu();

    std::optional<Witness> assoc;
    for_each_key(three, [&](const Key& k) {
        if (assoc)
            return;
        Vec x = unit_vec(k);
        Vec left = apply_at(mu, 0, apply_at(mu, 0, x, three), two);
        Vec right = apply_at(mu, 0, apply_at(mu, 1, x, three), two);
        Vec diff = left;
        axpy(diff, Scalar(-1), right);
        if (!diff.empty())
            assoc = Witness{key_degree(three, k), key_label(three, k), format_vec({S}, diff)};
    });
    r.add("associativity", !assoc, assoc);

    std::optional<Witness> unit;
    const auto u = static_cast<std::int32_t>(A.unit());
    for (std::size_t i = 0; i < S->dim() && !unit; ++i) {
        const auto a = static_cast<std::int32_t>(i);
        Vec expected = unit_vec(Key{a});
        for (const Key& k : {Key{u, a}, Key{a, u}})
            if (mu.column(k) != expected && !unit)
                unit = Witness{key_degree(two, k), key_label(two, k), format_vec({S}, mu.column(k))};
    }
    r.add("unit", !unit, unit);

    std::optional<Witness> leibniz;
    const GradedMap& d = A.d();
    const std::vector<const GradedMap*> dd{&d, &d};
    for_each_key(two, [&](const Key& k) {
        if (leibniz)
            return;
        Vec x = unit_vec(k);
        Vec lhs = apply_at(d, 0, apply_at(mu, 0, x, two), {S});
        Vec rhs = apply_at(mu, 0, tensor_differential(x, two, dd), two);
        axpy(lhs, Scalar(-1), rhs);
        if (!lhs.empty())
            leibniz = Witness{key_degree(two, k), key_label(two, k), format_vec({S}, lhs)};
    });
    r.add("Leibniz rule", !leibniz, leibniz);
    return r;
}

inline DGAlgebra::DGAlgebra(ChainComplex complex, GradedMap mu, std::size_t unit)
    : complex_(std::move(complex)), mu_(std::move(mu)), unit_(unit)
{
    check_shape();
    Report r = verify_dga(*this);
    if (const Check* c = r.first_failure())
        throw std::invalid_argument("not a DGA: " + c->name + " fails" +
                                    (c->witness ? " at " + c->witness->tensor + ": " + c->witness->value : ""));
}

/// Group algebra ℝ[G] concentrated in degree 0.
inline DGAlgebra group_algebra(const FiniteGroup& G)
{
    std::vector<BasisElement> basis;
    for (const auto& l : G.labels())
        basis.push_back({0, l});
    auto S = make_space(basis);
    GradedMap mu(Factors{S, S}, Factors{S}, 0);
    for (std::size_t g = 0; g < G.order(); ++g)
        for (std::size_t h = 0; h < G.order(); ++h)
            mu.add_entry(Key{static_cast<std::int32_t>(g), static_cast<std::int32_t>(h)},
                         Key{static_cast<std::int32_t>(G.multiply(g, h))}, Scalar(1));
    return DGAlgebra(ChainComplex::zero(S), std::move(mu), G.identity());
}

/// ℝ[x]/(x^top) with |x| = degree and zero differential.
inline DGAlgebra truncated_polynomial(int degree, int top)
{
    if (top < 1)
        throw std::invalid_argument("truncation must keep the unit");
    std::vector<BasisElement> basis;
    for (int k = 0; k < top; ++k)
        basis.push_back({k * degree, k == 0 ? "1" : k == 1 ? "x" : "x^" + std::to_string(k)});
    auto S = make_space(basis);
    auto idx = [&](int k) { return static_cast<std::int32_t>(S->index(basis[static_cast<std::size_t>(k)].label)); };
    GradedMap mu(Factors{S, S}, Factors{S}, 0);
    for (int a = 0; a < top; ++a)
        for (int b = 0; a + b < top; ++b)
            mu.add_entry(Key{idx(a), idx(b)}, Key{idx(a + b)}, Scalar(1));
    return DGAlgebra(ChainComplex::zero(S), std::move(mu), static_cast<std::size_t>(idx(0)));
}

/// The acyclic algebra span{1, e} with |e| = 1, e² = 0 and de = 1.
inline DGAlgebra acyclic_algebra()
{
    auto S = make_space({{0, "1"}, {1, "e"}});
    GradedMap d(S, S, -1);
    d.add_entry(1, 0, Scalar(1));
    GradedMap mu(Factors{S, S}, Factors{S}, 0);
    mu.add_entry(Key{0, 0}, Key{0}, Scalar(1));
    mu.add_entry(Key{0, 1}, Key{1}, Scalar(1));
    mu.add_entry(Key{1, 0}, Key{1}, Scalar(1));
    return DGAlgebra(ChainComplex(S, d), std::move(mu), 0);
}

/// A ⊗ B with (a⊗b)(a'⊗b') = (-1)^{|b||a'|} aa'⊗bb'.
inline DGAlgebra tensor_algebra(const DGAlgebra& A, const DGAlgebra& B)
{
    ChainComplex C = tensor_complex(A.complex(), B.complex());
    const SpacePtr& S = C.space();
    const SpacePtr& SA = A.space();
    const SpacePtr& SB = B.space();
    GradedMap mu(Factors{S, S}, Factors{S}, 0);
    for (std::size_t x = 0; x < S->dim(); ++x)
        for (std::size_t y = 0; y < S->dim(); ++y) {
            const auto& px = S->parts(x);
            const auto& py = S->parts(y);
            Scalar sign = sign_of(SB->degree(px[1]) * SA->degree(py[0]));
            const Vec& ca = A.mu().column(Key{static_cast<std::int32_t>(px[0]), static_cast<std::int32_t>(py[0])});
            const Vec& cb = B.mu().column(Key{static_cast<std::int32_t>(px[1]), static_cast<std::int32_t>(py[1])});
            for (const auto& [ka, va] : ca)
                for (const auto& [kb, vb] : cb) {
                    auto t = S->find_parts({static_cast<std::uint32_t>(ka[0]), static_cast<std::uint32_t>(kb[0])});
                    mu.add_entry(Key{static_cast<std::int32_t>(x), static_cast<std::int32_t>(y)},
                                 Key{static_cast<std::int32_t>(*t)}, sign * va * vb);
                }
        }
    auto unit = S->find_parts({static_cast<std::uint32_t>(A.unit()), static_cast<std::uint32_t>(B.unit())});
    return DGAlgebra(C, std::move(mu), *unit);
}

} // namespace dgmorse

#endif // DGMORSE_DGA_HPP
