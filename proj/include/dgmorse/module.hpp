#ifndef DGMORSE_MODULE_HPP
#define DGMORSE_MODULE_HPP

#include "dgmorse/dga.hpp"

#include <memory>
#include <string>
#include <vector>

namespace dgmorse {

/// Strict right module (M, d) over a DGA with action M⊗A → M.
class StrictModule {
public:
    StrictModule() = default;

    /// Throws std::invalid_argument if an axiom fails.
    StrictModule(AlgebraPtr algebra, ChainComplex complex, GradedMap action);

    static StrictModule unchecked(AlgebraPtr algebra, ChainComplex complex, GradedMap action)
    {
        StrictModule m;
        m.algebra_ = std::move(algebra);
        m.complex_ = std::move(complex);
        m.action_ = std::move(action);
        m.check_shape();
        return m;
    }

    const AlgebraPtr& algebra() const { return algebra_; }
    const ChainComplex& complex() const { return complex_; }
    const SpacePtr& space() const { return complex_.space(); }
    const GradedMap& d() const { return complex_.differential(); }
    const GradedMap& action() const { return action_; }

private:
    void check_shape() const
    {
        if (!algebra_)
            throw std::invalid_argument("module without an algebra");
        const SpacePtr& M = complex_.space();
        const SpacePtr& A = algebra_->space();
        if (action_.degree() != 0 || action_.source().size() != 2 || action_.target().size() != 1 ||
            !same_space(action_.source()[0], M) || !same_space(action_.source()[1], A) ||
            !same_space(action_.target()[0], M))
            throw std::invalid_argument("action must be a degree 0 map M⊗A → M");
    }

    AlgebraPtr algebra_;
    ChainComplex complex_;
    GradedMap action_;
};

/// Checks d² = 0, (xa)b = x(ab), x·1 = x and d(xa) = (dx)a + (-1)^{|x|} x(da).
inline Report verify_module(const StrictModule& M)
{
    Report r;
    r.subject = "strict module";
    r.merge(verify_complex(M.complex()));
    const DGAlgebra& A = *M.algebra();
    const SpacePtr& S = M.space();
    const SpacePtr& SA = A.space();
    const Factors three{S, SA, SA};
    const Factors two{S, SA};
    const GradedMap& act = M.action();

    std::optional<Witness> assoc;
    for_each_key(three, [&](const Key& k) {
        if (assoc)
            return;
        Vec x = unit_vec(k);
        Vec left = apply_at(act, 0, apply_at(act, 0, x, three), two);
        Vec right = apply_at(act, 0, apply_at(A.mu(), 1, x, three), two);
        axpy(left, Scalar(-1), right);
        if (!left.empty())
            assoc = Witness{key_degree(three, k), key_label(three, k), format_vec({S}, left)};
    });
    r.add("associativity", !assoc, assoc);

    std::optional<Witness> unit;
    for (std::size_t i = 0; i < S->dim() && !unit; ++i) {
        Key k{static_cast<std::int32_t>(i), static_cast<std::int32_t>(A.unit())};
        if (act.column(k) != unit_vec(Key{static_cast<std::int32_t>(i)}))
            unit = Witness{key_degree(two, k), key_label(two, k), format_vec({S}, act.column(k))};
    }
    r.add("unit", !unit, unit);

    std::optional<Witness> leibniz;
    const std::vector<const GradedMap*> dd{&M.d(), &A.d()};
    for_each_key(two, [&](const Key& k) {
        if (leibniz)
            return;
        Vec x = unit_vec(k);
        Vec lhs = apply_at(M.d(), 0, apply_at(act, 0, x, two), {S});
        axpy(lhs, Scalar(-1), apply_at(act, 0, tensor_differential(x, two, dd), two));
        if (!lhs.empty())
            leibniz = Witness{key_degree(two, k), key_label(two, k), format_vec({S}, lhs)};
    });
    r.add("Leibniz rule", !leibniz, leibniz);
    return r;
}

inline StrictModule::StrictModule(AlgebraPtr algebra, ChainComplex complex, GradedMap action)
    : algebra_(std::move(algebra)), complex_(std::move(complex)), action_(std::move(action))
{
    check_shape();
    Report r = verify_module(*this);
    if (const Check* c = r.first_failure())
        throw std::invalid_argument("not a module: " + c->name + " fails" +
                                    (c->witness ? " at " + c->witness->tensor + ": " + c->witness->value : ""));
}

/// A acting on itself by right multiplication.
inline StrictModule regular_module(const AlgebraPtr& A)
{
    return StrictModule(A, A->complex(), A->mu());
}

/**
 * One-dimensional module in degree 0 where every degree 0 basis element acts as 1 and
 * everything else as 0. For a group algebra this is the trivial representation.
 */
inline StrictModule trivial_module(const AlgebraPtr& A)
{
    auto S = make_space({{0, "1"}});
    GradedMap act(Factors{S, A->space()}, Factors{S}, 0);
    auto [b, e] = A->space()->range(0);
    for (std::size_t a = b; a < e; ++a)
        act.add_entry(Key{0, static_cast<std::int32_t>(a)}, Key{0}, Scalar(1));
    return StrictModule(A, ChainComplex::zero(S), std::move(act));
}

/// Free module V⊗A on a complex of generators, with d(v⊗a) = dv⊗a + (-1)^{|v|} v⊗da.
inline StrictModule free_module(const AlgebraPtr& A, const ChainComplex& V)
{
    ChainComplex C = tensor_complex(V, A->complex());
    const SpacePtr& S = C.space();
    GradedMap act(Factors{S, A->space()}, Factors{S}, 0);
    for (std::size_t x = 0; x < S->dim(); ++x) {
        const auto& px = S->parts(x);
        for (std::size_t b = 0; b < A->space()->dim(); ++b)
            for (const auto& [k, c] : A->mu().column(Key{static_cast<std::int32_t>(px[1]), static_cast<std::int32_t>(b)})) {
                auto t = S->find_parts({px[0], static_cast<std::uint32_t>(k[0])});
                act.add_entry(Key{static_cast<std::int32_t>(x), static_cast<std::int32_t>(b)},
                              Key{static_cast<std::int32_t>(*t)}, c);
            }
    }
    return StrictModule(A, std::move(C), std::move(act));
}

/**
 * Semifree module on generators w_0, ..., w_r with d(w_j⊗a) = w_{j-1}⊗t_j a + (-1)^{|w_j|} w_j⊗da.
 * The t_j must be cycles with t_{j-1}t_j = 0; |w_0| = start and |w_j| = |w_{j-1}| + |t_j| + 1.
 */
inline StrictModule chain_module(const AlgebraPtr& A, const std::vector<Vec>& t, int start)
{
    const SpacePtr& SA = A->space();
    std::vector<BasisElement> gens{{start, "w0"}};
    for (std::size_t j = 0; j < t.size(); ++j) {
        if (t[j].empty())
            throw std::invalid_argument("chain module needs nonzero connecting elements");
        int q = SA->degree(static_cast<std::size_t>(t[j].begin()->first[0]));
        gens.push_back({gens.back().degree + q + 1, "w" + std::to_string(j + 1)});
    }
    auto V = make_space(gens);
    StrictModule F = free_module(A, ChainComplex::zero(V));
    const SpacePtr& S = F.space();
    GradedMap d = F.d();
    for (std::size_t j = 1; j < gens.size(); ++j) {
        auto wj = static_cast<std::uint32_t>(V->index(gens[j].degree, gens[j].label));
        auto wp = static_cast<std::uint32_t>(V->index(gens[j - 1].degree, gens[j - 1].label));
        for (std::size_t a = 0; a < SA->dim(); ++a) {
            Vec ta = A->multiply(t[j - 1], unit_vec(Key{static_cast<std::int32_t>(a)}));
            auto col = static_cast<std::int32_t>(*S->find_parts({wj, static_cast<std::uint32_t>(a)}));
            for (const auto& [k, c] : ta)
                d.add_entry(Key{col}, Key{static_cast<std::int32_t>(*S->find_parts({wp, static_cast<std::uint32_t>(k[0])}))}, c);
        }
    }
    return StrictModule(A, ChainComplex(S, std::move(d)), F.action());
}

/**
 * Transports the differential along an A-linear automorphism φ of the carrier:
 * the result has differential φ^{-1} d φ and the same action.
 */
inline StrictModule conjugate_module(const StrictModule& M, const GradedMap& phi)
{
    GradedMap d = compose(invert_map(phi), compose(M.d(), phi));
    return StrictModule(M.algebra(), ChainComplex(M.space(), std::move(d)), M.action());
}

/// M ⊕ N with labels kept when disjoint, otherwise prefixed by "1:" and "2:".
inline StrictModule direct_sum(const StrictModule& M, const StrictModule& N)
{
    const SpacePtr& A = M.algebra()->space();
    bool clash = false;
    for (const auto& b : N.space()->basis())
        clash = clash || M.space()->find(b.degree, b.label).has_value();
    std::vector<BasisElement> basis;
    for (const auto& b : M.space()->basis())
        basis.push_back({b.degree, clash ? "1:" + b.label : b.label});
    for (const auto& b : N.space()->basis())
        basis.push_back({b.degree, clash ? "2:" + b.label : b.label});
    std::vector<int> degrees = M.space()->degrees();
    degrees.insert(degrees.end(), N.space()->degrees().begin(), N.space()->degrees().end());
    auto S = make_space(basis, degrees);
    const std::size_t offset = M.space()->dim();
    auto where = [&](std::size_t which, std::size_t i) -> std::int32_t {
        const BasisElement& b = basis[which == 0 ? i : offset + i];
        return static_cast<std::int32_t>(S->index(b.degree, b.label));
    };
    GradedMap d(S, S, -1);
    GradedMap act(Factors{S, A}, Factors{S}, 0);
    const StrictModule* parts[2] = {&M, &N};
    for (std::size_t w = 0; w < 2; ++w) {
        for (const auto& [k, col] : parts[w]->d().columns())
            for (const auto& [r, c] : col)
                d.add_entry(Key{where(w, static_cast<std::size_t>(k[0]))}, Key{where(w, static_cast<std::size_t>(r[0]))}, c);
        for (const auto& [k, col] : parts[w]->action().columns())
            for (const auto& [r, c] : col)
                act.add_entry(Key{where(w, static_cast<std::size_t>(k[0])), k[1]}, Key{where(w, static_cast<std::size_t>(r[0]))}, c);
    }
    return StrictModule(M.algebra(), ChainComplex(S, std::move(d)), std::move(act));
}

/// Label of g·x^k in ℝ[G][x].
inline std::string loop_monomial_label(const FiniteGroup& G, std::size_t g, int k)
{
    if (k == 0)
        return G.label(g);
    return G.label(g) + " x" + (k == 1 ? std::string() : "^" + std::to_string(k));
}

/**
 * Slices ℝ[G]·x^k, 0 ≤ k ≤ top, of ℝ[G][x] with |x| = n - 1 and zero differential, as a right
 * module over the group algebra acting by conjugation: α·h = h^{-1} α h.
 */
inline StrictModule conjugation_module(const FiniteGroup& G, const AlgebraPtr& A, int n, int top)
{
    std::vector<BasisElement> basis;
    for (int k = 0; k <= top; ++k)
        for (std::size_t g = 0; g < G.order(); ++g)
            basis.push_back({k * (n - 1), loop_monomial_label(G, g, k)});
    auto S = make_space(basis);
    GradedMap act(Factors{S, A->space()}, Factors{S}, 0);
    for (int k = 0; k <= top; ++k)
        for (std::size_t g = 0; g < G.order(); ++g)
            for (std::size_t h = 0; h < G.order(); ++h) {
                std::size_t conj = G.multiply(G.multiply(G.inverse(h), g), h);
                auto col = static_cast<std::int32_t>(S->index(k * (n - 1), loop_monomial_label(G, g, k)));
                auto row = static_cast<std::int32_t>(S->index(k * (n - 1), loop_monomial_label(G, conj, k)));
                auto a = static_cast<std::int32_t>(A->space()->index(0, G.label(h)));
                act.add_entry(Key{col, a}, Key{row}, Scalar(1));
            }
    return StrictModule(A, ChainComplex::zero(S), std::move(act));
}

} // namespace dgmorse

#endif // DGMORSE_MODULE_HPP
