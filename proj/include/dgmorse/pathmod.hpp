#ifndef DGMORSE_PATHMOD_HPP
#define DGMORSE_PATHMOD_HPP

#include "dgmorse/ainfty.hpp"

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

/**
 * @file
 * Path modules over a pair (A, P): a left A-module complex P containing A, a complex E with a
 * subcomplex F, and operations m_k: F⊗A^{⊗k-2}⊗P → E restricting to an A∞-module structure on F.
 * Morphisms of path modules are coherent chain homotopies.
 */

namespace dgmorse {

/// Left action A⊗P → P with an A-linear chain embedding A → P.
class PathPair {
public:
    PathPair() = default;

    /// Throws std::invalid_argument if an axiom fails.
    PathPair(AlgebraPtr algebra, ChainComplex path, GradedMap action, GradedMap embedding);

    const AlgebraPtr& algebra() const { return algebra_; }
    const ChainComplex& path() const { return path_; }
    const SpacePtr& space() const { return path_.space(); }
    const GradedMap& action() const { return action_; }
    const GradedMap& embedding() const { return embedding_; }

    /// Tensor factor W when P = A⊗W, together with the base point w0 ∈ W with ι(a) = a⊗w0.
    const std::optional<ChainComplex>& coefficients() const { return coefficients_; }
    const std::string& base_label() const { return base_; }

    detail::Frame frame() const { return {algebra_.get(), path_.space(), &path_.differential(), &action_}; }

    /// P = A with the multiplication as action and the identity as embedding.
    static PathPair trivial(const AlgebraPtr& A)
    {
        return PathPair(A, A->complex(), A->mu(), identity_map(A->space()));
    }

    /**
     * P = A⊗W with a·(b⊗w) = ab⊗w and ι(a) = a⊗w0, for a degree 0 cycle w0 of W.
     * Throws std::invalid_argument if w0 is missing or not a degree 0 cycle.
     */
    static PathPair tensor(const AlgebraPtr& A, const ChainComplex& W, const std::string& base);

private:
    AlgebraPtr algebra_;
    ChainComplex path_;
    GradedMap action_;
    GradedMap embedding_;
    std::optional<ChainComplex> coefficients_;
    std::string base_;
};

using PairPtr = std::shared_ptr<const PathPair>;

/// Checks d² = 0 on P, the left action axioms, and that ι is an A-linear chain map.
inline Report verify_path_pair(const PathPair& P)
{
    Report r;
    r.subject = "path pair";
    r.merge(verify_complex(P.path()), "P: ");
    const DGAlgebra& A = *P.algebra();
    const SpacePtr& SA = A.space();
    const SpacePtr& SP = P.space();
    const GradedMap& act = P.action();
    const Factors three{SA, SA, SP};
    const Factors two{SA, SP};

    auto w = detail::first_nonzero(three, {SP}, [&](const Vec& x) {
        Vec left = apply_at(act, 0, apply_at(act, 1, x, three), two);
        axpy(left, Scalar(-1), apply_at(act, 0, apply_at(A.mu(), 0, x, three), two));
        return left;
    });
    r.add("associativity", !w, w);

    std::optional<Witness> unit;
    for (std::size_t i = 0; i < SP->dim() && !unit; ++i) {
        Key k{static_cast<std::int32_t>(A.unit()), static_cast<std::int32_t>(i)};
        Vec v = act.column(k);
        axpy(v, Scalar(-1), unit_vec(Key{static_cast<std::int32_t>(i)}));
        if (!v.empty())
            unit = Witness{key_degree(two, k), key_label(two, k), format_vec({SP}, v)};
    }
    r.add("unit", !unit, unit);

    const std::vector<const GradedMap*> dd{&A.d(), &P.path().differential()};
    w = detail::first_nonzero(two, {SP}, [&](const Vec& x) {
        Vec lhs = apply_at(P.path().differential(), 0, apply_at(act, 0, x, two), {SP});
        axpy(lhs, Scalar(-1), apply_at(act, 0, tensor_differential(x, two, dd), two));
        return lhs;
    });
    r.add("Leibniz rule", !w, w);

    r.merge(verify_chain_map(P.embedding(), A.complex(), P.path()), "embedding: ");
    w = detail::first_nonzero({SA, SA}, {SP}, [&](const Vec& x) {
        Vec lhs = apply_at(P.embedding(), 0, apply_at(A.mu(), 0, x, {SA, SA}), {SA});
        axpy(lhs, Scalar(-1), apply_at(act, 0, apply_at(P.embedding(), 1, x, {SA, SA}), two));
        return lhs;
    });
    r.add("embedding is A-linear", !w, w);
    return r;
}

inline PathPair::PathPair(AlgebraPtr algebra, ChainComplex path, GradedMap action, GradedMap embedding)
    : algebra_(std::move(algebra)), path_(std::move(path)), action_(std::move(action)), embedding_(std::move(embedding))
{
    if (!algebra_)
        throw std::invalid_argument("path pair without an algebra");
    const SpacePtr& A = algebra_->space();
    const SpacePtr& P = path_.space();
    if (action_.degree() != 0 || !same_factors(action_.source(), {A, P}) || !same_factors(action_.target(), {P}))
        throw std::invalid_argument("action must be a degree 0 map A⊗P → P");
    if (embedding_.degree() != 0 || !same_factors(embedding_.source(), {A}) || !same_factors(embedding_.target(), {P}))
        throw std::invalid_argument("embedding must be a degree 0 map A → P");
    Report r = verify_path_pair(*this);
    if (const Check* c = r.first_failure())
        throw std::invalid_argument("not a path pair: " + c->name + " fails" +
                                    (c->witness ? " at " + c->witness->tensor + ": " + c->witness->value : ""));
}

inline PathPair PathPair::tensor(const AlgebraPtr& A, const ChainComplex& W, const std::string& base)
{
    auto w0 = W.space()->find(0, base);
    if (!w0)
        throw std::invalid_argument("base point '" + base + "' is not a degree 0 basis element");
    if (!W.differential().column(Key{static_cast<std::int32_t>(*w0)}).empty())
        throw std::invalid_argument("base point '" + base + "' is not a cycle");
    ChainComplex P = tensor_complex(A->complex(), W);
    const SpacePtr& SP = P.space();
    const SpacePtr& SA = A->space();
    GradedMap act(Factors{SA, SP}, Factors{SP}, 0);
    for (std::size_t a = 0; a < SA->dim(); ++a)
        for (std::size_t x = 0; x < SP->dim(); ++x) {
            const auto& px = SP->parts(x);
            for (const auto& [k, c] : A->mu().column(Key{static_cast<std::int32_t>(a), static_cast<std::int32_t>(px[0])}))
                act.add_entry(Key{static_cast<std::int32_t>(a), static_cast<std::int32_t>(x)},
                              Key{static_cast<std::int32_t>(*SP->find_parts({static_cast<std::uint32_t>(k[0]), px[1]}))}, c);
        }
    GradedMap iota(SA, SP, 0);
    for (std::size_t a = 0; a < SA->dim(); ++a)
        iota.add_entry(a, *SP->find_parts({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(*w0)}), Scalar(1));
    PathPair out(A, std::move(P), std::move(act), std::move(iota));
    out.coefficients_ = W;
    out.base_ = base;
    return out;
}

/**
 * Subcomplex of C spanned by the listed basis elements, with the restricted differential.
 * Throws std::invalid_argument if a label is missing or d leaves the span.
 */
inline ChainComplex fiber_subcomplex(const ChainComplex& C, const std::vector<BasisElement>& basis)
{
    const SpacePtr& S = C.space();
    auto F = make_space(basis, S->degrees());
    std::vector<std::size_t> where(F->dim());
    std::map<std::size_t, std::size_t> back;
    for (std::size_t i = 0; i < F->dim(); ++i) {
        auto j = S->find(F->degree(i), F->label(i));
        if (!j)
            throw std::invalid_argument("fiber element '" + F->label(i) + "' is not a basis element of the total complex");
        where[i] = *j;
        back[*j] = i;
    }
    GradedMap d(F, F, -1);
    for (std::size_t i = 0; i < F->dim(); ++i)
        for (const auto& [k, c] : C.differential().column(Key{static_cast<std::int32_t>(where[i])})) {
            auto it = back.find(static_cast<std::size_t>(k[0]));
            if (it == back.end())
                throw std::invalid_argument("fiber is not a subcomplex: d(" + F->label(i) + ") leaves it");
            d.add_entry(i, it->second, c);
        }
    return ChainComplex(F, std::move(d));
}

/// Basis elements of C whose labels end with the given suffix, e.g. "|w0".
inline std::vector<BasisElement> labels_with_suffix(const SpacePtr& S, const std::string& suffix)
{
    std::vector<BasisElement> out;
    for (const auto& b : S->basis())
        if (b.label.size() >= suffix.size() && b.label.compare(b.label.size() - suffix.size(), suffix.size(), suffix) == 0)
            out.push_back(b);
    return out;
}

/// Embedding of a subcomplex given by labels, as a degree 0 map F → E.
inline GradedMap label_inclusion(const SpacePtr& F, const SpacePtr& E)
{
    GradedMap inc(F, E, 0);
    for (std::size_t i = 0; i < F->dim(); ++i) {
        auto j = E->find(F->degree(i), F->label(i));
        if (!j)
            throw std::invalid_argument("'" + F->label(i) + "' is not a basis element of the ambient space");
        inc.add_entry(i, *j, Scalar(1));
    }
    return inc;
}

namespace detail {

/**
 * Rewrites a vector of the total space in the fiber basis. Returns the first basis element outside
 * the fiber through `outside` when the vector does not lie in F.
 */
inline Vec into_fiber(const Vec& v, const SpacePtr& total, const SpacePtr& fiber, std::optional<std::size_t>& outside)
{
    Vec out;
    for (const auto& [k, c] : v) {
        const auto j = static_cast<std::size_t>(k[0]);
        auto i = fiber->find(total->degree(j), total->label(j));
        if (!i) {
            if (!outside)
                outside = j;
            continue;
        }
        add_term(out, Key{static_cast<std::int32_t>(*i)}, c);
    }
    return out;
}

/**
 * Fiber part of a map whose source starts with a fiber factor: evaluates on fiber⊗A^{⊗n} after
 * pushing the last A factor through the embedding into P (when `through_embedding`) and requires the
 * result to lie in the target fiber. Records the first tensor where it does not.
 */
inline GradedMap restrict_to_fiber(const GradedMap& full, const Factors& fib_source, const SpacePtr& target_total,
                                   const SpacePtr& target_fiber, const GradedMap* embedding, const GradedMap* source_inclusion,
                                   std::optional<Witness>& failure)
{
    return from_function(fib_source, {target_fiber}, full.degree(), [&](const Key& key) {
        Vec x = unit_vec(key);
        Factors X = fib_source;
        if (source_inclusion) {
            x = apply_at(*source_inclusion, 0, x, X);
            X = replaced_factors(X, 0, *source_inclusion);
        }
        if (embedding) {
            x = apply_at(*embedding, X.size() - 1, x, X);
            X = replaced_factors(X, X.size() - 1, *embedding);
        }
        Vec y = apply_at(full, 0, x, X);
        std::optional<std::size_t> outside;
        Vec out = into_fiber(y, target_total, target_fiber, outside);
        if (outside && !failure)
            failure = Witness{key_degree(fib_source, key), key_label(fib_source, key), format_vec({target_total}, y)};
        return out;
    });
}

} // namespace detail

/**
 * Truncated path module (E, F, m_2, ..., m_K) over a pair (A, P). The fiber parts
 * m_k^F: F⊗A^{⊗k-1} → F are derived by restriction; a restriction that leaves F is recorded and
 * reported by verify_path_module rather than rejected here.
 */
class PathModule {
public:
    PathModule() = default;

    /**
     * `fiber` must be a subcomplex of `total` given by a subset of its labels (see fiber_subcomplex);
     * `ops` holds m_2, ..., m_K with m_k: F⊗A^{⊗k-2}⊗P → E of degree k-2.
     */
    PathModule(PairPtr pair, ChainComplex total, ChainComplex fiber, std::vector<GradedMap> ops)
        : pair_(std::move(pair)), total_(std::move(total)), fiber_(std::move(fiber))
    {
        if (!pair_)
            throw std::invalid_argument("path module without a pair");
        inclusion_ = label_inclusion(fiber_.space(), total_.space());
        if (!(compose(total_.differential(), inclusion_) == compose(inclusion_, fiber_.differential())))
            throw std::invalid_argument("fiber differential is not the restriction of the total differential");
        ops_.resize(2);
        for (auto& m : ops)
            ops_.push_back(std::move(m));
        fib_.resize(ops_.size());
        restriction_failures_.resize(ops_.size());
        const auto fr = frame();
        for (std::size_t k = 2; k < ops_.size(); ++k) {
            const GradedMap& m = ops_[k];
            if (!same_factors(m.source(), detail::full_factors(fr, fiber_space(), k)) ||
                !same_factors(m.target(), {total_space()}) || m.degree() != static_cast<int>(k) - 2)
                throw std::invalid_argument("m_" + std::to_string(k) + " must be a degree " + std::to_string(k - 2) +
                                            " map F⊗A^{⊗" + std::to_string(k - 2) + "}⊗P → E");
            fib_[k] = detail::restrict_to_fiber(m, detail::fiber_factors(fr, fiber_space(), k), total_space(), fiber_space(),
                                                &pair_->embedding(), nullptr, restriction_failures_[k]);
        }
    }

    const PairPtr& pair() const { return pair_; }
    const AlgebraPtr& algebra() const { return pair_->algebra(); }
    const ChainComplex& total() const { return total_; }
    const ChainComplex& fiber() const { return fiber_; }
    const SpacePtr& total_space() const { return total_.space(); }
    const SpacePtr& fiber_space() const { return fiber_.space(); }
    const GradedMap& inclusion() const { return inclusion_; }
    std::size_t arity() const { return ops_.size() - 1; }

    /// m_k: F⊗A^{⊗k-2}⊗P → E for 2 ≤ k ≤ arity.
    const GradedMap& op(std::size_t k) const
    {
        if (k < 2 || k > arity())
            throw std::out_of_range("operation m_" + std::to_string(k) + " beyond the arity bound " + std::to_string(arity()));
        return ops_[k];
    }

    /// Fiber part m_k^F: F⊗A^{⊗k-1} → F for 2 ≤ k ≤ arity.
    const GradedMap& fiber_op(std::size_t k) const
    {
        if (k < 2 || k > arity())
            throw std::out_of_range("operation m_" + std::to_string(k) + " beyond the arity bound " + std::to_string(arity()));
        return fib_[k];
    }

    const std::optional<Witness>& restriction_failure(std::size_t k) const { return restriction_failures_.at(k); }

    detail::Frame frame() const { return pair_->frame(); }

    detail::ModuleView view() const
    {
        detail::ModuleView v;
        v.total = total_space();
        v.fiber = fiber_space();
        v.d_total = &total_.differential();
        v.d_fiber = &fiber_.differential();
        v.full.assign(ops_.size(), nullptr);
        v.fib.assign(ops_.size(), nullptr);
        for (std::size_t k = 2; k < ops_.size(); ++k) {
            if (!ops_[k].is_zero())
                v.full[k] = &ops_[k];
            if (!fib_[k].is_zero())
                v.fib[k] = &fib_[k];
        }
        v.arity = arity();
        return v;
    }

    /// The A∞-module (F, m_k^F) carried by the fiber.
    AInftyModule fiber_module() const
    {
        std::vector<GradedMap> higher(fib_.begin() + 2, fib_.end());
        return AInftyModule(algebra(), fiber_, std::move(higher));
    }

private:
    PairPtr pair_;
    ChainComplex total_;
    ChainComplex fiber_;
    GradedMap inclusion_;
    std::vector<GradedMap> ops_;  // index k; slots 0 and 1 unused
    std::vector<GradedMap> fib_;
    std::vector<std::optional<Witness>> restriction_failures_;
};

using PathModulePtr = std::shared_ptr<const PathModule>;

/// Checks m_2 is a chain map, the structure equations for 3 ≤ N ≤ K, and the restriction clause.
inline Report verify_path_module(const PathModule& E)
{
    Report r;
    r.subject = "path module";
    Report eq = detail::verify_module_view(E.frame(), E.view());
    for (auto& c : eq.checks)
        if (c.name == "N = 1")
            c.name = "d∘d = 0";
    r.merge(eq);
    for (std::size_t k = 2; k <= E.arity(); ++k)
        r.add("m_" + std::to_string(k) + " restricts to the fiber", !E.restriction_failure(k), E.restriction_failure(k));
    return r;
}

/**
 * Morphism of path modules of degree m: a chain map η_1: E^1 → E^2 and η_k: F^1⊗A^{⊗k-2}⊗P → E^2
 * of degree m+k-1. Fiber parts are derived by restriction as for path modules.
 */
class PathMorphism {
public:
    PathMorphism() = default;

    /// `maps` holds η_1, ..., η_K.
    PathMorphism(PathModulePtr source, PathModulePtr target, int shift, std::vector<GradedMap> maps)
        : source_(std::move(source)), target_(std::move(target)), shift_(shift), maps_(std::move(maps))
    {
        if (!source_ || !target_)
            throw std::invalid_argument("path morphism needs a source and a target");
        if (source_->pair() != target_->pair() && !same_space(source_->pair()->space(), target_->pair()->space()))
            throw std::invalid_argument("source and target are path modules over different pairs");
        if (maps_.empty())
            throw std::invalid_argument("path morphism needs at least η_1");
        maps_.insert(maps_.begin(), GradedMap());
        fib_.resize(maps_.size());
        restriction_failures_.resize(maps_.size());
        const auto fr = source_->frame();
        const GradedMap& e1 = maps_[1];
        if (!same_factors(e1.source(), {source_->total_space()}) || !same_factors(e1.target(), {target_->total_space()}) ||
            e1.degree() != shift_)
            throw std::invalid_argument("η_1 must be a degree " + std::to_string(shift_) + " map E^1 → E^2");
        fib_[1] = detail::restrict_to_fiber(e1, {source_->fiber_space()}, target_->total_space(), target_->fiber_space(),
                                            nullptr, &source_->inclusion(), restriction_failures_[1]);
        for (std::size_t k = 2; k < maps_.size(); ++k) {
            const GradedMap& f = maps_[k];
            if (!same_factors(f.source(), detail::full_factors(fr, source_->fiber_space(), k)) ||
                !same_factors(f.target(), {target_->total_space()}) || f.degree() != shift_ + static_cast<int>(k) - 1)
                throw std::invalid_argument("η_" + std::to_string(k) + " must be a degree " +
                                            std::to_string(shift_ + static_cast<int>(k) - 1) + " map F^1⊗A^{⊗" +
                                            std::to_string(k - 2) + "}⊗P → E^2");
            fib_[k] = detail::restrict_to_fiber(f, detail::fiber_factors(fr, source_->fiber_space(), k), target_->total_space(),
                                                target_->fiber_space(), &source_->pair()->embedding(), nullptr,
                                                restriction_failures_[k]);
        }
    }

    const PathModulePtr& source() const { return source_; }
    const PathModulePtr& target() const { return target_; }
    int shift() const { return shift_; }
    std::size_t arity() const { return maps_.size() - 1; }

    const GradedMap& map(std::size_t k) const
    {
        if (k == 0 || k > arity())
            throw std::out_of_range("component η_" + std::to_string(k) + " beyond the arity bound");
        return maps_[k];
    }

    const GradedMap& fiber_map(std::size_t k) const
    {
        if (k == 0 || k > arity())
            throw std::out_of_range("component η_" + std::to_string(k) + " beyond the arity bound");
        return fib_[k];
    }

    const std::optional<Witness>& restriction_failure(std::size_t k) const { return restriction_failures_.at(k); }

    detail::MorphismView view() const
    {
        detail::MorphismView v;
        v.first = &maps_[1];
        v.first_fib = &fib_[1];
        v.full.assign(maps_.size(), nullptr);
        v.fib.assign(maps_.size(), nullptr);
        for (std::size_t k = 2; k < maps_.size(); ++k) {
            if (!maps_[k].is_zero())
                v.full[k] = &maps_[k];
            if (!fib_[k].is_zero())
                v.fib[k] = &fib_[k];
        }
        v.shift = shift_;
        v.arity = arity();
        return v;
    }

    /// The A∞-morphism between the fiber modules; the caller supplies the promoted fiber modules.
    AInftyMorphism fiber_morphism(const ModulePtr& source, const ModulePtr& target) const
    {
        std::vector<GradedMap> maps(fib_.begin() + 1, fib_.end());
        return AInftyMorphism(source, target, shift_, std::move(maps));
    }

    friend bool operator==(const PathMorphism& a, const PathMorphism& b)
    {
        if (a.arity() != b.arity() || a.shift_ != b.shift_)
            return false;
        for (std::size_t k = 1; k <= a.arity(); ++k)
            if (!(a.maps_[k] == b.maps_[k]))
                return false;
        return true;
    }

private:
    PathModulePtr source_;
    PathModulePtr target_;
    int shift_ = 0;
    std::vector<GradedMap> maps_;  // index k; slot 0 unused
    std::vector<GradedMap> fib_;
    std::vector<std::optional<Witness>> restriction_failures_;
};

/// Checks the morphism equations for N ≤ K-1 and that every η_k restricts to the fibers.
inline Report verify_path_morphism(const PathMorphism& f)
{
    Report r = detail::verify_morphism_view(f.source()->frame(), f.source()->view(), f.target()->view(), f.view());
    r.subject = "path morphism";
    for (std::size_t k = 1; k <= f.arity(); ++k)
        r.add("η_" + std::to_string(k) + " restricts to the fibers", !f.restriction_failure(k), f.restriction_failure(k));
    return r;
}

/**
 * The morphism equations in the displayed form of the definition, with the target summand read as
 * m_{k+1}(η_{N-k+1}⊗id^{⊗k}):
 *
 *   η_{N+1}d + (-1)^{N+1+m} dη_{N+1} = Σ_{s=1}^{N} (-1)^{s(N-s)} η_{N-s+1}(m^1_{s+1}⊗id^{⊗N-s})
 *       + (-1)^N Σ_{k=1}^{N} (-1)^{k(N-k)} m^2_{k+1}(η_{N-k+1}⊗id^{⊗k})
 *       + Σ_{r=1}^{N-1} (-1)^{N+1+r} η_N(id^{⊗r}⊗μ⊗id^{⊗N-1-r}).
 *
 * It agrees with verify_path_morphism when the source is strict and either the target is strict or
 * m is even. The N = 0 line is the chain map condition.
 */
inline Report verify_path_morphism_literal(const PathMorphism& f)
{
    Report r;
    r.subject = "path morphism (displayed form)";
    const PathModule& S = *f.source();
    const PathModule& T = *f.target();
    const auto fr = S.frame();
    const auto sv = S.view();
    const auto tv = T.view();
    const auto g = f.view();
    const int m = f.shift();
    GradedMap chain = compose(f.map(1), S.total().differential()) - compose(T.total().differential(), f.map(1)).scaled(sign_of(m));
    auto w = nonzero_witness(chain);
    r.add("N = 0", !w, w);
    for (std::size_t N = 1; N + 1 <= f.arity(); ++N) {
        const Factors X = detail::full_factors(fr, S.fiber_space(), N + 1);
        const long n = static_cast<long>(N);
        w = detail::first_nonzero(X, {T.total_space()}, [&](const Vec& x) {
            Vec res;
            Factors Y;
            const GradedMap& eta = f.map(N + 1);
            axpy(res, Scalar(1), apply_at(eta, 0, detail::full_differential(fr, S.fiber().differential(), x, X), X));
            axpy(res, Scalar(sign_of(n + 1 + m)), apply_at(T.total().differential(), 0, apply_at(eta, 0, x, X), {T.total_space()}));
            for (std::size_t s = 1; s <= N; ++s) {
                const GradedMap* inner = (s < N) ? sv.fib_op(s + 1) : sv.full_op(N + 1);
                const GradedMap* outer = (s < N) ? g.full_op(N - s + 1) : g.first;
                if (!inner || !outer)
                    continue;
                Vec y = detail::apply_front(inner, x, X, Y);
                const long ss = static_cast<long>(s);
                axpy(res, Scalar(-sign_of(ss * (n - ss))), apply_at(*outer, 0, y, Y));
            }
            for (std::size_t k = 1; k <= N; ++k) {
                const GradedMap* inner = g.fib_op(N - k + 1);
                const GradedMap* outer = tv.full_op(k + 1);
                if (!inner || !outer)
                    continue;
                Vec y = detail::apply_front(inner, x, X, Y);
                const long kk = static_cast<long>(k);
                axpy(res, Scalar(-sign_of(n + kk * (n - kk))), apply_at(*outer, 0, y, Y));
            }
            if (N >= 2)
                for (std::size_t rr = 1; rr + 1 <= N; ++rr) {
                    const GradedMap& mu = (rr == N - 1) ? *fr.act_last : fr.algebra->mu();
                    Vec y = apply_at(mu, rr, x, X);
                    axpy(res, Scalar(-sign_of(n + 1 + static_cast<long>(rr))),
                         apply_at(f.map(N), 0, y, replaced_factors(X, rr, mu)));
                }
            return res;
        });
        r.add("N = " + std::to_string(N), !w, w);
    }
    return r;
}

/**
 * Strict path module built from a strict module M. Over the trivial pair E = F = M and m_2 is the
 * action. Over a tensor pair P = A⊗W, E = M⊗W, F = M⊗w0 and m_2(x⊗(b⊗w)) = xb⊗w.
 * Higher operations up to `arity` are zero.
 */
inline PathModule strict_path_module(const StrictModule& M, const PairPtr& pair, std::size_t arity = 2)
{
    if (!same_space(M.algebra()->space(), pair->algebra()->space()))
        throw std::invalid_argument("module and pair are over different algebras");
    ChainComplex total, fiber;
    GradedMap m2;
    if (!pair->coefficients()) {
        total = M.complex();
        fiber = fiber_subcomplex(total, M.space()->basis());
        const SpacePtr& F = fiber.space();
        m2 = GradedMap(Factors{F, pair->space()}, Factors{total.space()}, 0);
        for (const auto& [k, col] : M.action().columns())
            m2.add_column(k, col);
    } else {
        const ChainComplex& W = *pair->coefficients();
        total = tensor_complex(M.complex(), W);
        fiber = fiber_subcomplex(total, labels_with_suffix(total.space(), "|" + pair->base_label()));
        const SpacePtr& E = total.space();
        const SpacePtr& F = fiber.space();
        const SpacePtr& P = pair->space();
        m2 = GradedMap(Factors{F, P}, Factors{E}, 0);
        for (std::size_t f = 0; f < F->dim(); ++f) {
            const auto& pf = E->parts(E->index(F->degree(f), F->label(f)));
            for (std::size_t p = 0; p < P->dim(); ++p) {
                const auto& pp = P->parts(p);
                for (const auto& [k, c] : M.action().column(Key{static_cast<std::int32_t>(pf[0]), static_cast<std::int32_t>(pp[0])}))
                    m2.add_entry(Key{static_cast<std::int32_t>(f), static_cast<std::int32_t>(p)},
                                 Key{static_cast<std::int32_t>(*E->find_parts({static_cast<std::uint32_t>(k[0]), pp[1]}))}, c);
            }
        }
    }
    std::vector<GradedMap> ops{std::move(m2)};
    for (std::size_t k = 3; k <= arity; ++k)
        ops.emplace_back(detail::full_factors(pair->frame(), fiber.space(), k), Factors{total.space()}, static_cast<int>(k) - 2);
    return PathModule(pair, std::move(total), std::move(fiber), std::move(ops));
}

/// Same m_2 with zero higher operations up to the given arity.
inline PathModule strict_extension(const PathModule& E, std::size_t arity)
{
    std::vector<GradedMap> ops{E.op(2)};
    for (std::size_t k = 3; k <= arity; ++k)
        ops.emplace_back(detail::full_factors(E.frame(), E.fiber_space(), k), Factors{E.total_space()}, static_cast<int>(k) - 2);
    return PathModule(E.pair(), E.total(), E.fiber(), std::move(ops));
}

/// η_1 = id, η_{≥2} = 0.
inline PathMorphism identity_path_morphism(const PathModulePtr& E)
{
    std::vector<GradedMap> maps{identity_map(E->total_space())};
    for (std::size_t k = 2; k <= E->arity(); ++k)
        maps.emplace_back(detail::full_factors(E->frame(), E->fiber_space(), k), Factors{E->total_space()},
                          static_cast<int>(k) - 1);
    return PathMorphism(E, E, 0, std::move(maps));
}

/// Trivial coherent chain homotopy: the given η_1 with η_{≥2} = 0.
inline PathMorphism trivial_path_morphism(const PathModulePtr& source, const PathModulePtr& target, const GradedMap& eta1,
                                          std::size_t arity)
{
    std::vector<GradedMap> maps{eta1};
    for (std::size_t k = 2; k <= arity; ++k)
        maps.emplace_back(detail::full_factors(source->frame(), source->fiber_space(), k), Factors{target->total_space()},
                          eta1.degree() + static_cast<int>(k) - 1);
    return PathMorphism(source, target, eta1.degree(), std::move(maps));
}

/// (η'∘η)_1 = η'_1η_1 and (η'∘η)_k = Σ_{r=1}^{k} (-1)^{(r-1)(k-r) + (k-r)m} η'_{k-r+1}(η_r⊗id^{⊗k-r}), m = |η|.
inline PathMorphism compose_path(const PathMorphism& second, const PathMorphism& first)
{
    if (!same_space(first.target()->total_space(), second.source()->total_space()) ||
        !same_space(first.target()->fiber_space(), second.source()->fiber_space()))
        throw std::invalid_argument("path morphisms are not composable: target and source differ");
    const std::size_t K = std::min(first.arity(), second.arity());
    auto fr = first.source()->frame();
    auto ev = second.view();
    auto zv = first.view();
    std::vector<GradedMap> maps{compose(second.map(1), first.map(1))};
    for (std::size_t k = 2; k <= K; ++k)
        maps.push_back(detail::compose_component(fr, first.source()->fiber_space(), second.target()->total_space(), ev, zv, k));
    return PathMorphism(first.source(), second.target(), first.shift() + second.shift(), std::move(maps));
}

/**
 * Inverse of a path morphism with η_1 invertible and η_1(F^1) = F^2:
 * ζ_1 = η_1^{-1}, ζ_{N+1} = -η_1^{-1} Σ_{k=1}^{N} (-1)^{k(N-k) + k|ζ|} η_{k+1}(ζ_{N-k+1}⊗id^{⊗k}).
 * Throws std::domain_error if η_1 or its fiber part is singular, std::invalid_argument if
 * η_1 does not map F^1 into F^2.
 */
inline PathMorphism invert_path_iso(const PathMorphism& f)
{
    if (f.restriction_failure(1))
        throw std::invalid_argument("η_1 does not map the source fiber into the target fiber");
    const std::size_t K = f.arity();
    auto fr = f.source()->frame();
    std::vector<GradedMap> g(K + 1);
    g[1] = invert_map(f.map(1));
    GradedMap g1_fib;
    try {
        g1_fib = invert_map(f.fiber_map(1));
    } catch (const std::domain_error& e) {
        throw std::domain_error(std::string("η_1 does not map the fibers isomorphically: ") + e.what());
    }
    auto fv = f.view();
    detail::MorphismView gv;
    gv.shift = -f.shift();
    gv.first = &g[1];
    gv.first_fib = &g1_fib;
    gv.full.assign(K + 1, nullptr);
    gv.fib.assign(K + 1, nullptr);
    std::vector<GradedMap> g_fib(K + 1);
    std::optional<Witness> unused;
    for (std::size_t k = 2; k <= K; ++k) {
        g[k] = detail::inverse_component(fr, f.target()->fiber_space(), f.source()->total_space(), fv, gv, k);
        g_fib[k] = detail::restrict_to_fiber(g[k], detail::fiber_factors(fr, f.target()->fiber_space(), k),
                                             f.source()->total_space(), f.source()->fiber_space(),
                                             &f.source()->pair()->embedding(), nullptr, unused);
        if (!g[k].is_zero())
            gv.full[k] = &g[k];
        if (!g_fib[k].is_zero())
            gv.fib[k] = &g_fib[k];
    }
    g.erase(g.begin());
    return PathMorphism(f.target(), f.source(), -f.shift(), std::move(g));
}

/// Retract of a total complex whose restriction to the fibers is a retract of the fibers.
struct PathRetract {
    HomotopyRetract total;
    HomotopyRetract fiber;
};

/**
 * Restricts a retract of E to a retract of the fiber F ⊆ E, with small fiber spanned by the given
 * labels of the small complex. Throws std::invalid_argument if i, p or h do not preserve the fibers.
 */
inline PathRetract restrict_retract(const HomotopyRetract& R, const ChainComplex& fiber,
                                    const std::vector<BasisElement>& small_fiber)
{
    ChainComplex sf = fiber_subcomplex(R.small, small_fiber);
    auto restrict = [](const GradedMap& f, const SpacePtr& src, const SpacePtr& src_total, const SpacePtr& tgt,
                       const SpacePtr& tgt_total, const char* name) {
        std::optional<Witness> failure;
        GradedMap inc = label_inclusion(src, src_total);
        GradedMap out = detail::restrict_to_fiber(f, {src}, tgt_total, tgt, nullptr, &inc, failure);
        if (failure)
            throw std::invalid_argument(std::string("retract does not preserve the fibers: ") + name + " moves " +
                                        failure->tensor + " to " + failure->value);
        return out;
    };
    HomotopyRetract RF{fiber, sf,
                       restrict(R.i, sf.space(), R.small.space(), fiber.space(), R.big.space(), "i"),
                       restrict(R.p, fiber.space(), R.big.space(), sf.space(), R.small.space(), "p"),
                       restrict(R.h, fiber.space(), R.big.space(), fiber.space(), R.big.space(), "h")};
    return {R, std::move(RF)};
}

/**
 * Retract of a strict path module onto homology compatible with its fiber: over a tensor pair it is
 * R_M⊗R_W with R_W fixing the base point, over the trivial pair the retract of M itself.
 */
inline PathRetract path_retract(const PathModule& E, const HomotopyRetract& RM)
{
    if (!E.pair()->coefficients()) {
        if (!same_space(RM.big.space(), E.total_space()))
            throw std::invalid_argument("retract is not on the path module's total complex");
        return restrict_retract(RM, E.fiber(), RM.small.space()->basis());
    }
    const std::string suffix = "|" + E.pair()->base_label();
    HomotopyRetract RW = retract_to_homology(*E.pair()->coefficients());
    if (!RW.small.space()->find(0, E.pair()->base_label()))
        throw std::invalid_argument("base point is not a homology representative of the coefficients");
    HomotopyRetract R = tensor_retract(RM, RW);
    if (!same_space(R.big.space(), E.total_space()))
        throw std::invalid_argument("retract is not on the path module's total complex");
    R.big = E.total();
    return restrict_retract(R, E.fiber(), labels_with_suffix(R.small.space(), suffix));
}

/// Transferred path module on the small complexes with the extended i and p.
struct PathTransferResult {
    PathModulePtr small;
    PathMorphism i;
    PathMorphism p;
};

/**
 * Transfer of a strict path module along a retract that restricts to the fibers. With T_1 = i,
 * T_j = hμ_F(T_{j-1}⊗id) on the fiber, m_k = -(-1)^{k(k-1)/2} p m_2(T_{k-1}⊗id) and i_k, p_k as for
 * A∞-modules. Throws std::invalid_argument on an invalid or fiber-breaking retract.
 */
inline PathTransferResult transfer_path(const PathModule& E, const PathRetract& R, std::size_t K)
{
    if (!same_space(R.total.big.space(), E.total_space()) || !(R.total.big.differential() == E.total().differential()))
        throw std::invalid_argument("retract is not on the path module's total complex");
    if (!same_space(R.fiber.big.space(), E.fiber_space()))
        throw std::invalid_argument("fiber retract is not on the path module's fiber");
    for (const HomotopyRetract* part : {&R.total, &R.fiber}) {
        Report check = verify_retract(*part);
        if (const Check* c = check.first_failure())
            throw std::invalid_argument("invalid homotopy retract: " + c->name + " fails");
    }
    for (std::size_t k = 3; k <= E.arity(); ++k)
        if (!E.op(k).is_zero())
            throw std::invalid_argument("transfer needs a strict path module");
    if (E.arity() < 2)
        throw std::invalid_argument("transfer needs m_2");
    auto fr = E.frame();
    auto maps = detail::transfer(fr, E.fiber_op(2), E.op(2), R.total, R.fiber, K);
    std::vector<GradedMap> higher;
    for (std::size_t k = 2; k <= K; ++k)
        higher.push_back(std::move(maps.m[k]));
    auto big = std::make_shared<const PathModule>(strict_extension(E, K));
    auto small = std::make_shared<const PathModule>(E.pair(), R.total.small, R.fiber.small, std::move(higher));
    std::vector<GradedMap> is{R.total.i}, ps{R.total.p};
    for (std::size_t k = 2; k <= K; ++k) {
        is.push_back(std::move(maps.i[k]));
        ps.push_back(std::move(maps.p[k]));
    }
    return {small, PathMorphism(small, big, 0, std::move(is)), PathMorphism(big, small, 0, std::move(ps))};
}

/**
 * Inverse up to homotopy of a morphism f: E^1 → E^2 of strict path modules whose η_1 is a
 * quasi-isomorphism: ζ = i^1 ∘ ε^{-1} ∘ p^2 with ε = p^2 ∘ f ∘ i^1, using transfers along retracts
 * onto homology. Throws std::domain_error if ε_1 is singular on totals or fibers.
 */
inline PathMorphism invert_path_quasi(const PathMorphism& f, const PathModule& E1, const PathModule& E2,
                                      const PathRetract& R1, const PathRetract& R2)
{
    const std::size_t K = f.arity();
    auto t1 = transfer_path(E1, R1, K);
    auto t2 = transfer_path(E2, R2, K);
    std::vector<GradedMap> maps;
    for (std::size_t k = 1; k <= K; ++k)
        maps.push_back(f.map(k));
    PathMorphism f2(t1.i.target(), t2.p.source(), f.shift(), std::move(maps));
    PathMorphism eps = compose_path(t2.p, compose_path(f2, t1.i));
    PathMorphism inv;
    try {
        inv = invert_path_iso(eps);
    } catch (const std::domain_error& e) {
        throw std::domain_error(std::string("η_1 is not a quasi-isomorphism: ") + e.what());
    }
    return compose_path(t1.i, compose_path(inv, t2.p));
}

} // namespace dgmorse

#endif // DGMORSE_PATHMOD_HPP
