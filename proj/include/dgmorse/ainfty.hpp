#ifndef DGMORSE_AINFTY_HPP
#define DGMORSE_AINFTY_HPP

#include "dgmorse/engine.hpp"
#include "dgmorse/module.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgmorse {

/**
 * Truncated A∞-module (N, m_1, ..., m_K) over a strict DGA, with m_k: N⊗A^{⊗k-1} → N of degree k-2.
 * m_1 is the differential of the carrier complex.
 */
class AInftyModule {
public:
    AInftyModule() = default;

    /// `higher` holds m_2, ..., m_K; the arity bound is K = higher.size() + 1.
    AInftyModule(AlgebraPtr algebra, ChainComplex complex, std::vector<GradedMap> higher)
        : algebra_(std::move(algebra)), complex_(std::move(complex))
    {
        if (!algebra_)
            throw std::invalid_argument("A∞-module without an algebra");
        ops_.resize(2);
        for (auto& m : higher)
            ops_.push_back(std::move(m));
        for (std::size_t k = 2; k < ops_.size(); ++k)
            check_op(k);
    }

    /// Strict module with m_k = 0 for 3 ≤ k ≤ arity.
    static AInftyModule from_strict(const StrictModule& M, std::size_t arity)
    {
        std::vector<GradedMap> higher;
        for (std::size_t k = 2; k <= arity; ++k)
            higher.push_back(k == 2 ? M.action() : GradedMap(detail::fiber_factors(frame_of(*M.algebra()), M.space(), k),
                                                              Factors{M.space()}, static_cast<int>(k) - 2));
        return AInftyModule(M.algebra(), M.complex(), std::move(higher));
    }

    const AlgebraPtr& algebra() const { return algebra_; }
    const ChainComplex& complex() const { return complex_; }
    const SpacePtr& space() const { return complex_.space(); }
    std::size_t arity() const { return ops_.size() - 1; }

    /// m_k for 1 ≤ k ≤ arity.
    const GradedMap& op(std::size_t k) const
    {
        if (k == 0 || k > arity())
            throw std::out_of_range("operation m_" + std::to_string(k) + " beyond the arity bound " + std::to_string(arity()));
        return k == 1 ? complex_.differential() : ops_[k];
    }

    /// Mutable access for building deliberately broken fixtures.
    GradedMap& op_mut(std::size_t k)
    {
        if (k < 2 || k > arity())
            throw std::out_of_range("only m_2, ..., m_K can be replaced");
        return ops_[k];
    }

    static detail::Frame frame_of(const DGAlgebra& A) { return {&A, A.space(), &A.d(), &A.mu()}; }
    detail::Frame frame() const { return frame_of(*algebra_); }

    detail::ModuleView view() const
    {
        detail::ModuleView v;
        v.total = v.fiber = space();
        v.d_total = v.d_fiber = &complex_.differential();
        v.full.assign(ops_.size(), nullptr);
        for (std::size_t k = 2; k < ops_.size(); ++k)
            if (!ops_[k].is_zero())
                v.full[k] = &ops_[k];
        v.fib = v.full;
        v.arity = arity();
        return v;
    }

private:
    void check_op(std::size_t k) const
    {
        const GradedMap& m = ops_[k];
        Factors src = detail::fiber_factors(frame(), space(), k);
        if (!same_factors(m.source(), src) || !same_factors(m.target(), {space()}) || m.degree() != static_cast<int>(k) - 2)
            throw std::invalid_argument("m_" + std::to_string(k) + " must be a degree " + std::to_string(k - 2) +
                                        " map N⊗A^{⊗" + std::to_string(k - 1) + "} → N");
    }

    AlgebraPtr algebra_;
    ChainComplex complex_;
    std::vector<GradedMap> ops_;  // index k; slots 0 and 1 unused
};

using ModulePtr = std::shared_ptr<const AInftyModule>;

/// Morphism (f_1, ..., f_K) of A∞-modules of degree m, with f_k: M⊗A^{⊗k-1} → N of degree m+k-1.
class AInftyMorphism {
public:
    AInftyMorphism() = default;

    AInftyMorphism(ModulePtr source, ModulePtr target, int shift, std::vector<GradedMap> maps)
        : source_(std::move(source)), target_(std::move(target)), shift_(shift), maps_(std::move(maps))
    {
        if (!source_ || !target_)
            throw std::invalid_argument("morphism needs a source and a target");
        if (source_->algebra() != target_->algebra() && !(same_space(source_->algebra()->space(), target_->algebra()->space())))
            throw std::invalid_argument("source and target are modules over different algebras");
        if (maps_.empty())
            throw std::invalid_argument("morphism needs at least f_1");
        maps_.insert(maps_.begin(), GradedMap());
        for (std::size_t k = 1; k < maps_.size(); ++k) {
            const GradedMap& f = maps_[k];
            Factors src = detail::fiber_factors(source_->frame(), source_->space(), k);
            if (!same_factors(f.source(), src) || !same_factors(f.target(), {target_->space()}) ||
                f.degree() != shift_ + static_cast<int>(k) - 1)
                throw std::invalid_argument("f_" + std::to_string(k) + " must be a degree " +
                                            std::to_string(shift_ + static_cast<int>(k) - 1) + " map M⊗A^{⊗" +
                                            std::to_string(k - 1) + "} → N");
        }
    }

    const ModulePtr& source() const { return source_; }
    const ModulePtr& target() const { return target_; }
    int shift() const { return shift_; }
    std::size_t arity() const { return maps_.size() - 1; }

    const GradedMap& map(std::size_t k) const
    {
        if (k == 0 || k > arity())
            throw std::out_of_range("component f_" + std::to_string(k) + " beyond the arity bound");
        return maps_[k];
    }

    GradedMap& map_mut(std::size_t k)
    {
        if (k == 0 || k > arity())
            throw std::out_of_range("component f_" + std::to_string(k) + " beyond the arity bound");
        return maps_[k];
    }

    detail::MorphismView view() const
    {
        detail::MorphismView v;
        v.first = v.first_fib = &maps_[1];
        v.full.assign(maps_.size(), nullptr);
        for (std::size_t k = 2; k < maps_.size(); ++k)
            if (!maps_[k].is_zero())
                v.full[k] = &maps_[k];
        v.fib = v.full;
        v.shift = shift_;
        v.arity = arity();
        return v;
    }

    /// Term-by-term equality of the families (same arity, same maps).
    friend bool operator==(const AInftyMorphism& a, const AInftyMorphism& b)
    {
        if (a.arity() != b.arity() || a.shift_ != b.shift_)
            return false;
        for (std::size_t k = 1; k <= a.arity(); ++k)
            if (!(a.maps_[k] == b.maps_[k]))
                return false;
        return true;
    }

private:
    ModulePtr source_;
    ModulePtr target_;
    int shift_ = 0;
    std::vector<GradedMap> maps_;  // index k; slot 0 unused
};

/// Checks the structure equations for every N up to the arity bound.
inline Report verify_ainfty_module(const AInftyModule& M)
{
    Report r = detail::verify_module_view(M.frame(), M.view());
    r.subject = "A∞-module";
    return r;
}

/// Checks the morphism equations for g_1, ..., g_K.
inline Report verify_morphism(const AInftyMorphism& f)
{
    Report r = detail::verify_morphism_view(f.source()->frame(), f.source()->view(), f.target()->view(), f.view());
    r.subject = "A∞-morphism";
    return r;
}

/**
 * The morphism equations written as in the strict-module definition:
 *
 *   η_{N+1}∘d + (-1)^{N+1+m} d∘η_{N+1} = (-1)^{N+1} η_N(μ_F⊗id^{N-1}) - μ_G(η_N⊗id)
 *                                        + Σ_{r=1}^{N-1} (-1)^{N+1+r} η_N(id^r⊗μ⊗id^{N-1-r}).
 *
 * Only meaningful when source and target are strict (m_{≥3} = 0); the higher operations are ignored.
 */
inline Report verify_morphism_strict_form(const AInftyMorphism& f)
{
    Report r;
    r.subject = "A∞-morphism (strict form)";
    const AInftyModule& S = *f.source();
    const AInftyModule& T = *f.target();
    const DGAlgebra& A = *S.algebra();
    const int m = f.shift();
    for (std::size_t N = 0; N + 1 <= f.arity(); ++N) {
        Factors X = detail::fiber_factors(S.frame(), S.space(), N + 1);
        std::vector<const GradedMap*> diffs{&S.op(1)};
        for (std::size_t i = 0; i < N; ++i)
            diffs.push_back(&A.d());
        const GradedMap& eta = f.map(N + 1);
        auto w = detail::first_nonzero(X, {T.space()}, [&](const Vec& x) {
            Vec res = apply_at(eta, 0, tensor_differential(x, X, diffs), X);
            axpy(res, Scalar(sign_of(static_cast<long>(N) + 1 + m)), apply_at(T.op(1), 0, apply_at(eta, 0, x, X), {T.space()}));
            if (N >= 1) {
                const GradedMap& etaN = f.map(N);
                if (S.arity() >= 2) {
                    Vec y = apply_at(S.op(2), 0, x, X);
                    axpy(res, Scalar(-sign_of(static_cast<long>(N) + 1)), apply_at(etaN, 0, y, replaced_factors(X, 0, S.op(2))));
                }
                if (T.arity() >= 2) {
                    Vec y = apply_at(etaN, 0, x, X);
                    axpy(res, Scalar(1), apply_at(T.op(2), 0, y, replaced_factors(X, 0, etaN)));
                }
                for (std::size_t rr = 1; rr + 1 <= N; ++rr) {
                    Vec y = apply_at(A.mu(), rr, x, X);
                    axpy(res, Scalar(-sign_of(static_cast<long>(N + 1 + rr))),
                         apply_at(etaN, 0, y, replaced_factors(X, rr, A.mu())));
                }
            }
            return res;
        });
        r.add("N = " + std::to_string(N), !w, w);
    }
    return r;
}

/// f_1 = id, f_{≥2} = 0.
inline AInftyMorphism identity_morphism(const ModulePtr& M)
{
    std::vector<GradedMap> maps{identity_map(M->space())};
    for (std::size_t k = 2; k <= M->arity(); ++k)
        maps.emplace_back(detail::fiber_factors(M->frame(), M->space(), k), Factors{M->space()}, static_cast<int>(k) - 1);
    return AInftyMorphism(M, M, 0, std::move(maps));
}

/// Extends f_1 by zeros up to the given arity.
inline AInftyMorphism strict_morphism(const ModulePtr& source, const ModulePtr& target, const GradedMap& f1, std::size_t arity)
{
    std::vector<GradedMap> maps{f1};
    for (std::size_t k = 2; k <= arity; ++k)
        maps.emplace_back(detail::fiber_factors(source->frame(), source->space(), k), Factors{target->space()},
                          f1.degree() + static_cast<int>(k) - 1);
    return AInftyMorphism(source, target, f1.degree(), std::move(maps));
}

/// (η∘ζ)_{N+1} = Σ_{k=0}^{N} (-1)^{k(N-k) + k·m_ζ} η_{k+1}(ζ_{N-k+1}⊗id^k).
inline AInftyMorphism compose_morphisms(const AInftyMorphism& eta, const AInftyMorphism& zeta)
{
    if (!same_space(zeta.target()->space(), eta.source()->space()))
        throw std::invalid_argument("morphisms are not composable: target and source carriers differ");
    const std::size_t K = std::min(eta.arity(), zeta.arity());
    auto fr = zeta.source()->frame();
    auto ev = eta.view();
    auto zv = zeta.view();
    std::vector<GradedMap> maps{compose(eta.map(1), zeta.map(1))};
    for (std::size_t k = 2; k <= K; ++k)
        maps.push_back(detail::compose_component(fr, zeta.source()->space(), eta.target()->space(), ev, zv, k));
    return AInftyMorphism(zeta.source(), eta.target(), eta.shift() + zeta.shift(), std::move(maps));
}

/**
 * Inverse of an ∞-isomorphism: g_1 = f_1^{-1} and
 * g_{N+1} = -f_1^{-1} Σ_{k=1}^{N} (-1)^{k(N-k) + k·m_g} f_{k+1}(g_{N-k+1}⊗id^k).
 * Throws std::domain_error naming the degree where f_1 is singular.
 */
inline AInftyMorphism invert_infty_iso(const AInftyMorphism& f)
{
    const std::size_t K = f.arity();
    auto fr = f.source()->frame();
    std::vector<GradedMap> g(K + 1);
    g[1] = invert_map(f.map(1));
    auto fv = f.view();
    detail::MorphismView gv;
    gv.shift = -f.shift();
    gv.first = gv.first_fib = &g[1];
    gv.full.assign(K + 1, nullptr);
    for (std::size_t k = 2; k <= K; ++k) {
        g[k] = detail::inverse_component(fr, f.target()->space(), f.source()->space(), fv, gv, k);
        if (!g[k].is_zero())
            gv.full[k] = &g[k];
        gv.fib = gv.full;
    }
    g.erase(g.begin());
    return AInftyMorphism(f.target(), f.source(), -f.shift(), std::move(g));
}

/// Transferred structure on the small complex together with the extended i and p.
struct TransferResult {
    ModulePtr small;
    AInftyMorphism i;
    AInftyMorphism p;
};

/**
 * Homotopy transfer of a strict module along a retract of its carrier complex.
 * Throws std::invalid_argument if R is not a valid retract of the module's complex.
 */
inline TransferResult homotopy_transfer(const StrictModule& M, const HomotopyRetract& R, std::size_t K)
{
    if (!same_space(R.big.space(), M.space()) || !(R.big.differential() == M.d()))
        throw std::invalid_argument("retract is not on the module's complex");
    Report check = verify_retract(R);
    if (const Check* c = check.first_failure())
        throw std::invalid_argument("invalid homotopy retract: " + c->name + " fails");
    auto fr = AInftyModule::frame_of(*M.algebra());
    auto maps = detail::transfer(fr, M.action(), M.action(), R, R, K);
    std::vector<GradedMap> higher;
    for (std::size_t k = 2; k <= K; ++k)
        higher.push_back(std::move(maps.m[k]));
    auto big = std::make_shared<const AInftyModule>(AInftyModule::from_strict(M, K));
    auto small = std::make_shared<const AInftyModule>(M.algebra(), R.small, std::move(higher));
    std::vector<GradedMap> is{R.i}, ps{R.p};
    for (std::size_t k = 2; k <= K; ++k) {
        is.push_back(std::move(maps.i[k]));
        ps.push_back(std::move(maps.p[k]));
    }
    return {small, AInftyMorphism(small, big, 0, std::move(is)), AInftyMorphism(big, small, 0, std::move(ps))};
}

/// Checks that a degree-0 chain map induces an isomorphism on homology.
inline bool is_quasi_isomorphism(const GradedMap& f, const ChainComplex& source, const ChainComplex& target)
{
    auto RS = retract_to_homology(source);
    auto RT = retract_to_homology(target);
    GradedMap Hf = compose(RT.p, compose(f, RS.i));
    try {
        invert_map(Hf);
        return true;
    } catch (const std::domain_error&) {
        return false;
    }
}

/**
 * Inverse up to homotopy of an ∞-quasi-isomorphism f: M → N between strict modules:
 * g = i^M ∘ (p^N ∘ f ∘ i^M)^{-1} ∘ p^N, where i^M, p^N come from transfer along the retracts
 * onto homology. Throws std::domain_error if f_1 is not a quasi-isomorphism.
 */
inline AInftyMorphism invert_infty_quasi_iso(const AInftyMorphism& f, const StrictModule& M, const StrictModule& N,
                                             const HomotopyRetract& RM, const HomotopyRetract& RN)
{
    const std::size_t K = f.arity();
    auto tm = homotopy_transfer(M, RM, K);
    auto tn = homotopy_transfer(N, RN, K);
    // Rebase f onto the strict modules promoted inside the transfers so the carriers match.
    std::vector<GradedMap> fm;
    for (std::size_t k = 1; k <= K; ++k)
        fm.push_back(f.map(k));
    AInftyMorphism f2(tm.i.target(), tn.p.source(), f.shift(), std::move(fm));
    AInftyMorphism eps = compose_morphisms(tn.p, compose_morphisms(f2, tm.i));
    AInftyMorphism inv;
    try {
        inv = invert_infty_iso(eps);
    } catch (const std::domain_error& e) {
        throw std::domain_error(std::string("f_1 is not a quasi-isomorphism: ") + e.what());
    }
    return compose_morphisms(tm.i, compose_morphisms(inv, tn.p));
}

} // namespace dgmorse

#endif // DGMORSE_AINFTY_HPP
