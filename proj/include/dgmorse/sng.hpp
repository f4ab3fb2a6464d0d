#ifndef DGMORSE_SNG_HPP
#define DGMORSE_SNG_HPP

#include "dgmorse/group.hpp"
#include "dgmorse/report.hpp"
#include "dgmorse/scalar.hpp"

#include <array>
#include <compare>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dgmorse {

/// Rejects sphere dimensions outside the odd range n > 1.
inline void require_odd_sphere(int n)
{
    if (n <= 1 || n % 2 == 0)
        throw std::invalid_argument("sphere dimension must be odd and greater than 1, got " + std::to_string(n));
}

/// The monomial g·x^k of the Pontryagin ring ℝ[G][x], of degree k(n-1).
struct Monomial {
    std::size_t g = 0;
    int k = 0;

    auto operator<=>(const Monomial&) const = default;
};

/// Sparse element of ℝ[G][x].
using BasedElement = std::map<Monomial, Scalar>;

/// Sparse element of ℝ[G][x] ⊗ ℝ[G][x].
using BasedTensor = std::map<std::pair<Monomial, Monomial>, Scalar>;

inline int monomial_degree(const Monomial& m, int n)
{
    return m.k * (n - 1);
}

/// "g x^k", with the identity omitted when k > 0 and "x" for k = 1.
inline std::string monomial_label(const FiniteGroup& G, const Monomial& m)
{
    if (m.k == 0)
        return G.label(m.g);
    std::string power = m.k == 1 ? "x" : "x^" + std::to_string(m.k);
    return m.g == G.identity() ? power : G.label(m.g) + " " + power;
}

template <class K>
void accumulate(std::map<K, Scalar>& out, const K& key, const Scalar& c)
{
    if (c == 0)
        return;
    auto [it, fresh] = out.emplace(key, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0)
            out.erase(it);
    }
}

/// Product in ℝ[G][x] with x central: (g x^i)(h x^j) = gh x^{i+j}.
inline BasedElement pontryagin_product(const FiniteGroup& G, const BasedElement& a, const BasedElement& b)
{
    BasedElement out;
    for (const auto& [ma, ca] : a)
        for (const auto& [mb, cb] : b)
            accumulate(out, Monomial{G.multiply(ma.g, mb.g), ma.k + mb.k}, ca * cb);
    return out;
}

/// Multiplies the left tensor factor by g on the left.
inline BasedTensor left_act(const FiniteGroup& G, std::size_t g, const BasedTensor& t)
{
    BasedTensor out;
    for (const auto& [mm, c] : t)
        accumulate(out, {Monomial{G.multiply(g, mm.first.g), mm.first.k}, mm.second}, c);
    return out;
}

/// Multiplies the right tensor factor by g on the right.
inline BasedTensor right_act(const FiniteGroup& G, const BasedTensor& t, std::size_t g)
{
    BasedTensor out;
    for (const auto& [mm, c] : t)
        accumulate(out, {mm.first, Monomial{G.multiply(mm.second.g, g), mm.second.k}}, c);
    return out;
}

/**
 * Coproduct on the based loop homology ℝ[G][x] of Sⁿ/G:
 * g x^k ↦ Σ_{i+j=k-1} Σ_{h∈G} gh^{-1} x^i ⊗ h x^j, extended linearly. Degree 1 - n.
 */
inline BasedTensor based_coproduct(const BasedElement& e, const FiniteGroup& G, int n)
{
    require_odd_sphere(n);
    BasedTensor out;
    for (const auto& [m, c] : e)
        for (int i = 0; i + 1 <= m.k; ++i) {
            int j = m.k - 1 - i;
            for (std::size_t h = 0; h < G.order(); ++h)
                accumulate(out, {Monomial{G.multiply(m.g, G.inverse(h)), i}, Monomial{h, j}}, c);
        }
    return out;
}

inline std::string format_based(const FiniteGroup& G, const BasedElement& e)
{
    if (e.empty())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : e) {
        os << (first ? "" : " + ");
        if (c != 1)
            os << c.get_str() << "·";
        os << monomial_label(G, m);
        first = false;
    }
    return os.str();
}

inline std::string format_based(const FiniteGroup& G, const BasedTensor& t)
{
    if (t.empty())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [mm, c] : t) {
        os << (first ? "" : " + ");
        if (c != 1)
            os << c.get_str() << "·";
        os << monomial_label(G, mm.first) << "⊗" << monomial_label(G, mm.second);
        first = false;
    }
    return os.str();
}

/// Basis classes x_{[g],k} and y_{[g],k} of the free loop homology of Sⁿ/G.
struct FreeLoopClass {
    enum class Kind { x, y };

    Kind kind = Kind::x;
    std::size_t cls = 0; ///< index into conjugacy_classes(G)
    int level = 0;

    auto operator<=>(const FreeLoopClass&) const = default;

    /// k(n-1) for x-classes, k(n-1) + n for y-classes.
    int degree(int n) const { return level * (n - 1) + (kind == Kind::y ? n : 0); }
};

using LoopPair = std::pair<FreeLoopClass, FreeLoopClass>;
using LoopTriple = std::array<FreeLoopClass, 3>;

/// Row of the lifted coproduct table: sparse combination of ordered pairs of classes.
using CoproductRow = std::map<LoopPair, Scalar>;

/// The class representative is the member with the least declaration index.
inline std::size_t class_representative(const FiniteGroup& G, std::size_t cls)
{
    auto classes = conjugacy_classes(G);
    if (cls >= classes.size())
        throw std::invalid_argument("conjugacy class index out of range");
    return classes[cls].front();
}

/// "x_{[g],k}" or "y_{[g],k}" with g the class representative.
inline std::string class_label(const FiniteGroup& G, const FreeLoopClass& c)
{
    return std::string(c.kind == FreeLoopClass::Kind::x ? "x" : "y") + "_{[" +
           G.label(class_representative(G, c.cls)) + "]," + std::to_string(c.level) + "}";
}

/// Parses "x,[g],k" or "y,[g],k"; g may be any member of its conjugacy class.
inline FreeLoopClass parse_loop_class(const FiniteGroup& G, const std::string& text)
{
    auto fail = [&] { return std::invalid_argument("malformed loop class '" + text + "', expected \"x,[g],k\""); };
    auto c1 = text.find(',');
    auto c2 = text.rfind(',');
    if (c1 == std::string::npos || c1 == c2)
        throw fail();
    std::string kind = text.substr(0, c1);
    std::string elem = text.substr(c1 + 1, c2 - c1 - 1);
    std::string level = text.substr(c2 + 1);
    if ((kind != "x" && kind != "y") || elem.size() < 2 || elem.front() != '[' || elem.back() != ']' ||
        level.empty() || level.find_first_not_of("0123456789") != std::string::npos)
        throw fail();
    FreeLoopClass c;
    c.kind = kind == "x" ? FreeLoopClass::Kind::x : FreeLoopClass::Kind::y;
    c.cls = class_index(G)[G.index(elem.substr(1, elem.size() - 2))];
    c.level = std::stoi(level);
    return c;
}

struct LoopBasis {
    std::vector<FreeLoopClass> classes;
    std::map<int, std::size_t> betti; ///< degree ↦ dimension, only nonzero entries
};

/**
 * Classes x_{[g],k}, y_{[g],k} for k ≤ max_k. In relative mode (homology of ΛM rel M) the two
 * classes x_{[1],0} and y_{[1],0} are removed.
 */
inline LoopBasis loop_basis(const FiniteGroup& G, int n, int max_k, bool relative = false)
{
    require_odd_sphere(n);
    if (max_k < 0)
        throw std::invalid_argument("max_k must be nonnegative");
    const std::size_t unit_class = class_index(G)[G.identity()];
    const std::size_t nclasses = conjugacy_classes(G).size();
    LoopBasis out;
    for (int k = 0; k <= max_k; ++k)
        for (auto kind : {FreeLoopClass::Kind::x, FreeLoopClass::Kind::y})
            for (std::size_t c = 0; c < nclasses; ++c) {
                if (relative && k == 0 && c == unit_class)
                    continue;
                FreeLoopClass fc{kind, c, k};
                out.classes.push_back(fc);
                ++out.betti[fc.degree(n)];
            }
    return out;
}

/**
 * Lifted coproduct on the free loop homology of Sⁿ/G:
 *   x_{[g],k} ↦ Σ_{i+j=k-1} Σ_{h∈G} x_{[gh^{-1}],i} ⊗ x_{[h],j}
 *   y_{[g],k} ↦ Σ_{i+j=k-1} Σ_{h∈G} (x_{[gh^{-1}],i} ⊗ y_{[h],j} + y_{[gh^{-1}],i} ⊗ x_{[h],j}).
 * Collapsing elements to classes produces integer multiplicities, which are kept.
 */
inline CoproductRow lifted_coproduct(const FreeLoopClass& c, const FiniteGroup& G, int n)
{
    require_odd_sphere(n);
    using Kind = FreeLoopClass::Kind;
    const auto idx = class_index(G);
    const std::size_t g = class_representative(G, c.cls);
    CoproductRow out;
    for (int i = 0; i + 1 <= c.level; ++i) {
        int j = c.level - 1 - i;
        for (std::size_t h = 0; h < G.order(); ++h) {
            std::size_t left = idx[G.multiply(g, G.inverse(h))];
            std::size_t right = idx[h];
            if (c.kind == Kind::x) {
                accumulate(out, {FreeLoopClass{Kind::x, left, i}, FreeLoopClass{Kind::x, right, j}}, Scalar(1));
            } else {
                accumulate(out, {FreeLoopClass{Kind::x, left, i}, FreeLoopClass{Kind::y, right, j}}, Scalar(1));
                accumulate(out, {FreeLoopClass{Kind::y, left, i}, FreeLoopClass{Kind::x, right, j}}, Scalar(1));
            }
        }
    }
    return out;
}

inline std::string format_row(const FiniteGroup& G, const CoproductRow& row)
{
    if (row.empty())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [pair, c] : row) {
        os << (first ? "" : " + ");
        if (c != 1)
            os << c.get_str() << "·";
        os << class_label(G, pair.first) << "⊗" << class_label(G, pair.second);
        first = false;
    }
    return os.str();
}

/// (∨̂⊗id)∨̂(c) as a combination of ordered triples.
inline std::map<LoopTriple, Scalar> coproduct_left_iterate(const FreeLoopClass& c, const FiniteGroup& G, int n)
{
    std::map<LoopTriple, Scalar> out;
    for (const auto& [pair, coeff] : lifted_coproduct(c, G, n))
        for (const auto& [inner, c2] : lifted_coproduct(pair.first, G, n))
            accumulate(out, LoopTriple{inner.first, inner.second, pair.second}, coeff * c2);
    return out;
}

/// (id⊗∨̂)∨̂(c), with the Koszul sign of passing ∨̂ (degree 1 - n) across the left factor.
inline std::map<LoopTriple, Scalar> coproduct_right_iterate(const FreeLoopClass& c, const FiniteGroup& G, int n)
{
    std::map<LoopTriple, Scalar> out;
    for (const auto& [pair, coeff] : lifted_coproduct(c, G, n)) {
        Scalar sign(sign_of(static_cast<long>(1 - n) * pair.first.degree(n)));
        for (const auto& [inner, c2] : lifted_coproduct(pair.second, G, n))
            accumulate(out, LoopTriple{pair.first, inner.first, inner.second}, sign * coeff * c2);
    }
    return out;
}

/// Factor swap a⊗b ↦ (-1)^{|a||b|} b⊗a.
inline CoproductRow swap_factors(const CoproductRow& row, int n)
{
    CoproductRow out;
    for (const auto& [pair, c] : row)
        accumulate(out, {pair.second, pair.first},
                   Scalar(sign_of(static_cast<long>(pair.first.degree(n)) * pair.second.degree(n))) * c);
    return out;
}

/**
 * Checks the degree law of ∨̂, left and right G-equivariance of the based coproduct,
 * coassociativity of ∨̂, and cocommutativity on x-classes, for all classes of level ≤ max_k.
 * Whether the swap also fixes the y-rows is recorded in the detail of the cocommutativity check.
 */
inline Report verify_sng_properties(const FiniteGroup& G, int n, int max_k)
{
    require_odd_sphere(n);
    Report report;
    report.subject = "string topology of S^" + std::to_string(n) + "/" + G.name();
    const auto basis = loop_basis(G, n, max_k);

    std::optional<Witness> degree_witness;
    for (const auto& c : basis.classes) {
        for (const auto& [pair, coeff] : lifted_coproduct(c, G, n))
            if (pair.first.degree(n) + pair.second.degree(n) != c.degree(n) + 1 - n && !degree_witness)
                degree_witness = Witness{c.degree(n), class_label(G, c),
                                         class_label(G, pair.first) + "⊗" + class_label(G, pair.second)};
    }
    report.add("degree law", !degree_witness, degree_witness);

    std::optional<Witness> left_witness, right_witness;
    for (int k = 0; k <= max_k; ++k)
        for (std::size_t g = 0; g < G.order(); ++g)
            for (std::size_t a = 0; a < G.order(); ++a) {
                BasedElement e{{Monomial{g, k}, Scalar(1)}};
                BasedElement ae = pontryagin_product(G, {{Monomial{a, 0}, Scalar(1)}}, e);
                BasedElement ea = pontryagin_product(G, e, {{Monomial{a, 0}, Scalar(1)}});
                if (based_coproduct(ae, G, n) != left_act(G, a, based_coproduct(e, G, n)) && !left_witness)
                    left_witness = Witness{monomial_degree(Monomial{g, k}, n),
                                           G.label(a) + " · " + monomial_label(G, Monomial{g, k}),
                                           format_based(G, based_coproduct(ae, G, n))};
                if (based_coproduct(ea, G, n) != right_act(G, based_coproduct(e, G, n), a) && !right_witness)
                    right_witness = Witness{monomial_degree(Monomial{g, k}, n),
                                            monomial_label(G, Monomial{g, k}) + " · " + G.label(a),
                                            format_based(G, based_coproduct(ea, G, n))};
            }
    report.add("left equivariance", !left_witness, left_witness);
    report.add("right equivariance", !right_witness, right_witness);

    std::optional<Witness> coassoc_witness;
    for (const auto& c : basis.classes)
        if (coproduct_left_iterate(c, G, n) != coproduct_right_iterate(c, G, n) && !coassoc_witness)
            coassoc_witness = Witness{c.degree(n), class_label(G, c), "(∨̂⊗id)∨̂ ≠ (id⊗∨̂)∨̂"};
    report.add("coassociativity", !coassoc_witness, coassoc_witness);

    std::optional<Witness> comm_witness;
    bool y_symmetric = true;
    for (const auto& c : basis.classes) {
        CoproductRow row = lifted_coproduct(c, G, n);
        bool symmetric = swap_factors(row, n) == row;
        if (c.kind == FreeLoopClass::Kind::y)
            y_symmetric = y_symmetric && symmetric;
        else if (!symmetric && !comm_witness)
            comm_witness = Witness{c.degree(n), class_label(G, c), format_row(G, row)};
    }
    report.add("x-class cocommutativity", !comm_witness, comm_witness,
               y_symmetric ? "y-classes: swap-symmetric" : "y-classes: not swap-symmetric");
    return report;
}

} // namespace dgmorse

#endif // DGMORSE_SNG_HPP
