#ifndef DGMORSE_GRADED_MAP_HPP
#define DGMORSE_GRADED_MAP_HPP

#include "dgmorse/graded_space.hpp"
#include "dgmorse/scalar.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dgmorse {

/// Index tuple of a basis tensor v_0 ⊗ v_1 ⊗ ... ⊗ v_{n-1}.
struct Key {
    static constexpr std::size_t max_factors = 12;

    std::array<std::int32_t, max_factors> idx{};
    std::uint8_t len = 0;

    Key() = default;
    Key(std::initializer_list<std::int32_t> values)
    {
        for (auto v : values)
            push(v);
    }

    std::size_t size() const { return len; }
    std::int32_t operator[](std::size_t i) const { return idx[i]; }
    std::int32_t& operator[](std::size_t i) { return idx[i]; }

    void push(std::int32_t v)
    {
        if (len == max_factors)
            throw std::length_error("tensor key exceeds the supported number of factors");
        idx[len++] = v;
    }

    Key slice(std::size_t from, std::size_t count) const
    {
        Key k;
        for (std::size_t i = 0; i < count; ++i)
            k.push(idx[from + i]);
        return k;
    }

    /// Replaces positions [pos, pos+width) by `mid`.
    Key splice(std::size_t pos, std::size_t width, const Key& mid) const
    {
        Key k;
        for (std::size_t i = 0; i < pos; ++i)
            k.push(idx[i]);
        for (std::size_t i = 0; i < mid.len; ++i)
            k.push(mid.idx[i]);
        for (std::size_t i = pos + width; i < len; ++i)
            k.push(idx[i]);
        return k;
    }

    friend bool operator==(const Key& a, const Key& b)
    {
        if (a.len != b.len)
            return false;
        for (std::size_t i = 0; i < a.len; ++i)
            if (a.idx[i] != b.idx[i])
                return false;
        return true;
    }

    friend std::strong_ordering operator<=>(const Key& a, const Key& b)
    {
        if (a.len != b.len)
            return a.len <=> b.len;
        for (std::size_t i = 0; i < a.len; ++i)
            if (a.idx[i] != b.idx[i])
                return a.idx[i] <=> b.idx[i];
        return std::strong_ordering::equal;
    }
};

using Factors = std::vector<SpacePtr>;

/// Sparse element of a tensor product, keyed by basis tuples. Zero coefficients are never stored.
using Vec = std::map<Key, Scalar>;

inline void add_term(Vec& out, const Key& k, const Scalar& c)
{
    if (sgn(c) == 0)
        return;
    auto [it, fresh] = out.emplace(k, c);
    if (!fresh) {
        it->second += c;
        if (sgn(it->second) == 0)
            out.erase(it);
    }
}

inline void axpy(Vec& out, const Scalar& c, const Vec& v)
{
    if (sgn(c) == 0)
        return;
    for (const auto& [k, x] : v)
        add_term(out, k, c * x);
}

inline Vec unit_vec(const Key& k)
{
    return Vec{{k, Scalar(1)}};
}

inline int key_degree(const Factors& factors, const Key& k)
{
    int d = 0;
    for (std::size_t i = 0; i < k.size(); ++i)
        d += factors[i]->degree(static_cast<std::size_t>(k[i]));
    return d;
}

inline bool same_factors(const Factors& a, const Factors& b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!same_space(a[i], b[i]))
            return false;
    return true;
}

inline std::string key_label(const Factors& factors, const Key& k)
{
    std::string s;
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (i)
            s += '|';
        s += factors[i]->label(static_cast<std::size_t>(k[i]));
    }
    return s;
}

/// Renders a sparse tensor as "c*a|b + ...", in key order.
inline std::string format_vec(const Factors& factors, const Vec& v)
{
    if (v.empty())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : v) {
        Scalar a = c;
        if (!first)
            os << (sgn(a) < 0 ? " - " : " + ");
        else if (sgn(a) < 0)
            os << "-";
        if (sgn(a) < 0)
            a = -a;
        if (a != 1)
            os << a.get_str() << "*";
        os << key_label(factors, k);
        first = false;
    }
    return os.str();
}

/// Calls fn(key) for every basis tensor of the given factors, in lexicographic order.
inline void for_each_key(const Factors& factors, const std::function<void(const Key&)>& fn)
{
    for (const auto& f : factors)
        if (f->dim() == 0)
            return;
    Key k;
    for (std::size_t i = 0; i < factors.size(); ++i)
        k.push(0);
    while (true) {
        fn(k);
        std::size_t j = factors.size();
        while (j > 0) {
            --j;
            if (static_cast<std::size_t>(++k[j]) < factors[j]->dim())
                break;
            k[j] = 0;
            if (j == 0)
                return;
        }
        if (factors.empty())
            return;
    }
}

/**
 * Degree-shifting linear map between tensor products of graded spaces.
 *
 * A single-factor map is a plain graded map V -> W. Columns are stored sparsely per
 * source basis tensor; absent columns are zero.
 */
class GradedMap {
public:
    GradedMap() = default;

    GradedMap(Factors source, Factors target, int degree)
        : source_(std::move(source)), target_(std::move(target)), degree_(degree)
    {
    }

    GradedMap(SpacePtr source, SpacePtr target, int degree)
        : GradedMap(Factors{std::move(source)}, Factors{std::move(target)}, degree)
    {
    }

    const Factors& source() const { return source_; }
    const Factors& target() const { return target_; }
    const SpacePtr& source_space() const { return source_.at(0); }
    const SpacePtr& target_space() const { return target_.at(0); }
    int degree() const { return degree_; }
    std::size_t source_arity() const { return source_.size(); }
    std::size_t target_arity() const { return target_.size(); }

    void add_entry(const Key& col, const Key& row, const Scalar& c)
    {
        if (sgn(c) == 0)
            return;
        check_key(source_, col, "source");
        check_key(target_, row, "target");
        int expected = key_degree(source_, col) + degree_;
        if (key_degree(target_, row) != expected)
            throw std::invalid_argument("entry " + key_label(target_, row) + " <- " + key_label(source_, col) +
                                        " violates map degree " + std::to_string(degree_));
        Scalar value = c;
        value.canonicalize();
        Vec& column = columns_[col];
        add_term(column, row, value);
        if (column.empty())
            columns_.erase(col);
    }

    void add_entry(std::size_t col, std::size_t row, const Scalar& c)
    {
        add_entry(Key{static_cast<std::int32_t>(col)}, Key{static_cast<std::int32_t>(row)}, c);
    }

    /// Adds c * v to the column of `col`.
    void add_column(const Key& col, const Vec& v, const Scalar& c = Scalar(1))
    {
        for (const auto& [row, x] : v)
            add_entry(col, row, c * x);
    }

    const Vec& column(const Key& col) const
    {
        static const Vec empty;
        auto it = columns_.find(col);
        return it == columns_.end() ? empty : it->second;
    }

    Scalar entry(const Key& col, const Key& row) const
    {
        const Vec& c = column(col);
        auto it = c.find(row);
        return it == c.end() ? Scalar(0) : it->second;
    }

    const std::map<Key, Vec>& columns() const { return columns_; }
    bool is_zero() const { return columns_.empty(); }

    std::size_t nonzeros() const
    {
        std::size_t n = 0;
        for (const auto& [k, v] : columns_)
            n += v.size();
        return n;
    }

    /// Applies the map to an element of its full source tensor product.
    Vec apply(const Vec& v) const
    {
        Vec out;
        for (const auto& [k, c] : v)
            axpy(out, c, column(k));
        return out;
    }

    GradedMap scaled(const Scalar& c) const
    {
        GradedMap out(source_, target_, degree_);
        if (sgn(c) == 0)
            return out;
        for (const auto& [k, v] : columns_) {
            Vec& col = out.columns_[k];
            for (const auto& [r, x] : v)
                col.emplace(r, c * x);
        }
        return out;
    }

    GradedMap& operator+=(const GradedMap& other)
    {
        require_same_shape(other, "addition");
        for (const auto& [k, v] : other.columns_) {
            Vec& col = columns_[k];
            axpy(col, Scalar(1), v);
            if (col.empty())
                columns_.erase(k);
        }
        return *this;
    }

    friend GradedMap operator+(GradedMap a, const GradedMap& b)
    {
        a += b;
        return a;
    }

    friend GradedMap operator-(GradedMap a, const GradedMap& b)
    {
        a += b.scaled(Scalar(-1));
        return a;
    }

    friend bool operator==(const GradedMap& a, const GradedMap& b)
    {
        return a.degree_ == b.degree_ && same_factors(a.source_, b.source_) && same_factors(a.target_, b.target_) &&
               a.columns_ == b.columns_;
    }

    void require_same_shape(const GradedMap& other, const char* what) const
    {
        if (degree_ != other.degree_ || !same_factors(source_, other.source_) ||
            !same_factors(target_, other.target_))
            throw std::invalid_argument(std::string(what) + " of maps with different source, target or degree");
    }

private:
    static void check_key(const Factors& f, const Key& k, const char* which)
    {
        if (k.size() != f.size())
            throw std::invalid_argument(std::string(which) + " key has wrong number of factors");
        for (std::size_t i = 0; i < k.size(); ++i)
            if (k[i] < 0 || static_cast<std::size_t>(k[i]) >= f[i]->dim())
                throw std::out_of_range(std::string(which) + " index out of range");
    }

    Factors source_;
    Factors target_;
    int degree_ = 0;
    std::map<Key, Vec> columns_;
};

/**
 * Applies id^{⊗pos} ⊗ op ⊗ id^{⊗rest} to v, an element of the tensor product `factors`.
 * The Koszul sign is (-1)^{|op|·deg(prefix)}.
 */
inline Vec apply_at(const GradedMap& op, std::size_t pos, const Vec& v, const Factors& factors)
{
    const std::size_t width = op.source_arity();
    if (pos + width > factors.size())
        throw std::invalid_argument("operator applied past the end of a tensor");
    Vec out;
    const bool odd = op.degree() % 2 != 0;
    for (const auto& [k, c] : v) {
        const Vec& col = op.column(k.slice(pos, width));
        if (col.empty())
            continue;
        Scalar coeff = c;
        if (odd) {
            int prefix = 0;
            for (std::size_t i = 0; i < pos; ++i)
                prefix += factors[i]->degree(static_cast<std::size_t>(k[i]));
            if (prefix % 2 != 0)
                coeff = -coeff;
        }
        for (const auto& [row, x] : col)
            add_term(out, k.splice(pos, width, row), coeff * x);
    }
    return out;
}

/// Factor list after replacing positions [pos, pos+arity) with op's target.
inline Factors replaced_factors(const Factors& factors, std::size_t pos, const GradedMap& op)
{
    Factors out(factors.begin(), factors.begin() + static_cast<std::ptrdiff_t>(pos));
    out.insert(out.end(), op.target().begin(), op.target().end());
    out.insert(out.end(), factors.begin() + static_cast<std::ptrdiff_t>(pos + op.source_arity()), factors.end());
    return out;
}

/// Koszul-signed differential on a tensor product: Σ_i id ⊗ d_i ⊗ id. Null entries are zero differentials.
inline Vec tensor_differential(const Vec& v, const Factors& factors, const std::vector<const GradedMap*>& diffs)
{
    Vec out;
    for (std::size_t i = 0; i < diffs.size(); ++i)
        if (diffs[i] && !diffs[i]->is_zero())
            axpy(out, Scalar(1), apply_at(*diffs[i], i, v, factors));
    return out;
}

/// Builds a map column by column from a function on basis tensors.
inline GradedMap from_function(const Factors& source, const Factors& target, int degree,
                               const std::function<Vec(const Key&)>& fn)
{
    GradedMap out(source, target, degree);
    for_each_key(source, [&](const Key& k) {
        Vec v = fn(k);
        if (!v.empty())
            out.add_column(k, v);
    });
    return out;
}

inline GradedMap identity_map(const SpacePtr& v)
{
    GradedMap id(v, v, 0);
    for (std::size_t i = 0; i < v->dim(); ++i)
        id.add_entry(i, i, Scalar(1));
    return id;
}

inline GradedMap zero_map(const SpacePtr& source, const SpacePtr& target, int degree)
{
    return GradedMap(source, target, degree);
}

/// g ∘ f. The target of f must equal the source of g.
inline GradedMap compose(const GradedMap& g, const GradedMap& f)
{
    if (!same_factors(f.target(), g.source())) {
        std::string where = "unknown degree";
        for (std::size_t i = 0; i < std::min(f.target().size(), g.source().size()); ++i) {
            const auto& a = *f.target()[i];
            const auto& b = *g.source()[i];
            for (int q : a.degrees())
                if (a.dim(q) != b.dim(q)) {
                    where = "degree " + std::to_string(q);
                    break;
                }
        }
        throw std::invalid_argument("composition shape mismatch at " + where);
    }
    GradedMap out(f.source(), g.target(), f.degree() + g.degree());
    for (const auto& [k, col] : f.columns()) {
        Vec v = g.apply(col);
        if (!v.empty())
            out.add_column(k, v);
    }
    return out;
}

/// (f ⊗ g)(v ⊗ w) = (-1)^{|g|·|v|} f(v) ⊗ g(w), as a map between concatenated factor lists.
inline GradedMap tensor_maps_factored(const GradedMap& f, const GradedMap& g)
{
    Factors src = f.source();
    src.insert(src.end(), g.source().begin(), g.source().end());
    Factors tgt = f.target();
    tgt.insert(tgt.end(), g.target().begin(), g.target().end());
    GradedMap out(src, tgt, f.degree() + g.degree());
    for (const auto& [kf, colf] : f.columns())
        for (const auto& [kg, colg] : g.columns()) {
            Key k = kf;
            for (std::size_t i = 0; i < kg.size(); ++i)
                k.push(kg[i]);
            int s = sign_of(static_cast<long>(g.degree()) * key_degree(f.source(), kf));
            for (const auto& [rf, xf] : colf)
                for (const auto& [rg, xg] : colg) {
                    Key r = rf;
                    for (std::size_t i = 0; i < rg.size(); ++i)
                        r.push(rg[i]);
                    out.add_entry(k, r, s * xf * xg);
                }
        }
    return out;
}

/// Re-expresses a map between factor lists as a single-factor map between flattened tensor spaces.
inline GradedMap flatten(const GradedMap& f, const SpacePtr& source, const SpacePtr& target)
{
    auto to_flat = [](const SpacePtr& space, const Factors& factors, const Key& k) -> std::size_t {
        if (factors.size() == 1 && !space->is_tensor())
            return static_cast<std::size_t>(k[0]);
        std::vector<std::uint32_t> parts(k.size());
        for (std::size_t i = 0; i < k.size(); ++i)
            parts[i] = static_cast<std::uint32_t>(k[i]);
        auto idx = space->find_parts(parts);
        if (!idx)
            throw std::invalid_argument("tensor key not present in flattened space");
        return *idx;
    };
    GradedMap out(source, target, f.degree());
    for (const auto& [k, col] : f.columns())
        for (const auto& [r, x] : col)
            out.add_entry(to_flat(source, f.source(), k), to_flat(target, f.target(), r), x);
    return out;
}

/// Tensor product of two single-factor maps, acting on the flattened tensor spaces.
inline GradedMap tensor_maps(const GradedMap& f, const GradedMap& g)
{
    auto factored = tensor_maps_factored(f, g);
    return flatten(factored, tensor_spaces(f.source_space(), g.source_space()),
                   tensor_spaces(f.target_space(), g.target_space()));
}

} // namespace dgmorse

#endif // DGMORSE_GRADED_MAP_HPP
