#ifndef DGMORSE_GRADED_SPACE_HPP
#define DGMORSE_GRADED_SPACE_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dgmorse {

struct BasisElement {
    int degree = 0;
    std::string label;
};

class GradedSpace;
using SpacePtr = std::shared_ptr<const GradedSpace>;

/**
 * Finite graded vector space with a labeled basis.
 *
 * The basis is flat: elements are sorted by degree, and within a degree they keep
 * the order in which they were declared. Tensor spaces additionally remember their
 * factors and, for every basis element, the tuple of factor indices it came from.
 */
class GradedSpace {
public:
    GradedSpace() = default;

    GradedSpace(std::vector<int> degrees, std::vector<BasisElement> basis)
    {
        std::stable_sort(basis.begin(), basis.end(),
                         [](const BasisElement& a, const BasisElement& b) { return a.degree < b.degree; });
        basis_ = std::move(basis);
        std::set<int> declared(degrees.begin(), degrees.end());
        for (const auto& b : basis_)
            declared.insert(b.degree);
        degrees_.assign(declared.begin(), declared.end());
        index_labels();
    }

    explicit GradedSpace(std::vector<BasisElement> basis) : GradedSpace({}, std::move(basis)) {}

    /// Builds from a degree -> labels table, the shape of graded_space.json.
    static GradedSpace from_table(const std::map<int, std::vector<std::string>>& table,
                                  std::vector<int> degrees = {})
    {
        std::vector<BasisElement> basis;
        for (const auto& [q, labels] : table) {
            degrees.push_back(q);
            for (const auto& l : labels)
                basis.push_back({q, l});
        }
        return GradedSpace(std::move(degrees), std::move(basis));
    }

    std::size_t dim() const { return basis_.size(); }

    std::size_t dim(int q) const
    {
        auto [b, e] = range(q);
        return e - b;
    }

    /// Half-open index range of the basis elements in degree q.
    std::pair<std::size_t, std::size_t> range(int q) const
    {
        auto lo = std::lower_bound(basis_.begin(), basis_.end(), q,
                                   [](const BasisElement& b, int d) { return b.degree < d; });
        auto hi = std::upper_bound(basis_.begin(), basis_.end(), q,
                                   [](int d, const BasisElement& b) { return d < b.degree; });
        return {static_cast<std::size_t>(lo - basis_.begin()), static_cast<std::size_t>(hi - basis_.begin())};
    }

    int degree(std::size_t i) const { return basis_.at(i).degree; }
    const std::string& label(std::size_t i) const { return basis_.at(i).label; }
    const std::vector<BasisElement>& basis() const { return basis_; }
    const std::vector<int>& degrees() const { return degrees_; }

    std::optional<std::size_t> find(int q, const std::string& label) const
    {
        auto it = lookup_.find({q, label});
        if (it == lookup_.end())
            return std::nullopt;
        return it->second;
    }

    /// Finds a label without knowing its degree; fails if it is absent or ambiguous.
    std::optional<std::size_t> find(const std::string& label) const
    {
        std::optional<std::size_t> hit;
        for (std::size_t i = 0; i < basis_.size(); ++i) {
            if (basis_[i].label == label) {
                if (hit)
                    return std::nullopt;
                hit = i;
            }
        }
        return hit;
    }

    std::size_t index(int q, const std::string& label) const
    {
        auto i = find(q, label);
        if (!i)
            throw std::out_of_range("no basis element '" + label + "' in degree " + std::to_string(q));
        return *i;
    }

    std::size_t index(const std::string& label) const
    {
        auto i = find(label);
        if (!i)
            throw std::out_of_range("no unique basis element '" + label + "'");
        return *i;
    }

    bool is_tensor() const { return !factors_.empty(); }
    const std::vector<SpacePtr>& factors() const { return factors_; }
    const std::vector<std::uint32_t>& parts(std::size_t i) const { return parts_.at(i); }

    std::optional<std::size_t> find_parts(const std::vector<std::uint32_t>& p) const
    {
        auto it = parts_lookup_.find(p);
        if (it == parts_lookup_.end())
            return std::nullopt;
        return it->second;
    }

    friend bool operator==(const GradedSpace& a, const GradedSpace& b)
    {
        if (a.basis_.size() != b.basis_.size())
            return false;
        for (std::size_t i = 0; i < a.basis_.size(); ++i)
            if (a.basis_[i].degree != b.basis_[i].degree || a.basis_[i].label != b.basis_[i].label)
                return false;
        return true;
    }

    friend SpacePtr tensor_product(const std::vector<SpacePtr>& factors);

private:
    void index_labels()
    {
        lookup_.clear();
        for (std::size_t i = 0; i < basis_.size(); ++i) {
            auto [it, fresh] = lookup_.emplace(std::make_pair(basis_[i].degree, basis_[i].label), i);
            if (!fresh)
                throw std::invalid_argument("duplicate basis label '" + basis_[i].label + "' in degree " +
                                            std::to_string(basis_[i].degree));
        }
    }

    std::vector<BasisElement> basis_;
    std::vector<int> degrees_;
    std::map<std::pair<int, std::string>, std::size_t> lookup_;
    std::vector<SpacePtr> factors_;
    std::vector<std::vector<std::uint32_t>> parts_;
    std::map<std::vector<std::uint32_t>, std::size_t> parts_lookup_;
};

inline SpacePtr make_space(std::vector<BasisElement> basis, std::vector<int> degrees = {})
{
    return std::make_shared<const GradedSpace>(std::move(degrees), std::move(basis));
}

inline bool same_space(const SpacePtr& a, const SpacePtr& b)
{
    return a == b || (a && b && *a == *b);
}

/// Same labels, every degree moved by k.
inline SpacePtr shifted_space(const SpacePtr& v, int k)
{
    std::vector<BasisElement> basis = v->basis();
    for (auto& b : basis)
        b.degree += k;
    std::vector<int> degrees = v->degrees();
    for (auto& q : degrees)
        q += k;
    return make_space(std::move(basis), std::move(degrees));
}

/**
 * Flattened tensor product. Basis elements are ordered by total degree and then
 * lexicographically by the tuple of factor indices; labels join factor labels with '|'.
 */
inline SpacePtr tensor_product(const std::vector<SpacePtr>& factors)
{
    struct Entry {
        int degree;
        std::vector<std::uint32_t> parts;
    };
    std::vector<Entry> entries;
    bool empty = false;
    for (const auto& f : factors)
        empty = empty || f->dim() == 0;
    if (!empty) {
        std::vector<std::uint32_t> cur(factors.size(), 0);
        bool more = true;
        while (more) {
            int deg = 0;
            for (std::size_t j = 0; j < factors.size(); ++j)
                deg += factors[j]->degree(cur[j]);
            entries.push_back({deg, cur});
            more = false;
            for (std::size_t j = factors.size(); j-- > 0;) {
                if (++cur[j] < factors[j]->dim()) {
                    more = true;
                    break;
                }
                cur[j] = 0;
            }
        }
    }
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.degree != b.degree)
            return a.degree < b.degree;
        return a.parts < b.parts;
    });

    std::set<int> degrees;
    if (!empty) {
        std::set<int> acc{0};
        for (const auto& f : factors) {
            std::set<int> next;
            for (int a : acc)
                for (int d : f->degrees())
                    next.insert(a + d);
            acc = std::move(next);
        }
        degrees = std::move(acc);
    }
    std::vector<BasisElement> basis;
    basis.reserve(entries.size());
    for (const auto& e : entries) {
        std::string label;
        for (std::size_t j = 0; j < e.parts.size(); ++j) {
            if (j)
                label += '|';
            label += factors[j]->label(e.parts[j]);
        }
        basis.push_back({e.degree, std::move(label)});
    }
    auto space = std::make_shared<GradedSpace>(std::vector<int>(degrees.begin(), degrees.end()), std::move(basis));
    space->factors_ = factors;
    space->parts_.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        space->parts_.push_back(entries[i].parts);
        space->parts_lookup_.emplace(entries[i].parts, i);
    }
    return space;
}

inline SpacePtr tensor_spaces(const SpacePtr& v, const SpacePtr& w)
{
    return tensor_product({v, w});
}

} // namespace dgmorse

#endif // DGMORSE_GRADED_SPACE_HPP
