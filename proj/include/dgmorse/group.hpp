#ifndef DGMORSE_GROUP_HPP
#define DGMORSE_GROUP_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgmorse {

/**
 * Finite group given by a multiplication table over labeled elements.
 *
 * Elements are referred to by their index in declaration order. The group axioms
 * are checked when the table is loaded.
 */
class FiniteGroup {
public:
    FiniteGroup() = default;

    FiniteGroup(std::string name, std::vector<std::string> labels, std::vector<std::vector<std::size_t>> table)
        : name_(std::move(name)), labels_(std::move(labels)), table_(std::move(table))
    {
        validate();
    }

    const std::string& name() const { return name_; }
    std::size_t order() const { return labels_.size(); }
    const std::string& label(std::size_t g) const { return labels_.at(g); }
    const std::vector<std::string>& labels() const { return labels_; }
    std::size_t identity() const { return identity_; }
    std::size_t multiply(std::size_t g, std::size_t h) const { return table_[g][h]; }
    std::size_t inverse(std::size_t g) const { return inverse_.at(g); }
    const std::vector<std::vector<std::size_t>>& table() const { return table_; }

    std::size_t index(const std::string& label) const
    {
        for (std::size_t g = 0; g < labels_.size(); ++g)
            if (labels_[g] == label)
                return g;
        throw std::invalid_argument("group " + name_ + " has no element '" + label + "'");
    }

    bool is_abelian() const
    {
        for (std::size_t g = 0; g < order(); ++g)
            for (std::size_t h = 0; h < order(); ++h)
                if (table_[g][h] != table_[h][g])
                    return false;
        return true;
    }

private:
    void validate()
    {
        const std::size_t n = labels_.size();
        if (n == 0)
            throw std::invalid_argument("group table is empty");
        if (table_.size() != n)
            throw std::invalid_argument("group table must be square");
        for (const auto& row : table_) {
            if (row.size() != n)
                throw std::invalid_argument("group table must be square");
            for (auto x : row)
                if (x >= n)
                    throw std::invalid_argument("group table entry out of range");
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (labels_[i] == labels_[j])
                    throw std::invalid_argument("duplicate group element '" + labels_[i] + "'");
        std::optional<std::size_t> e;
        for (std::size_t g = 0; g < n && !e; ++g) {
            bool ok = true;
            for (std::size_t h = 0; h < n && ok; ++h)
                ok = table_[g][h] == h && table_[h][g] == h;
            if (ok)
                e = g;
        }
        if (!e)
            throw std::invalid_argument("group table has no identity");
        identity_ = *e;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t c = 0; c < n; ++c)
                    if (table_[table_[a][b]][c] != table_[a][table_[b][c]])
                        throw std::invalid_argument("group table is not associative at (" + labels_[a] + ", " +
                                                    labels_[b] + ", " + labels_[c] + ")");
        inverse_.assign(n, n);
        for (std::size_t g = 0; g < n; ++g)
            for (std::size_t h = 0; h < n; ++h)
                if (table_[g][h] == identity_)
                    inverse_[g] = h;
        for (std::size_t g = 0; g < n; ++g)
            if (inverse_[g] == n || table_[inverse_[g]][g] != identity_)
                throw std::invalid_argument("element '" + labels_[g] + "' has no inverse");
    }

    std::string name_;
    std::vector<std::string> labels_;
    std::vector<std::vector<std::size_t>> table_;
    std::size_t identity_ = 0;
    std::vector<std::size_t> inverse_;
};

/// ℤ/m with elements 1, s, s^2, ..., s^{m-1}.
inline FiniteGroup cyclic_group(std::size_t m)
{
    if (m == 0)
        throw std::invalid_argument("cyclic group of order 0");
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < m; ++k)
        labels.push_back(k == 0 ? "1" : k == 1 ? "s" : "s^" + std::to_string(k));
    std::vector<std::vector<std::size_t>> table(m, std::vector<std::size_t>(m));
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
            table[a][b] = (a + b) % m;
    return FiniteGroup("C" + std::to_string(m), std::move(labels), std::move(table));
}

/**
 * Generalized quaternion group Q_{4m} = <a, b | a^{2m} = 1, b^2 = a^m, b a b^{-1} = a^{-1}>.
 * Element a^k b^e sits at index 2m·e + k. For m = 2 the labels are 1, -1, i, -i, j, -j, k, -k.
 */
inline FiniteGroup quaternion_group(std::size_t m)
{
    if (m < 2)
        throw std::invalid_argument("quaternion group needs m >= 2");
    const std::size_t n = 2 * m;
    auto idx = [n](std::size_t k, std::size_t e) { return n * e + k % n; };
    std::vector<std::vector<std::size_t>> table(2 * n, std::vector<std::size_t>(2 * n));
    for (std::size_t e1 = 0; e1 < 2; ++e1)
        for (std::size_t k1 = 0; k1 < n; ++k1)
            for (std::size_t e2 = 0; e2 < 2; ++e2)
                for (std::size_t k2 = 0; k2 < n; ++k2) {
                    // a^k1 b^e1 · a^k2 b^e2 = a^{k1 ± k2} b^{e1+e2}, with b^2 = a^m
                    std::size_t k = e1 == 0 ? k1 + k2 : k1 + n - k2;
                    std::size_t e = e1 + e2;
                    if (e == 2) {
                        k += m;
                        e = 0;
                    }
                    table[idx(k1, e1)][idx(k2, e2)] = idx(k, e);
                }
    std::vector<std::string> labels;
    for (std::size_t e = 0; e < 2; ++e)
        for (std::size_t k = 0; k < n; ++k) {
            std::string s = k == 0 ? (e ? "" : "1") : k == 1 ? "a" : "a^" + std::to_string(k);
            labels.push_back(s + (e ? "b" : ""));
        }
    FiniteGroup raw("Q" + std::to_string(4 * m), labels, table);
    if (m != 2)
        return raw;
    // Relabel Q8 as ±1, ±i, ±j, ±k, declared in that order.
    const std::vector<std::pair<std::size_t, std::string>> order = {
        {idx(0, 0), "1"}, {idx(2, 0), "-1"}, {idx(1, 0), "i"}, {idx(3, 0), "-i"},
        {idx(0, 1), "j"}, {idx(2, 1), "-j"}, {idx(1, 1), "k"}, {idx(3, 1), "-k"}};
    std::vector<std::size_t> pos(8);
    for (std::size_t t = 0; t < 8; ++t)
        pos[order[t].first] = t;
    std::vector<std::string> q8labels;
    std::vector<std::vector<std::size_t>> q8(8, std::vector<std::size_t>(8));
    for (std::size_t t = 0; t < 8; ++t) {
        q8labels.push_back(order[t].second);
        for (std::size_t u = 0; u < 8; ++u)
            q8[t][u] = pos[table[order[t].first][order[u].first]];
    }
    return FiniteGroup("Q8", std::move(q8labels), std::move(q8));
}

/// Built-in groups by name: C<m> or Z<m> for cyclic groups, Q<4m> for quaternion groups.
inline FiniteGroup named_group(const std::string& name)
{
    auto number = [&](std::size_t from) -> std::size_t {
        std::string digits = name.substr(from);
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("unknown group '" + name + "'");
        return static_cast<std::size_t>(std::stoul(digits));
    };
    if (name.rfind("Z/", 0) == 0)
        return cyclic_group(number(2));
    if (!name.empty() && (name[0] == 'C' || name[0] == 'Z'))
        return cyclic_group(number(1));
    if (!name.empty() && name[0] == 'Q') {
        std::size_t order = number(1);
        if (order % 4 != 0 || order < 8)
            throw std::invalid_argument("quaternion group order must be a multiple of 4, at least 8");
        return quaternion_group(order / 4);
    }
    throw std::invalid_argument("unknown group '" + name + "'");
}

/// Conjugacy classes, each sorted by declaration index; the first entry is the class representative.
inline std::vector<std::vector<std::size_t>> conjugacy_classes(const FiniteGroup& G)
{
    const std::size_t n = G.order();
    std::vector<bool> seen(n, false);
    std::vector<std::vector<std::size_t>> classes;
    for (std::size_t g = 0; g < n; ++g) {
        if (seen[g])
            continue;
        std::vector<bool> member(n, false);
        for (std::size_t h = 0; h < n; ++h)
            member[G.multiply(G.multiply(h, g), G.inverse(h))] = true;
        std::vector<std::size_t> cls;
        for (std::size_t x = 0; x < n; ++x)
            if (member[x]) {
                cls.push_back(x);
                seen[x] = true;
            }
        classes.push_back(std::move(cls));
    }
    return classes;
}

/// For each element, the index of its class in conjugacy_classes(G).
inline std::vector<std::size_t> class_index(const FiniteGroup& G)
{
    std::vector<std::size_t> out(G.order());
    auto classes = conjugacy_classes(G);
    for (std::size_t c = 0; c < classes.size(); ++c)
        for (auto g : classes[c])
            out[g] = c;
    return out;
}

} // namespace dgmorse

#endif // DGMORSE_GROUP_HPP
