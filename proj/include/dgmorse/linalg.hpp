#ifndef DGMORSE_LINALG_HPP
#define DGMORSE_LINALG_HPP

#include "dgmorse/graded_map.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

namespace dgmorse {

/// Dense rational matrix, row-major.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = 1;
        return m;
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    static Matrix from_columns(const std::vector<std::vector<Scalar>>& cols, std::size_t rows)
    {
        Matrix m(rows, cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j)
            for (std::size_t i = 0; i < rows; ++i)
                m(i, j) = cols[j][i];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Scalar& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Scalar& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::vector<Scalar> column(std::size_t j) const
    {
        std::vector<Scalar> v(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            v[i] = (*this)(i, j);
        return v;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b)
    {
        if (a.cols_ != b.rows_)
            throw std::invalid_argument("matrix product shape mismatch");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Scalar& x = a(i, k);
                if (sgn(x) == 0)
                    continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    if (sgn(b(k, j)) != 0)
                        c(i, j) += x * b(k, j);
            }
        return c;
    }

    friend bool operator==(const Matrix& a, const Matrix& b)
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    bool is_zero() const
    {
        for (const auto& x : data_)
            if (sgn(x) != 0)
                return false;
        return true;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Scalar> data_;
};

/// Reduced row echelon form. Pivots are taken at the first nonzero entry in row order, column by column.
struct Echelon {
    Matrix reduced;
    std::vector<std::size_t> pivot_columns;
};

inline Echelon row_reduce(Matrix m)
{
    Echelon e;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t p = r;
        while (p < m.rows() && sgn(m(p, c)) == 0)
            ++p;
        if (p == m.rows())
            continue;
        if (p != r)
            for (std::size_t j = 0; j < m.cols(); ++j)
                std::swap(m(p, j), m(r, j));
        Scalar inv = 1 / m(r, c);
        for (std::size_t j = c; j < m.cols(); ++j)
            m(r, j) *= inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == r || sgn(m(i, c)) == 0)
                continue;
            Scalar f = m(i, c);
            for (std::size_t j = c; j < m.cols(); ++j)
                if (sgn(m(r, j)) != 0)
                    m(i, j) -= f * m(r, j);
        }
        e.pivot_columns.push_back(c);
        ++r;
    }
    e.reduced = std::move(m);
    return e;
}

inline std::size_t rank(const Matrix& m)
{
    return row_reduce(m).pivot_columns.size();
}

/// Basis of the null space; one vector per free column, with a 1 in that column.
inline std::vector<std::vector<Scalar>> kernel_basis(const Matrix& m)
{
    Echelon e = row_reduce(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : e.pivot_columns)
        is_pivot[c] = true;
    std::vector<std::vector<Scalar>> out;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f])
            continue;
        std::vector<Scalar> v(m.cols());
        v[f] = 1;
        for (std::size_t i = 0; i < e.pivot_columns.size(); ++i)
            v[e.pivot_columns[i]] = -e.reduced(i, f);
        out.push_back(std::move(v));
    }
    return out;
}

/// Solves A x = b; returns nullopt when b is not in the column space.
inline std::optional<std::vector<Scalar>> solve(const Matrix& a, const std::vector<Scalar>& b)
{
    Matrix aug(a.rows(), a.cols() + 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j)
            aug(i, j) = a(i, j);
        aug(i, a.cols()) = b[i];
    }
    Echelon e = row_reduce(aug);
    std::vector<Scalar> x(a.cols());
    for (std::size_t i = 0; i < e.pivot_columns.size(); ++i) {
        std::size_t c = e.pivot_columns[i];
        if (c == a.cols())
            return std::nullopt;
        x[c] = e.reduced(i, a.cols());
    }
    return x;
}

inline std::optional<Matrix> inverse(const Matrix& a)
{
    if (a.rows() != a.cols())
        return std::nullopt;
    const std::size_t n = a.rows();
    Matrix aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            aug(i, j) = a(i, j);
        aug(i, n + i) = 1;
    }
    Echelon e = row_reduce(aug);
    if (e.pivot_columns.size() < n || (n > 0 && e.pivot_columns[n - 1] != n - 1))
        return std::nullopt;
    Matrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            inv(i, j) = e.reduced(i, n + j);
    return inv;
}

/// Greedily selects, in order, the vectors that are independent of the ones already chosen.
inline std::vector<std::size_t> independent_subset(const std::vector<std::vector<Scalar>>& vectors, std::size_t length)
{
    std::vector<std::size_t> chosen;
    std::vector<std::vector<Scalar>> rows;
    std::vector<std::size_t> pivots;
    for (std::size_t idx = 0; idx < vectors.size(); ++idx) {
        std::vector<Scalar> w = vectors[idx];
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (sgn(w[pivots[r]]) == 0)
                continue;
            Scalar f = w[pivots[r]];
            for (std::size_t j = 0; j < length; ++j)
                w[j] -= f * rows[r][j];
        }
        std::size_t p = 0;
        while (p < length && sgn(w[p]) == 0)
            ++p;
        if (p == length)
            continue;
        Scalar inv = 1 / w[p];
        for (auto& x : w)
            x *= inv;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (sgn(rows[r][p]) == 0)
                continue;
            Scalar f = rows[r][p];
            for (std::size_t j = 0; j < length; ++j)
                rows[r][j] -= f * w[j];
        }
        rows.push_back(std::move(w));
        pivots.push_back(p);
        chosen.push_back(idx);
    }
    return chosen;
}

/// The block of a single-factor map from degree q of its source to degree q+|f| of its target.
inline Matrix block(const GradedMap& f, int q)
{
    const auto& src = *f.source_space();
    const auto& tgt = *f.target_space();
    auto [s0, s1] = src.range(q);
    auto [t0, t1] = tgt.range(q + f.degree());
    Matrix m(t1 - t0, s1 - s0);
    for (std::size_t j = s0; j < s1; ++j)
        for (const auto& [row, x] : f.column(Key{static_cast<std::int32_t>(j)}))
            m(static_cast<std::size_t>(row[0]) - t0, j - s0) = x;
    return m;
}

/// Dense coordinates of a sparse single-factor vector restricted to degree q.
inline std::vector<Scalar> dense_in_degree(const GradedSpace& space, int q, const Vec& v)
{
    auto [b, e] = space.range(q);
    std::vector<Scalar> out(e - b);
    for (const auto& [k, c] : v) {
        auto i = static_cast<std::size_t>(k[0]);
        if (i < b || i >= e)
            throw std::invalid_argument("vector has components outside degree " + std::to_string(q));
        out[i - b] = c;
    }
    return out;
}

inline Vec sparse_in_degree(const GradedSpace& space, int q, const std::vector<Scalar>& v)
{
    auto [b, e] = space.range(q);
    Vec out;
    for (std::size_t i = 0; i < e - b; ++i)
        if (sgn(v[i]) != 0)
            out.emplace(Key{static_cast<std::int32_t>(b + i)}, v[i]);
    return out;
}

/// Inverts a single-factor map of any degree, block by block. Throws naming the first singular source degree.
inline GradedMap invert_map(const GradedMap& f)
{
    if (f.source_arity() != 1 || f.target_arity() != 1)
        throw std::invalid_argument("only single-factor maps can be inverted");
    const auto& src = f.source_space();
    const auto& tgt = f.target_space();
    const int m = f.degree();
    std::vector<int> degrees = src->degrees();
    for (int q : tgt->degrees())
        degrees.push_back(q - m);
    std::sort(degrees.begin(), degrees.end());
    degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());
    GradedMap inv(tgt, src, -m);
    for (int q : degrees) {
        Matrix b = block(f, q);
        auto mi = inverse(b);
        if (!mi)
            throw std::domain_error("map is not invertible in degree " + std::to_string(q));
        auto s0 = src->range(q).first;
        auto t0 = tgt->range(q + m).first;
        for (std::size_t i = 0; i < mi->rows(); ++i)
            for (std::size_t j = 0; j < mi->cols(); ++j)
                if (sgn((*mi)(i, j)) != 0)
                    inv.add_entry(t0 + j, s0 + i, (*mi)(i, j));
    }
    return inv;
}

} // namespace dgmorse

#endif // DGMORSE_LINALG_HPP
