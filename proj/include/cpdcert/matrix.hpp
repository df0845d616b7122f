#pragma once

#include <cmath>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

#include "cpdcert/scalar.hpp"
#include "cpdcert/subsets.hpp"

namespace cpdcert {

/// Raised when a compound matrix (or another order-dependent object) is not
/// defined for the requested order. Condition checks map this to NotApplicable.
struct NotDefinedError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Dense row-major matrix over an exact rational or a double scalar.
/// Values are immutable in spirit: every operation returns a fresh matrix,
/// so instances can be shared freely across threads.
template <class T>
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(int rows, int cols)
        : rows_(rows), cols_(cols), a_(checked_size(rows, cols)) {}
    Matrix(int rows, int cols, std::vector<T> entries)
        : rows_(rows), cols_(cols), a_(std::move(entries)) {
        if (a_.size() != checked_size(rows, cols))
            throw std::invalid_argument("Matrix: entry count does not match rows*cols");
    }
    Matrix(std::initializer_list<std::initializer_list<T>> rows) {
        rows_ = static_cast<int>(rows.size());
        cols_ = rows_ ? static_cast<int>(rows.begin()->size()) : 0;
        a_.reserve(checked_size(rows_, cols_));
        for (const auto& r : rows) {
            if (static_cast<int>(r.size()) != cols_)
                throw std::invalid_argument("Matrix: ragged initializer");
            for (const auto& v : r) a_.push_back(v);
        }
    }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    T& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    const T& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    std::span<const T> row(int i) const {
        return {a_.data() + static_cast<std::size_t>(i) * cols_, static_cast<std::size_t>(cols_)};
    }
    const std::vector<T>& entries() const { return a_; }

    std::vector<T> column(int j) const {
        std::vector<T> c(static_cast<std::size_t>(rows_));
        for (int i = 0; i < rows_; ++i) c[static_cast<std::size_t>(i)] = (*this)(i, j);
        return c;
    }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix operator*(const Matrix& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("Matrix multiply: inner dimensions differ");
        Matrix r(rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                const T& v = (*this)(i, k);
                if (is_zero(v)) continue;
                for (int j = 0; j < o.cols_; ++j) r(i, j) += v * o(k, j);
            }
        return r;
    }

    Matrix operator-(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("Matrix subtract: shape mismatch");
        Matrix r(rows_, cols_);
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
        return r;
    }

    /// Columns selected by strictly increasing 0-based indices.
    Matrix take_columns(std::span<const int> idx) const {
        Matrix r(rows_, static_cast<int>(idx.size()));
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < r.cols_; ++j) r(i, j) = (*this)(i, idx[static_cast<std::size_t>(j)]);
        return r;
    }

    Matrix drop_column(int j) const {
        std::vector<int> keep;
        keep.reserve(static_cast<std::size_t>(cols_ - 1));
        for (int c = 0; c < cols_; ++c)
            if (c != j) keep.push_back(c);
        return take_columns(keep);
    }

    /// [this | v] as one extra column.
    Matrix with_column(std::span<const T> v) const {
        if (static_cast<int>(v.size()) != rows_)
            throw std::invalid_argument("with_column: length must equal rows");
        Matrix r(rows_, cols_ + 1);
        for (int i = 0; i < rows_; ++i) {
            for (int j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j);
            r(i, cols_) = v[static_cast<std::size_t>(i)];
        }
        return r;
    }

    static Matrix hcat(const Matrix& a, const Matrix& b) {
        if (a.rows_ != b.rows_) throw std::invalid_argument("hcat: row counts differ");
        Matrix r(a.rows_, a.cols_ + b.cols_);
        for (int i = 0; i < a.rows_; ++i) {
            for (int j = 0; j < a.cols_; ++j) r(i, j) = a(i, j);
            for (int j = 0; j < b.cols_; ++j) r(i, a.cols_ + j) = b(i, j);
        }
        return r;
    }

private:
    static std::size_t checked_size(int rows, int cols) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative dimension");
        return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    }

    int rows_, cols_;
    std::vector<T> a_;
};

using MatQ = Matrix<Rational>;
using MatD = Matrix<double>;

/// Column-wise Kronecker product: column r of the result is a_r (x) b_r.
template <class T>
Matrix<T> khatri_rao(const Matrix<T>& a, const Matrix<T>& b) {
    if (a.cols() != b.cols())
        throw std::invalid_argument("khatri_rao: operands must share the column count");
    Matrix<T> r(a.rows() * b.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < b.rows(); ++j)
            for (int c = 0; c < a.cols(); ++c)
                r(i * b.rows() + j, c) = a(i, c) * b(j, c);
    return r;
}

template <class T>
Matrix<T> kronecker(const Matrix<T>& a, const Matrix<T>& b) {
    Matrix<T> r(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            if (is_zero(a(i, j))) continue;
            for (int p = 0; p < b.rows(); ++p)
                for (int q = 0; q < b.cols(); ++q)
                    r(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
        }
    return r;
}

/// Determinant of a small dense matrix; division-based elimination over the
/// field, which is exact for rationals.
template <class T>
T det(Matrix<T> m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("det: square matrix required");
    const int n = m.rows();
    if (n == 0) return T(1);
    if (n == 1) return m(0, 0);
    if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (n == 3)
        return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
               m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
               m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    T d(1);
    for (int c = 0; c < n; ++c) {
        int p = -1;
        if constexpr (std::is_same_v<T, double>) {
            double best = 0;
            for (int i = c; i < n; ++i)
                if (std::abs(m(i, c)) > best) { best = std::abs(m(i, c)); p = i; }
        } else {
            for (int i = c; i < n; ++i)
                if (!is_zero(m(i, c))) { p = i; break; }
        }
        if (p < 0) return T(0);
        if (p != c) {
            for (int j = c; j < n; ++j) std::swap(m(p, j), m(c, j));
            d = -d;
        }
        d *= m(c, c);
        for (int i = c + 1; i < n; ++i) {
            if (is_zero(m(i, c))) continue;
            T f = m(i, c) / m(c, c);
            for (int j = c + 1; j < n; ++j) m(i, j) -= f * m(c, j);
        }
    }
    return d;
}

/// m-th compound matrix: entry (S, T) is det M[S, T], with the row and column
/// subsets each enumerated lexicographically.
template <class T>
Matrix<T> compound(const Matrix<T>& m, int order) {
    if (order < 1 || order > std::min(m.rows(), m.cols()))
        throw NotDefinedError("compound: order outside 1..min(rows, cols)");
    const int nr = subset_count(m.rows(), order);
    const int nc = subset_count(m.cols(), order);
    Matrix<T> r(nr, nc);
    Matrix<T> sub(order, order);
    std::vector<int> rowset = first_subset(order);
    for (int i = 0; i < nr; ++i) {
        std::vector<int> colset = first_subset(order);
        for (int j = 0; j < nc; ++j) {
            for (int p = 0; p < order; ++p)
                for (int q = 0; q < order; ++q)
                    sub(p, q) = m(rowset[static_cast<std::size_t>(p)], colset[static_cast<std::size_t>(q)]);
            r(i, j) = det(sub);
            next_subset(m.cols(), colset);
        }
        next_subset(m.rows(), rowset);
    }
    return r;
}

}  // namespace cpdcert
