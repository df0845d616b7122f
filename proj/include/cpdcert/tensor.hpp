#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "cpdcert/matrix.hpp"

namespace cpdcert {

/// Dense third-order tensor, entries in row-major (i, j, k) order.
template <class T>
class Tensor3 {
public:
    Tensor3(int i, int j, int k)
        : i_(i), j_(j), k_(k),
          t_(static_cast<std::size_t>(i) * j * k) {
        if (i <= 0 || j <= 0 || k <= 0)
            throw std::invalid_argument("Tensor3: dimensions must be positive");
    }

    int dim1() const { return i_; }
    int dim2() const { return j_; }
    int dim3() const { return k_; }

    T& operator()(int i, int j, int k) {
        return t_[(static_cast<std::size_t>(i) * j_ + j) * k_ + k];
    }
    const T& operator()(int i, int j, int k) const {
        return t_[(static_cast<std::size_t>(i) * j_ + j) * k_ + k];
    }

    const std::vector<T>& entries() const { return t_; }

private:
    int i_, j_, k_;
    std::vector<T> t_;
};

/// Factor matrices (A, B, C) of a polyadic decomposition in R terms.
/// All three share the column count and none has a zero column, mirroring the
/// requirement that every rank-1 term is nonzero.
template <class T>
struct FactorTriple {
    Matrix<T> A, B, C;

    FactorTriple(Matrix<T> a, Matrix<T> b, Matrix<T> c)
        : A(std::move(a)), B(std::move(b)), C(std::move(c)) {
        if (A.cols() != B.cols() || B.cols() != C.cols())
            throw std::invalid_argument("FactorTriple: factors must share the column count");
        if (A.cols() < 1) throw std::invalid_argument("FactorTriple: at least one term required");
        for (const Matrix<T>* m : {&A, &B, &C})
            for (int c = 0; c < m->cols(); ++c) {
                bool nonzero = false;
                for (int i = 0; i < m->rows() && !nonzero; ++i) nonzero = !is_zero((*m)(i, c));
                if (!nonzero) throw std::invalid_argument("FactorTriple: zero column in a factor");
            }
    }

    int terms() const { return A.cols(); }
};

/// Sum of R outer products: t_ijk = sum_r A(i,r) B(j,r) C(k,r).
template <class T>
Tensor3<T> from_factors(const FactorTriple<T>& f) {
    Tensor3<T> t(f.A.rows(), f.B.rows(), f.C.rows());
    for (int r = 0; r < f.terms(); ++r)
        for (int i = 0; i < f.A.rows(); ++i) {
            if (is_zero(f.A(i, r))) continue;
            for (int j = 0; j < f.B.rows(); ++j) {
                T ab = f.A(i, r) * f.B(j, r);
                if (is_zero(ab)) continue;
                for (int k = 0; k < f.C.rows(); ++k) t(i, j, k) += ab * f.C(k, r);
            }
        }
    return t;
}

/// Matrix unfoldings. The entry order of unfolding 1 is pinned by the tensor
/// entry map (i, j, k) <-> ((i-1)J+j, k); the other five follow the same
/// outer/inner convention for their Kronecker arrangements:
///   1: (A.B)C^T   2: (B.C)A^T   3: (C.A)B^T
///   4: (A.C)B^T   5: (B.A)C^T   6: (C.B)A^T
template <class T>
Matrix<T> unfold(const Tensor3<T>& t, int which) {
    const int I = t.dim1(), J = t.dim2(), K = t.dim3();
    auto fill = [&](int r1, int r2, int nc, auto index) {
        Matrix<T> m(r1 * r2, nc);
        for (int i = 0; i < I; ++i)
            for (int j = 0; j < J; ++j)
                for (int k = 0; k < K; ++k) {
                    auto [row, col] = index(i, j, k);
                    m(row, col) = t(i, j, k);
                }
        return m;
    };
    switch (which) {
        case 1: return fill(I, J, K, [&](int i, int j, int k) { return std::pair(i * J + j, k); });
        case 2: return fill(J, K, I, [&](int i, int j, int k) { return std::pair(j * K + k, i); });
        case 3: return fill(K, I, J, [&](int i, int j, int k) { return std::pair(k * I + i, j); });
        case 4: return fill(I, K, J, [&](int i, int j, int k) { return std::pair(i * K + k, j); });
        case 5: return fill(J, I, K, [&](int i, int j, int k) { return std::pair(j * I + i, k); });
        case 6: return fill(K, J, I, [&](int i, int j, int k) { return std::pair(k * J + j, i); });
        default: throw std::invalid_argument("unfold: which must be 1..6");
    }
}

/// Entrywise equality; float mode compares the max-abs difference against an
/// absolute tolerance (the regression tensors are all O(1)-scaled).
inline bool tensor_equals(const Tensor3<Rational>& a, const Tensor3<Rational>& b) {
    if (a.dim1() != b.dim1() || a.dim2() != b.dim2() || a.dim3() != b.dim3())
        throw std::invalid_argument("tensor_equals: shape mismatch");
    return a.entries() == b.entries();
}

inline bool tensor_equals(const Tensor3<double>& a, const Tensor3<double>& b, double tol) {
    if (a.dim1() != b.dim1() || a.dim2() != b.dim2() || a.dim3() != b.dim3())
        throw std::invalid_argument("tensor_equals: shape mismatch");
    for (std::size_t i = 0; i < a.entries().size(); ++i)
        if (std::abs(a.entries()[i] - b.entries()[i]) > tol) return false;
    return true;
}

/// Symmetric frontal slices: t_ijk == t_jik. Requires a square first pair.
template <class T>
bool is_sfs(const Tensor3<T>& t) {
    if (t.dim1() != t.dim2()) throw std::invalid_argument("is_sfs: first two dimensions differ");
    for (int i = 0; i < t.dim1(); ++i)
        for (int j = 0; j < i; ++j)
            for (int k = 0; k < t.dim3(); ++k)
                if (!(t(i, j, k) == t(j, i, k))) return false;
    return true;
}

}  // namespace cpdcert
