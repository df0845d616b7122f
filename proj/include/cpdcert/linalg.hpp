#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cpdcert/matrix.hpp"
#include "cpdcert/scalar.hpp"

namespace cpdcert {

/// Exact rank by fraction-free (Bareiss) elimination over big integers after
/// clearing row denominators; every verdict is a mathematical certificate.
int rank(const MatQ& m);

/// Float rank: number of singular values above the tolerance.
/// Unset tol selects max(rows, cols) * eps * sigma_max.
int rank(const MatD& m, std::optional<double> tol = {});

/// Basis of the right null space; empty exactly when m has full column rank.
/// Exact vectors are primitive integers (gcd 1, first nonzero positive).
std::vector<std::vector<Rational>> kernel_basis(const MatQ& m);
std::vector<std::vector<double>> kernel_basis(const MatD& m, std::optional<double> tol = {});

/// True iff rank([m | v]) == rank(m) under the same mode and tolerance.
bool in_range_of(std::span<const Rational> v, const MatQ& m);
bool in_range_of(std::span<const double> v, const MatD& m, std::optional<double> tol = {});

/// Full-column-rank predicate with a fast certified path: elimination modulo
/// a large prime proves full rank outright; only deficiency falls back to the
/// big-integer elimination.
bool full_column_rank(const MatQ& m);
bool full_column_rank(const MatD& m, std::optional<double> tol = {});

/// Full column rank of compound(a, order) (.) compound(b, order) in doubles
/// without materialising the product: Gram matrices of the two compounds are
/// combined entrywise and tested by pivoted Cholesky. Intended for products
/// whose own storage would be excessive.
bool khatri_rao_full_column_rank_float(const MatD& a_compound, const MatD& b_compound);

/// Rank of an integer matrix modulo the fixed prime 2^61 - 1; this is a lower
/// bound for the rational rank, so a full-rank result is a certificate.
int rank_modp(const std::vector<BigInt>& grid, int rows, int cols);

/// Row-denominator-cleared, row-gcd-reduced integer image of a rational
/// matrix. Row scaling preserves rank and null space.
std::vector<BigInt> to_integer_rows(const MatQ& m);

inline double default_float_rank_tol(int rows, int cols, double sigma_max) {
    return std::max(rows, cols) * 2.220446049250313e-16 * sigma_max;
}

// Mode-uniform dispatch used by the generic condition and certificate code.

template <class T>
int rank_t(const Matrix<T>& m, const Tolerance& tol = {}) {
    if constexpr (std::is_same_v<T, Rational>) { (void)tol; return rank(m); }
    else return rank(m, tol.rank_tol);
}

template <class T>
std::vector<std::vector<T>> kernel_basis_t(const Matrix<T>& m, const Tolerance& tol = {}) {
    if constexpr (std::is_same_v<T, Rational>) { (void)tol; return kernel_basis(m); }
    else return kernel_basis(m, tol.rank_tol);
}

template <class T>
bool in_range_of_t(std::span<const T> v, const Matrix<T>& m, const Tolerance& tol = {}) {
    if constexpr (std::is_same_v<T, Rational>) { (void)tol; return in_range_of(v, m); }
    else return in_range_of(v, m, tol.rank_tol);
}

template <class T>
bool full_column_rank_t(const Matrix<T>& m, const Tolerance& tol = {}) {
    if constexpr (std::is_same_v<T, Rational>) { (void)tol; return full_column_rank(m); }
    else return full_column_rank(m, tol.rank_tol);
}

}  // namespace cpdcert
