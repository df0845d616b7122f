#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpdcert/linalg.hpp"
#include "cpdcert/matrix.hpp"

namespace cpdcert {

/// Four-valued outcome of a named condition. Fails of (Um)/(Wm) carries the
/// witnesses d that violate the condition; NotApplicable marks orders at
/// which a required compound matrix is not defined.
enum class Verdict { Holds, Fails, Unknown, NotApplicable };

std::string to_string(Verdict v);

template <class T>
struct ConditionOutcome {
    Verdict verdict = Verdict::Unknown;
    std::vector<std::vector<T>> witnesses;
    std::string detail;

    bool holds() const { return verdict == Verdict::Holds; }
    bool fails() const { return verdict == Verdict::Fails; }
};

/// Largest k such that every k-column subset is linearly independent;
/// 0 when some column is zero. Ascends k and stops at the first dependent
/// subset, subsets enumerated lexicographically.
int krank(const MatQ& m);
int krank(const MatD& m, std::optional<double> tol = {});

/// H_AB(delta) = min over delta-column subsets of (r_A~ + r_B~ - delta),
/// exhaustive over all subsets; values indexed by delta = 1..R.
struct HProfile {
    std::vector<int> values;
    int operator()(int delta) const { return values[static_cast<std::size_t>(delta - 1)]; }
    int terms() const { return static_cast<int>(values.size()); }
};

HProfile h_profile(const MatQ& a, const MatQ& b);
HProfile h_profile(const MatD& a, const MatD& b, std::optional<double> tol = {});

template <class T>
int krank_t(const Matrix<T>& m, const Tolerance& tol = {}) {
    if constexpr (std::is_same_v<T, Rational>) { (void)tol; return krank(m); }
    else return krank(m, tol.rank_tol);
}

template <class T>
HProfile h_profile_t(const Matrix<T>& a, const Matrix<T>& b, const Tolerance& tol = {}) {
    if constexpr (std::is_same_v<T, Rational>) { (void)tol; return h_profile(a, b); }
    else return h_profile(a, b, tol.rank_tol);
}

/// All products of m distinct coordinates of d, lexicographic subset order.
template <class T>
std::vector<T> hat_vector(std::span<const T> d, int m);

/// Inverse problem behind the (Um)/(Wm) deciders: find d with
/// hat_vector(d, m) proportional to v and at least m nonzero entries.
/// The d is unique up to one global scalar; nullopt when the nonzero pattern
/// of v is not the full set of m-subsets of some support, or when the product
/// ratios are inconsistent.
template <class T>
std::optional<std::vector<T>> reconstruct_from_hat(std::span<const T> v, int m, int R,
                                                   const Tolerance& tol = {});

struct CheckOptions {
    Tolerance tol;
    /// Exhaustive support-pattern search for kernels of dimension >= 2
    /// (exact mode only); beyond the gate the verdict degrades to Unknown.
    bool support_search = true;
    int support_search_max_terms = 12;
};

// The condition lattice on an ordered factor pair (and C for (Wm)).

template <class T>
ConditionOutcome<T> check_K(const Matrix<T>& a, const Matrix<T>& b, int m,
                            const CheckOptions& opts = {});
template <class T>
ConditionOutcome<T> check_C(const Matrix<T>& a, const Matrix<T>& b, int m,
                            const CheckOptions& opts = {});
template <class T>
ConditionOutcome<T> check_H(const Matrix<T>& a, const Matrix<T>& b, int m,
                            const CheckOptions& opts = {});
template <class T>
ConditionOutcome<T> check_U(const Matrix<T>& a, const Matrix<T>& b, int m,
                            const CheckOptions& opts = {});
template <class T>
ConditionOutcome<T> check_W(const Matrix<T>& a, const Matrix<T>& b, const Matrix<T>& c,
                            int m, const CheckOptions& opts = {});

/// Shared analysis behind check_U / check_W, exposed for table generation:
/// kernel dimension of the compound Khatri-Rao product plus every valid
/// witness direction found.
template <class T>
struct UAnalysis {
    Verdict verdict = Verdict::Unknown;
    std::string route;
    int product_rows = 0, product_cols = 0;
    int kernel_dim = 0;
    std::vector<std::vector<T>> witnesses;
    /// True when the witness list provably covers every solution ray.
    bool witnesses_exhaustive = false;
};

template <class T>
UAnalysis<T> analyze_U(const Matrix<T>& a, const Matrix<T>& b, int m,
                       const CheckOptions& opts = {});

/// Per-column analysis of { x : omega(M^T x) = 1 with the nonzero at that
/// column }: the set is nonempty exactly when the column lies outside the
/// span of the others, and the direction is unique when the kernel of the
/// remaining columns (transposed) is one-dimensional.
template <class T>
struct ColumnDirection {
    int column = 0;
    int others_rank = 0;
    int kernel_dim = 0;
    bool in_span = false;
    bool nonempty = false;
    std::optional<std::vector<T>> direction;
};

template <class T>
std::vector<ColumnDirection<T>> one_nonzero_directions(const Matrix<T>& m,
                                                       const Tolerance& tol = {});

}  // namespace cpdcert
