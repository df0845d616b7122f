#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

namespace cpdcert {

/// Exact scalar: arbitrary-precision rational, always canonical
/// (lowest terms, positive denominator). Float work uses plain double;
/// the two modes never mix inside one matrix.
using Rational = mpq_class;
using BigInt = mpz_class;

inline int sign(const Rational& q) { return sgn(q); }
inline int sign(double x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }
inline bool is_zero(double x) { return x == 0.0; }

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(double x) { return x; }

/// Parses "p/q", a plain integer, or nothing (nullopt on malformed input).
std::optional<Rational> rational_from_string(const std::string& text);

/// Canonical text form: "p" when the denominator is 1, else "p/q".
std::string to_string(const Rational& q);
std::string to_string(double x);

/// Numeric knobs threaded through the float instantiations. The exact
/// instantiations ignore every field: there is nothing to tune.
struct Tolerance {
    /// Absolute singular-value threshold for float rank decisions.
    /// Unset selects max(rows, cols) * eps * sigma_max.
    std::optional<double> rank_tol;
    /// Relative threshold classifying float vector entries as zero.
    double zero_rel = 1e-9;
    /// Relative mismatch allowed by float proportionality checks.
    double match_rel = 1e-6;
};

}  // namespace cpdcert
