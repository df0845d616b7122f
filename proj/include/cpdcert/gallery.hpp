#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cpdcert/certify.hpp"
#include "cpdcert/tensor.hpp"

namespace cpdcert::gallery {

/// Built-in regression gallery: each case constructs a known decomposition
/// family, runs the relevant checks and compares against frozen expectations.

struct CaseResult {
    std::string name;
    bool pass = false;
    std::string message;
};

std::vector<std::string> case_names();

/// Runs all cases (or the one named by `only`); alpha parametrizes the
/// direction-analysis family, whose claims hold for every nonzero value.
std::vector<CaseResult> run_cases(const std::string& only = "", const Rational& alpha = Rational(1));

// ---- factor constructors, shared with the test suites ----

// 2x3x3 tensor with a 3-term decomposition and a 4-term one of the same tensor
FactorTriple<Rational> three_term_triple();
FactorTriple<Rational> four_term_triple();
// alternative second/third factors of the 4-term family, parametrized so the
// columns become proportional to the originals exactly at (-2/5, 1/15)
std::pair<MatQ, MatQ> sharpness_pair(const Rational& alpha, const Rational& beta);

FactorTriple<Rational> rank6_cube_triple();      // 5x5x5, R = 6
FactorTriple<Rational> rank5_cube_triple();      // 4x4x4, R = 5
FactorTriple<Rational> wide_third_triple();      // 5x5x8, R = 8
FactorTriple<Rational> identity_third_triple();  // 3x3x5, R = 5

// the printed 9x10 compound Khatri-Rao product of the identity-third pair
MatQ identity_third_product();
std::vector<Rational> identity_third_kernel_vector();

// 4x5 factors of the direction-analysis family
MatQ direction_factor_a(const Rational& alpha);
MatQ direction_factor_b();
MatQ direction_factor_c();

// 5x8 factors with an identity third factor and a mixed H profile
MatQ wide_third_hat_a();
MatQ wide_third_hat_b();

// structured rank-1 perturbation of the diagonal tensor: [I | masked vector]
MatQ masked_perturbation_factor(int zero_row, std::uint64_t seed);

}  // namespace cpdcert::gallery
