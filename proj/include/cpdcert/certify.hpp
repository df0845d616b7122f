#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cpdcert/conditions.hpp"
#include "cpdcert/tensor.hpp"

namespace cpdcert {

/// Conclusion tiers, strongest first. NecessaryViolated means: if the
/// decomposition is canonical (r_T = R), it is not unique — the necessary
/// conditions presuppose canonicity, so nothing stronger may be claimed.
enum class Tier { UniqueCPD, ThirdFactorUnique, NecessaryViolated, Inconclusive };

std::string to_string(Tier t);

struct ConditionRecord {
    std::string condition;  // "K", "C", "H", "U", "W", "C1", "common-one", ...
    std::string roles;      // factor names in evaluation order, e.g. "(A,B)" or "(A,B;C)"
    int order = 0;          // m, or 0 when the condition has no order
    Verdict verdict = Verdict::Unknown;
    std::string detail;
    std::vector<std::vector<std::string>> witnesses;
};

struct FiredRule {
    std::string rule;
    std::string roles;
    Tier tier = Tier::Inconclusive;
    std::string note;
};

/// Full evaluation record: inputs, computed quantities, every condition
/// verdict, the rules that fired, and the strongest supported conclusion.
struct Certificate {
    int dim1 = 0, dim2 = 0, dim3 = 0, terms = 0;
    bool exact = false;
    bool sfs = false;
    std::array<int, 3> ranks{};   // r_A, r_B, r_C
    std::array<int, 3> kranks{};  // k_A, k_B, k_C
    std::array<int, 3> orders{};  // m_X = R - r_X + 2
    std::vector<ConditionRecord> table;
    std::vector<FiredRule> fired;
    Tier tier = Tier::Inconclusive;
    int unique_third_role = -1;  // 0-based factor index when ThirdFactorUnique
    bool necessary_violated = false;
    bool necessary_all_hold = false;

    std::string summary() const;
};

struct CertifyOptions {
    CheckOptions check;
    /// Evaluate every role assignment (default) or only the given order.
    bool all_roles = true;
};

/// The three necessary conditions for uniqueness of a canonical PD:
/// min k-rank >= 2, pairwise Khatri-Rao full column rank, and (U2) for all
/// pairs. Definite failure marks the certificate NecessaryViolated.
template <class T>
struct NecessaryReport {
    bool violated = false;
    bool all_hold = false;
    std::vector<ConditionRecord> records;
};

template <class T>
NecessaryReport<T> necessary_conditions(const FactorTriple<T>& f,
                                        const CertifyOptions& opts = {});

/// Inequality of the one-common-factor proposition,
/// max(min(k_X, k_Y - 1), min(k_X - 1, k_Y)) + k_Z >= R + 1,
/// with the factor in `common_role` (0-based) taken as the shared one.
template <class T>
ConditionOutcome<T> check_common_one(const FactorTriple<T>& f, int common_role,
                                     const CertifyOptions& opts = {});

/// Either line of the two-common-factor proposition.
template <class T>
ConditionOutcome<T> check_common_two(const FactorTriple<T>& f,
                                     const CertifyOptions& opts = {});

/// Full cascade. Rules are all evaluated (no first-hit stop) so the
/// certificate documents the complete condition table; the tier is the
/// strongest over fired rules.
template <class T>
Certificate certify(const FactorTriple<T>& f, const CertifyOptions& opts = {});

/// Certifier for decompositions with symmetric frontal slices (shared first
/// and second factor). Conclusions always route through unsymmetric
/// uniqueness; the certificate carries an SFS marker.
template <class T>
Certificate certify_sfs(const Matrix<T>& a, const Matrix<T>& c,
                        const CertifyOptions& opts = {});

}  // namespace cpdcert
