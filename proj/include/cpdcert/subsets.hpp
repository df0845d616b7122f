#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cpdcert {

/// Binomial coefficient C(n, k). Throws std::overflow_error past 2^62.
std::int64_t binomial(int n, int k);

/// C(n, m) checked against the limits of an addressable array dimension.
int subset_count(int n, int m);

/// m-element subsets of {0, ..., n-1} in lexicographic order.
///
/// The enumeration order is the single source of truth for compound-matrix
/// axes and for hat-vector indexing; subset_at and subset_index convert
/// between a position in that order and the subset itself.
std::vector<int> subset_at(int n, int m, std::int64_t index);
std::int64_t subset_index(int n, int m, std::span<const int> members);

/// In-place lexicographic successor. Returns false after the last subset.
bool next_subset(int n, std::vector<int>& s);

/// First subset {0, ..., m-1}.
std::vector<int> first_subset(int m);

}  // namespace cpdcert
