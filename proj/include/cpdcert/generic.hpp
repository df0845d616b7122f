#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpdcert/conditions.hpp"
#include "cpdcert/matrix.hpp"

namespace cpdcert {

struct MaskPattern {
    std::vector<std::pair<int, int>> zeros;  // (row, col), 0-based
};

/// What to draw: dense integers, structured (constant-diagonal Toeplitz or
/// constant-antidiagonal Hankel) generators, or a dense draw with a fixed
/// zero pattern. SFS marks the shared first/second factor of a symmetric
/// decomposition; the entries are drawn like Dense.
struct SamplerKind {
    enum class Kind { Dense, SFS, Toeplitz, Hankel, Masked };
    Kind kind = Kind::Dense;
    MaskPattern mask;

    static SamplerKind dense() { return {}; }
    static SamplerKind sfs() { return {Kind::SFS, {}}; }
    static SamplerKind toeplitz() { return {Kind::Toeplitz, {}}; }
    static SamplerKind hankel() { return {Kind::Hankel, {}}; }
    static SamplerKind masked(MaskPattern m) { return {Kind::Masked, std::move(m)}; }
};

/// Deterministic draw: integers uniform over [-20, 20] without 0, stored as
/// exact rationals. Identical (kind, rows, cols, seed) always reproduces the
/// same matrix.
MatQ sample_matrix(const SamplerKind& kind, int rows, int cols, std::uint64_t seed);

enum class WitnessMode { Exact, Float, Auto };

/// Outcome of a successful witness search: a single exact full-column-rank
/// witness certifies generic uniqueness; float findings are not certificates
/// and are flagged accordingly.
struct GenericVerdict {
    int terms = 0;        // R
    int condition = 0;    // 1..3: rotation of the overall proposition; SFS: 1..2
    int order = 0;        // compound order m used
    std::uint64_t witness_seed = 0;
    bool exact = false;
    std::string detail;
};

struct GenericOptions {
    int trials = 3;
    WitnessMode mode = WitnessMode::Auto;
    /// Auto mode: products with more entries than this use the float backend
    /// (flagged non-certified); smaller ones are decided exactly.
    std::int64_t exact_entry_guard = 1000000;
    /// Hard cap on compound product columns per probe; beyond it the Gram
    /// backend would need too much memory and the probe is rejected.
    int max_product_cols = 20000;
    std::array<SamplerKind, 3> kinds{SamplerKind::dense(), SamplerKind::dense(),
                                     SamplerKind::dense()};
};

/// Witness search across the three rotations of the generic-uniqueness
/// proposition; first success wins, nullopt when every rotation is exhausted
/// (never a non-uniqueness claim: the method is one-sided).
std::optional<GenericVerdict> generic_unique_cpd(int I, int J, int K, int R,
                                                 const GenericOptions& opts,
                                                 std::uint64_t seed);

/// Same protocol over the two conditions for symmetric-frontal-slice
/// decompositions of an I x I x K tensor.
std::optional<GenericVerdict> generic_unique_sfs(int I, int K, int R,
                                                 const GenericOptions& opts,
                                                 std::uint64_t seed);

/// Largest R with min(I,R) + min(J,R) + min(K,R) >= 2R + 2 (0 when none).
int kruskal_generic_bound(int I, int J, int K);

/// Closed-form comparison bounds with their applicability guards; fields are
/// absent when the guards reject the shape.
struct AgBounds {
    std::optional<long long> strassen;   // odd largest dim, near-balanced shapes
    std::optional<long long> two_power;  // 2^(alpha+beta-2)
    std::optional<long long> fcr;        // min((I-1)(J-1), K), dims sorted
    std::optional<long long> cubic;      // k(I) lookup, I = J = K <= 10
};
AgBounds ag_bounds(int I, int J, int K);

enum class TableKind { Two, Three, UmWm };

struct TableCell {
    int I = 0, J = 0, K = 0, R = 0;
    std::string verdict;    // "witness" / "none" / "infeasible" / table-specific
    std::string condition;  // "i" / "ii" / "iii" / "sfs-i" / "sfs-ii" / ...
    std::string mode;       // "exact" / "float" / "-"
    std::uint64_t seed = 0;
};

struct Table {
    std::string title;
    std::vector<std::string> provenance;  // "# ..." header lines
    std::string text;                     // aligned rendering
    std::vector<TableCell> cells;         // one row per probe
};

struct TableRanges {
    int i_lo = 4, i_hi = 9;
    int k_lo = 2, k_hi = 33;
};

Table make_table(TableKind which, const TableRanges& ranges, const GenericOptions& opts,
                 std::uint64_t seed);

std::string table_csv(const Table& t);

}  // namespace cpdcert
