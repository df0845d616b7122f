#include "cpdcert/generic.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <stdexcept>

#include "cpdcert/linalg.hpp"
#include "cpdcert/subsets.hpp"

namespace cpdcert {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed ^ (salt + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

int draw_nonzero(std::mt19937_64& gen) {
    // uniform over [-20, 20] \ {0}; avoids the distribution classes on purpose,
    // their output is not pinned across standard library implementations
    int v = static_cast<int>(gen() % 40) + 1;
    return v <= 20 ? v : 20 - v;
}

MatQ to_exact(const std::vector<int>& vals, int rows, int cols) {
    MatQ m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            m(i, j) = Rational(vals[static_cast<std::size_t>(i) * cols + j]);
    return m;
}

MatD to_float(const MatQ& m) {
    MatD d(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) d(i, j) = to_double(m(i, j));
    return d;
}

}  // namespace

MatQ sample_matrix(const SamplerKind& kind, int rows, int cols, std::uint64_t seed) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("sample_matrix: dimensions must be positive");
    std::mt19937_64 gen(seed);
    switch (kind.kind) {
        case SamplerKind::Kind::Dense:
        case SamplerKind::Kind::SFS: {
            std::vector<int> v(static_cast<std::size_t>(rows) * cols);
            for (auto& x : v) x = draw_nonzero(gen);
            return to_exact(v, rows, cols);
        }
        case SamplerKind::Kind::Toeplitz: {
            std::vector<int> g(static_cast<std::size_t>(rows + cols - 1));
            for (auto& x : g) x = draw_nonzero(gen);
            MatQ m(rows, cols);
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < cols; ++j)
                    m(i, j) = Rational(g[static_cast<std::size_t>(j - i + rows - 1)]);
            return m;
        }
        case SamplerKind::Kind::Hankel: {
            std::vector<int> g(static_cast<std::size_t>(rows + cols - 1));
            for (auto& x : g) x = draw_nonzero(gen);
            MatQ m(rows, cols);
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < cols; ++j) m(i, j) = Rational(g[static_cast<std::size_t>(i + j)]);
            return m;
        }
        case SamplerKind::Kind::Masked: {
            std::vector<int> v(static_cast<std::size_t>(rows) * cols);
            for (auto& x : v) x = draw_nonzero(gen);
            std::vector<int> masked_per_col(static_cast<std::size_t>(cols), 0);
            for (auto [r, c] : kind.mask.zeros) {
                if (r < 0 || r >= rows || c < 0 || c >= cols)
                    throw std::invalid_argument("sample_matrix: mask position out of bounds");
                v[static_cast<std::size_t>(r) * cols + c] = 0;
                ++masked_per_col[static_cast<std::size_t>(c)];
            }
            for (int c = 0; c < cols; ++c)
                if (masked_per_col[static_cast<std::size_t>(c)] >= rows)
                    throw std::invalid_argument("sample_matrix: mask forces a zero column");
            return to_exact(v, rows, cols);
        }
    }
    throw std::logic_error("sample_matrix: unknown kind");
}

namespace {

struct Probe {
    int m = 0;
    std::int64_t rows = 0, cols = 0;
    bool feasible = false;
};

/// Dimensional feasibility of "compound(X, m) (.) compound(Y, m) has full
/// column rank" for X: rx x R, Y: ry x R and m = R - min(third, R) + 2.
Probe probe_of(int rx, int ry, int R, int third_dim) {
    Probe p;
    p.m = R - std::min(third_dim, R) + 2;
    if (p.m < 1 || p.m > std::min(rx, R) || p.m > std::min(ry, R)) return p;
    p.rows = binomial(rx, p.m) * binomial(ry, p.m);
    p.cols = binomial(R, p.m);
    p.feasible = p.rows >= p.cols;
    return p;
}

bool exact_mode_for(const GenericOptions& opts, const Probe& p) {
    switch (opts.mode) {
        case WitnessMode::Exact: return true;
        case WitnessMode::Float: return false;
        case WitnessMode::Auto: return p.rows * p.cols <= opts.exact_entry_guard;
    }
    return true;
}

/// One full-column-rank witness attempt on freshly sampled factors.
bool fcr_witness(const MatQ& x, const MatQ& y, int m, bool exact) {
    if (exact) return full_column_rank(khatri_rao(compound(x, m), compound(y, m)));
    return khatri_rao_full_column_rank_float(compound(to_float(x), m), compound(to_float(y), m));
}

}  // namespace

std::optional<GenericVerdict> generic_unique_cpd(int I, int J, int K, int R,
                                                 const GenericOptions& opts,
                                                 std::uint64_t seed) {
    if (R < 1) throw std::invalid_argument("generic_unique_cpd: R must be positive");
    struct Rot {
        int cond;
        int rx, ry, third;
        int kx, ky;  // sampler kind indices
    };
    const Rot rots[3] = {{1, I, J, K, 0, 1}, {2, J, K, I, 1, 2}, {3, K, I, J, 2, 0}};
    for (const Rot& rot : rots) {
        Probe p = probe_of(rot.rx, rot.ry, R, rot.third);
        if (!p.feasible) continue;
        if (p.cols > opts.max_product_cols)
            throw std::invalid_argument("generic_unique_cpd: probe beyond the size guard (" +
                                        std::to_string(p.rows) + "x" + std::to_string(p.cols) + ")");
        bool exact = exact_mode_for(opts, p);
        for (int t = 0; t < opts.trials; ++t) {
            std::uint64_t sx = mix_seed(seed, 1000003ULL * static_cast<std::uint64_t>(rot.cond) + 2 * static_cast<std::uint64_t>(t));
            std::uint64_t sy = mix_seed(seed, 1000003ULL * static_cast<std::uint64_t>(rot.cond) + 2 * static_cast<std::uint64_t>(t) + 1);
            MatQ x = sample_matrix(opts.kinds[static_cast<std::size_t>(rot.kx)], rot.rx, R, sx);
            MatQ y = sample_matrix(opts.kinds[static_cast<std::size_t>(rot.ky)], rot.ry, R, sy);
            if (fcr_witness(x, y, p.m, exact)) {
                GenericVerdict v;
                v.terms = R;
                v.condition = rot.cond;
                v.order = p.m;
                v.witness_seed = sx;
                v.exact = exact;
                v.detail = std::to_string(p.rows) + "x" + std::to_string(p.cols) +
                           " compound product has full column rank";
                return v;
            }
        }
    }
    return std::nullopt;
}

std::optional<GenericVerdict> generic_unique_sfs(int I, int K, int R,
                                                 const GenericOptions& opts,
                                                 std::uint64_t seed) {
    if (R < 1) throw std::invalid_argument("generic_unique_sfs: R must be positive");
    // condition 1: compound(A, m_C) (.) compound(A, m_C); condition 2:
    // compound(A, m_A) (.) compound(C, m_A)
    for (int cond = 1; cond <= 2; ++cond) {
        Probe p = cond == 1 ? probe_of(I, I, R, K) : probe_of(I, K, R, I);
        if (!p.feasible) continue;
        if (p.cols > opts.max_product_cols)
            throw std::invalid_argument("generic_unique_sfs: probe beyond the size guard");
        bool exact = exact_mode_for(opts, p);
        for (int t = 0; t < opts.trials; ++t) {
            std::uint64_t sa = mix_seed(seed, 7000003ULL * static_cast<std::uint64_t>(cond) + 2 * static_cast<std::uint64_t>(t));
            std::uint64_t sc = mix_seed(seed, 7000003ULL * static_cast<std::uint64_t>(cond) + 2 * static_cast<std::uint64_t>(t) + 1);
            MatQ a = sample_matrix(SamplerKind::sfs(), I, R, sa);
            bool ok = cond == 1
                          ? fcr_witness(a, a, p.m, exact)
                          : fcr_witness(a, sample_matrix(opts.kinds[2], K, R, sc), p.m, exact);
            if (ok) {
                GenericVerdict v;
                v.terms = R;
                v.condition = cond;
                v.order = p.m;
                v.witness_seed = sa;
                v.exact = exact;
                v.detail = std::to_string(p.rows) + "x" + std::to_string(p.cols) +
                           " compound product has full column rank";
                return v;
            }
        }
    }
    return std::nullopt;
}

int kruskal_generic_bound(int I, int J, int K) {
    int best = 0;
    for (int R = 1; R <= (I + J + K) / 2 + 2; ++R)
        if (std::min(I, R) + std::min(J, R) + std::min(K, R) >= 2 * R + 2) best = R;
    return best;
}

AgBounds ag_bounds(int I, int J, int K) {
    AgBounds b;
    int d[3] = {I, J, K};
    std::sort(d, d + 3);
    const long long d1 = d[0], d2 = d[1], d3 = d[2];
    if (d1 >= 3 && d3 % 2 == 1 && d3 - 1 <= (d1 - 1) * (d2 - 1))
        b.strassen = std::max(0LL, d1 * d2 * d3 / (d1 + d2 + d3 - 2) - d3);
    if (d1 >= 2) {
        int alpha = 0, beta = 0;
        while ((1LL << (alpha + 1)) <= d1) ++alpha;
        while ((1LL << (beta + 1)) <= d2) ++beta;
        b.two_power = 1LL << (alpha + beta - 2);
    }
    b.fcr = std::min((d1 - 1) * (d2 - 1), d3);
    if (I == J && J == K && I >= 2 && I <= 10) {
        static const long long k_of_i[] = {2, 3, 5, 9, 13, 18, 22, 27, 32};
        b.cubic = k_of_i[I - 2];
    }
    return b;
}

namespace {

/// Largest R with R <= K and C(I,2) C(J,2) >= C(R,2); the reach of the
/// order-2 route, used to recompute the novelty markers.
int m2_bound(int I, int J, int K) {
    int best = 0;
    for (int R = 1; R <= K; ++R)
        if (binomial(I, 2) * binomial(J, 2) >= binomial(R, 2)) best = R;
    return best;
}

struct Sweep {
    int best = 0;
    std::vector<TableCell> cells;
};

Sweep sweep_cpd(int I, int J, int K, const GenericOptions& opts, std::uint64_t seed) {
    Sweep s;
    int cap = 0;
    for (int R = 1; R <= 2 * (I + J + K); ++R) {
        if (probe_of(I, J, R, K).feasible || probe_of(J, K, R, I).feasible ||
            probe_of(K, I, R, J).feasible)
            cap = R;
    }
    for (int R = 1; R <= cap; ++R) {
        auto v = generic_unique_cpd(I, J, K, R, opts, seed);
        TableCell c;
        c.I = I; c.J = J; c.K = K; c.R = R;
        if (v) {
            s.best = std::max(s.best, R);
            c.verdict = "witness";
            c.condition = v->condition == 1 ? "i" : (v->condition == 2 ? "ii" : "iii");
            c.mode = v->exact ? "exact" : "float";
            c.seed = v->witness_seed;
        } else {
            c.verdict = "none";
            c.condition = "-";
            c.mode = "-";
            c.seed = seed;
        }
        s.cells.push_back(std::move(c));
    }
    return s;
}

Sweep sweep_sfs(int I, int K, const GenericOptions& opts, std::uint64_t seed) {
    Sweep s;
    int cap = 0;
    for (int R = 1; R <= 2 * (2 * I + K); ++R)
        if (probe_of(I, I, R, K).feasible || probe_of(I, K, R, I).feasible) cap = R;
    for (int R = 1; R <= cap; ++R) {
        auto v = generic_unique_sfs(I, K, R, opts, seed);
        TableCell c;
        c.I = I; c.J = I; c.K = K; c.R = R;
        if (v) {
            s.best = std::max(s.best, R);
            c.verdict = "witness";
            c.condition = v->condition == 1 ? "sfs-i" : "sfs-ii";
            c.mode = v->exact ? "exact" : "float";
            c.seed = v->witness_seed;
        } else {
            c.verdict = "none";
            c.condition = "-";
            c.mode = "-";
            c.seed = seed;
        }
        s.cells.push_back(std::move(c));
    }
    return s;
}

Table table_two(const TableRanges& ranges, const GenericOptions& opts, std::uint64_t seed) {
    Table t;
    t.title = "Largest R per compound order m with a full-column-rank witness, I x I x (2I-1)";
    std::ostringstream os;
    os << "  I x I x (2I-1)   m=2    m=3    m=4    m=5\n";
    for (int I = std::max(4, ranges.i_lo); I <= std::min(9, ranges.i_hi); ++I) {
        const int K = 2 * I - 1;
        os << "  " << I << " x " << I << " x " << K << "       ";
        for (int m = 2; m <= 5; ++m) {
            const int R = 2 * I - 3 + m;
            Probe p = probe_of(I, I, R, K);
            TableCell c;
            c.I = I; c.J = I; c.K = K; c.R = R;
            std::string shown = "-";
            if (!p.feasible) {
                c.verdict = "infeasible";
                c.condition = "i";
                c.mode = "-";
                c.seed = seed;
            } else {
                GenericOptions one = opts;
                auto v = generic_unique_cpd(I, I, K, R, one, mix_seed(seed, static_cast<std::uint64_t>(I * 100 + m)));
                if (v && v->condition == 1) {
                    shown = std::to_string(R) + (v->exact ? "" : "~");
                    c.verdict = "witness";
                    c.condition = "i";
                    c.mode = v->exact ? "exact" : "float";
                    c.seed = v->witness_seed;
                } else {
                    c.verdict = "none";
                    c.condition = "i";
                    c.mode = "-";
                    c.seed = seed;
                }
            }
            os << shown;
            for (std::size_t pad = shown.size(); pad < 7; ++pad) os << ' ';
            t.cells.push_back(std::move(c));
        }
        os << "\n";
    }
    t.provenance.push_back("# seed " + std::to_string(seed) + "; ~ marks float (non-certified) findings");
    t.text = os.str();
    return t;
}

Table table_three(const TableRanges& ranges, const GenericOptions& opts, std::uint64_t seed) {
    Table t;
    t.title = "Largest R with generic uniqueness of the CPD (left), the SFS variant (middle), "
              "and the k-rank bound (right) for I x I x K";
    std::ostringstream os;
    os << "  K\\I ";
    for (int I = ranges.i_lo; I <= ranges.i_hi; ++I) {
        std::string h = std::to_string(I);
        os << "| " << h;
        for (std::size_t pad = h.size(); pad < 14; ++pad) os << ' ';
    }
    os << "\n";
    for (int K = ranges.k_lo; K <= ranges.k_hi; ++K) {
        std::string kl = std::to_string(K);
        os << "  " << kl;
        for (std::size_t pad = kl.size(); pad < 4; ++pad) os << ' ';
        for (int I = ranges.i_lo; I <= ranges.i_hi; ++I) {
            std::uint64_t cell_seed = mix_seed(seed, static_cast<std::uint64_t>(I * 1000 + K));
            Sweep left = sweep_cpd(I, I, K, opts, cell_seed);
            Sweep mid = sweep_sfs(I, K, opts, mix_seed(cell_seed, 17));
            int right = kruskal_generic_bound(I, I, K);
            bool bold = left.best > right && left.best > m2_bound(I, I, K);
            std::string cellstr = std::to_string(left.best) + (bold ? "*" : "") + ", " +
                                  std::to_string(mid.best) + ", " + std::to_string(right);
            os << "| " << cellstr;
            for (std::size_t pad = cellstr.size(); pad < 14; ++pad) os << ' ';
            for (auto& c : left.cells) t.cells.push_back(std::move(c));
            for (auto& c : mid.cells) t.cells.push_back(std::move(c));
            TableCell kr;
            kr.I = I; kr.J = I; kr.K = K; kr.R = right;
            kr.verdict = "bound";
            kr.condition = "kruskal";
            kr.mode = "-";
            kr.seed = cell_seed;
            t.cells.push_back(std::move(kr));
        }
        os << "\n";
    }
    t.provenance.push_back("# seed " + std::to_string(seed) +
                           "; * marks values beyond both the k-rank bound and the order-2 route");
    t.text = os.str();
    return t;
}

Table table_umwm(const GenericOptions& opts, std::uint64_t seed) {
    struct Row {
        int I, J, K, R;
        bool force_float;
    };
    static const Row rows[] = {
        {4, 5, 6, 7, false}, {4, 6, 14, 14, false}, {5, 7, 7, 9, false},
        {6, 9, 8, 11, true}, {7, 7, 7, 10, false},
    };
    Table t;
    t.title = "Kernel dimension of the order-m compound product and the (Um)/(Wm) pattern";
    std::ostringstream os;
    os << "  I x J x K    R   m   product      ker  (Um)           (Wm)\n";
    for (const Row& row : rows) {
        const int m = row.R - row.K + 2;
        std::uint64_t sa = mix_seed(seed, static_cast<std::uint64_t>(row.I * 10000 + row.J * 100 + row.K));
        std::uint64_t sb = mix_seed(sa, 1);
        std::uint64_t sc = mix_seed(sa, 2);
        MatQ a = sample_matrix(SamplerKind::dense(), row.I, row.R, sa);
        MatQ b = sample_matrix(SamplerKind::dense(), row.J, row.R, sb);
        MatQ c = sample_matrix(SamplerKind::dense(), row.K, row.R, sc);

        std::string u_text, w_text;
        int kerdim = 0;
        std::int64_t prows = binomial(row.I, m) * binomial(row.J, m);
        std::int64_t pcols = binomial(row.R, m);
        bool use_float = row.force_float || opts.mode == WitnessMode::Float;
        CheckOptions chk;
        if (use_float) {
            auto ua = analyze_U(to_float(a), to_float(b), m, chk);
            kerdim = ua.kernel_dim;
            u_text = to_string(ua.verdict);
            auto w = check_W(to_float(a), to_float(b), to_float(c), m, chk);
            w_text = to_string(w.verdict);
        } else {
            auto ua = analyze_U(a, b, m, chk);
            kerdim = ua.kernel_dim;
            u_text = to_string(ua.verdict);
            auto w = check_W(a, b, c, m, chk);
            w_text = to_string(w.verdict);
        }

        std::ostringstream line;
        line << "  " << row.I << " x " << row.J << " x " << row.K << "    " << row.R << "  " << m
             << "   " << prows << "x" << pcols << "  " << kerdim << "    " << u_text << "  " << w_text;
        os << line.str() << "\n";

        TableCell cell;
        cell.I = row.I; cell.J = row.J; cell.K = row.K; cell.R = row.R;
        cell.verdict = "U " + u_text + "; W " + w_text + "; ker " + std::to_string(kerdim);
        cell.condition = "m=" + std::to_string(m);
        cell.mode = use_float ? "float" : "exact";
        cell.seed = sa;
        t.cells.push_back(std::move(cell));
    }
    t.provenance.push_back("# seed " + std::to_string(seed));
    t.text = os.str();
    return t;
}

}  // namespace

Table make_table(TableKind which, const TableRanges& ranges, const GenericOptions& opts,
                 std::uint64_t seed) {
    switch (which) {
        case TableKind::Two: return table_two(ranges, opts, seed);
        case TableKind::Three: return table_three(ranges, opts, seed);
        case TableKind::UmWm: return table_umwm(opts, seed);
    }
    throw std::logic_error("make_table: unknown table");
}

std::string table_csv(const Table& t) {
    std::ostringstream os;
    os << "I,J,K,R,verdict,condition,mode,seed\n";
    for (const auto& c : t.cells)
        os << c.I << ',' << c.J << ',' << c.K << ',' << c.R << ',' << c.verdict << ','
           << c.condition << ',' << c.mode << ',' << c.seed << "\n";
    return os.str();
}

}  // namespace cpdcert
