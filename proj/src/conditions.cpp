#include "cpdcert/conditions.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <stdexcept>

#include "cpdcert/subsets.hpp"

namespace cpdcert {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "holds";
        case Verdict::Fails: return "fails";
        case Verdict::Unknown: return "unknown";
        case Verdict::NotApplicable: return "not-applicable";
    }
    return "?";
}

namespace {

template <class T>
int krank_impl(const Matrix<T>& m, const Tolerance& tol) {
    if (m.empty()) throw std::invalid_argument("krank: empty matrix");
    const int kmax = std::min(m.rows(), m.cols());
    for (int k = 1; k <= kmax; ++k) {
        auto s = first_subset(k);
        do {
            if (!full_column_rank_t(m.take_columns(s), tol)) return k - 1;
        } while (next_subset(m.cols(), s));
    }
    return kmax;
}

template <class T>
HProfile h_profile_impl(const Matrix<T>& a, const Matrix<T>& b, const Tolerance& tol) {
    if (a.cols() != b.cols())
        throw std::invalid_argument("h_profile: operands must share the column count");
    const int R = a.cols();
    HProfile h;
    h.values.resize(static_cast<std::size_t>(R));
    for (int delta = 1; delta <= R; ++delta) {
        int best = INT_MAX;
        auto s = first_subset(delta);
        do {
            int v = rank_t(a.take_columns(s), tol) + rank_t(b.take_columns(s), tol) - delta;
            best = std::min(best, v);
        } while (next_subset(R, s));
        h.values[static_cast<std::size_t>(delta - 1)] = best;
    }
    return h;
}

/// Entry classification for float vectors: zero below zero_rel * max-abs.
template <class T>
struct ZeroTest {
    double thresh = 0;
    ZeroTest(std::span<const T> v, const Tolerance& tol) {
        if constexpr (std::is_same_v<T, double>) {
            double mx = 0;
            for (double x : v) mx = std::max(mx, std::abs(x));
            thresh = tol.zero_rel * mx;
        } else {
            (void)v;
            (void)tol;
        }
    }
    bool operator()(const T& x) const {
        if constexpr (std::is_same_v<T, double>) return std::abs(x) <= thresh;
        else return is_zero(x);
    }
};

template <class T>
bool proportional_entry_match(const T& lhs, const T& rhs, const Tolerance& tol) {
    if constexpr (std::is_same_v<T, double>) {
        double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        return std::abs(lhs - rhs) <= tol.match_rel * scale;
    } else {
        (void)tol;
        return lhs == rhs;
    }
}

/// First nonzero entry scaled to one; makes proportional witnesses comparable.
template <class T>
std::vector<T> normalized_ray(std::vector<T> v, const Tolerance& tol) {
    ZeroTest<T> zero(std::span<const T>(v), tol);
    for (const T& x : v)
        if (!zero(x)) {
            T lead = x;
            for (T& y : v) y = y / lead;
            break;
        }
    return v;
}

}  // namespace

int krank(const MatQ& m) { return krank_impl<Rational>(m, {}); }
int krank(const MatD& m, std::optional<double> tol) {
    Tolerance t;
    t.rank_tol = tol;
    return krank_impl<double>(m, t);
}

HProfile h_profile(const MatQ& a, const MatQ& b) { return h_profile_impl<Rational>(a, b, {}); }
HProfile h_profile(const MatD& a, const MatD& b, std::optional<double> tol) {
    Tolerance t;
    t.rank_tol = tol;
    return h_profile_impl<double>(a, b, t);
}

template <class T>
std::vector<T> hat_vector(std::span<const T> d, int m) {
    const int R = static_cast<int>(d.size());
    if (m < 1 || m > R) throw std::invalid_argument("hat_vector: m outside 1..R");
    const int n = subset_count(R, m);
    std::vector<T> v(static_cast<std::size_t>(n));
    auto s = first_subset(m);
    for (int idx = 0; idx < n; ++idx) {
        T p(1);
        for (int i : s) p *= d[static_cast<std::size_t>(i)];
        v[static_cast<std::size_t>(idx)] = p;
        next_subset(R, s);
    }
    return v;
}

template <class T>
std::optional<std::vector<T>> reconstruct_from_hat(std::span<const T> v, int m, int R,
                                                   const Tolerance& tol) {
    if (m < 1 || m > R) throw std::invalid_argument("reconstruct_from_hat: m outside 1..R");
    if (static_cast<std::int64_t>(v.size()) != binomial(R, m))
        throw std::invalid_argument("reconstruct_from_hat: wrong vector length");

    ZeroTest<T> zero(v, tol);
    std::vector<char> used(static_cast<std::size_t>(R), 0);
    {
        auto s = first_subset(m);
        for (std::size_t idx = 0; idx < v.size(); ++idx) {
            if (!zero(v[idx]))
                for (int i : s) used[static_cast<std::size_t>(i)] = 1;
            next_subset(R, s);
        }
    }
    std::vector<int> support;
    for (int i = 0; i < R; ++i)
        if (used[static_cast<std::size_t>(i)]) support.push_back(i);
    const int n = static_cast<int>(support.size());
    if (n < m) return std::nullopt;  // v is (numerically) zero

    auto global_index = [&](std::span<const int> local) {
        std::vector<int> g(local.size());
        for (std::size_t i = 0; i < local.size(); ++i)
            g[i] = support[static_cast<std::size_t>(local[i])];
        return subset_index(R, m, g);
    };

    // the nonzero pattern must be exactly the m-subsets of the support
    {
        auto s = first_subset(m);
        do {
            if (zero(v[static_cast<std::size_t>(global_index(s))])) return std::nullopt;
        } while (next_subset(n, s));
    }

    std::vector<T> d(static_cast<std::size_t>(R), T(0));
    if (n == m) {
        for (int i : support) d[static_cast<std::size_t>(i)] = T(1);
        return d;
    }

    d[static_cast<std::size_t>(support[0])] = T(1);
    for (int t = 1; t < n; ++t) {
        // ratio d_t / d_0 read off a shared (m-1)-subset W of the support
        std::vector<int> w;
        for (int i = 1; i < n && static_cast<int>(w.size()) < m - 1; ++i)
            if (i != t) w.push_back(i);
        std::vector<int> with_t(w), with_0(w);
        with_t.push_back(t);
        std::sort(with_t.begin(), with_t.end());
        with_0.insert(with_0.begin(), 0);
        d[static_cast<std::size_t>(support[static_cast<std::size_t>(t)])] =
            v[static_cast<std::size_t>(global_index(with_t))] /
            v[static_cast<std::size_t>(global_index(with_0))];
    }

    // validate hat(d) ~ v entrywise against one reference entry
    auto hat_of = [&](std::span<const int> local) {
        T p(1);
        for (int i : local) p *= d[static_cast<std::size_t>(support[static_cast<std::size_t>(i)])];
        return p;
    };
    auto s0 = first_subset(m);
    const T h0 = hat_of(s0);
    const T v0 = v[static_cast<std::size_t>(global_index(s0))];
    auto s = first_subset(m);
    do {
        T lhs = v[static_cast<std::size_t>(global_index(s))] * h0;
        T rhs = v0 * hat_of(s);
        if (!proportional_entry_match(lhs, rhs, tol)) return std::nullopt;
    } while (next_subset(n, s));
    return d;
}

template <class T>
ConditionOutcome<T> check_K(const Matrix<T>& a, const Matrix<T>& b, int m,
                            const CheckOptions& opts) {
    if (a.cols() != b.cols())
        throw std::invalid_argument("check_K: operands must share the column count");
    ConditionOutcome<T> out;
    if (m < 1) {
        out.verdict = Verdict::NotApplicable;
        out.detail = "order below 1";
        return out;
    }
    const int R = a.cols();
    int ra = rank_t(a, opts.tol), rb = rank_t(b, opts.tol);
    int ka = krank_impl(a, opts.tol), kb = krank_impl(b, opts.tol);
    bool first = ra + kb >= R + m && ka >= m;
    bool second = rb + ka >= R + m && kb >= m;
    out.verdict = (first || second) ? Verdict::Holds : Verdict::Fails;
    out.detail = "r_A=" + std::to_string(ra) + " k_A=" + std::to_string(ka) +
                 " r_B=" + std::to_string(rb) + " k_B=" + std::to_string(kb);
    return out;
}

template <class T>
ConditionOutcome<T> check_C(const Matrix<T>& a, const Matrix<T>& b, int m,
                            const CheckOptions& opts) {
    if (a.cols() != b.cols())
        throw std::invalid_argument("check_C: operands must share the column count");
    ConditionOutcome<T> out;
    const int R = a.cols();
    if (m < 1 || m > std::min({a.rows(), b.rows(), R})) {
        out.verdict = Verdict::NotApplicable;
        out.detail = "compound matrix not defined at order " + std::to_string(m);
        return out;
    }
    std::int64_t rows = binomial(a.rows(), m) * binomial(b.rows(), m);
    std::int64_t cols = binomial(R, m);
    if (rows < cols) {
        out.verdict = Verdict::Fails;
        out.detail = "pigeonhole: " + std::to_string(rows) + " rows < " +
                     std::to_string(cols) + " columns";
        return out;
    }
    Matrix<T> p = khatri_rao(compound(a, m), compound(b, m));
    out.verdict = full_column_rank_t(p, opts.tol) ? Verdict::Holds : Verdict::Fails;
    out.detail = std::to_string(p.rows()) + "x" + std::to_string(p.cols()) +
                 " compound Khatri-Rao product";
    return out;
}

template <class T>
ConditionOutcome<T> check_H(const Matrix<T>& a, const Matrix<T>& b, int m,
                            const CheckOptions& opts) {
    if (a.cols() != b.cols())
        throw std::invalid_argument("check_H: operands must share the column count");
    ConditionOutcome<T> out;
    if (m < 1) {
        out.verdict = Verdict::NotApplicable;
        out.detail = "order below 1";
        return out;
    }
    HProfile h = h_profile_impl(a, b, opts.tol);
    const int R = a.cols();
    out.verdict = Verdict::Holds;
    for (int delta = 1; delta <= R; ++delta)
        if (h(delta) < std::min(delta, m)) {
            out.verdict = Verdict::Fails;
            out.detail = "H(" + std::to_string(delta) + ")=" + std::to_string(h(delta)) +
                         " < min(delta m)=" + std::to_string(std::min(delta, m));
            return out;
        }
    out.detail = "H(delta) >= min(delta, " + std::to_string(m) + ") for all delta";
    return out;
}

namespace {

template <class T>
void add_witness(std::vector<std::vector<T>>& ws, std::vector<T> d, const Tolerance& tol) {
    auto nd = normalized_ray(d, tol);
    for (const auto& w : ws)
        if (normalized_ray(w, tol) == nd) return;
    ws.push_back(std::move(d));
}

/// Exhaustive search over candidate supports T: a valid witness with support
/// exactly T restricts to a kernel vector of the columns indexed by m-subsets
/// of T. Returns true when every support was decided.
template <class T>
bool support_search(const Matrix<T>& p, int m, int R, const CheckOptions& opts,
                    std::vector<std::vector<T>>& witnesses) {
    bool all_decided = true;
    for (int n = m; n <= R; ++n) {
        auto t = first_subset(n);
        do {
            std::vector<int> colidx;
            colidx.reserve(static_cast<std::size_t>(binomial(n, m)));
            auto s = first_subset(m);
            do {
                std::vector<int> g(static_cast<std::size_t>(m));
                for (int i = 0; i < m; ++i)
                    g[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(s[static_cast<std::size_t>(i)])];
                colidx.push_back(static_cast<int>(subset_index(R, m, g)));
            } while (next_subset(n, s));

            Matrix<T> pt = p.take_columns(colidx);
            auto ker = kernel_basis_t(pt, opts.tol);
            if (ker.empty()) continue;

            auto lift = [&](const std::vector<T>& x) {
                std::vector<T> full(static_cast<std::size_t>(p.cols()), T(0));
                for (std::size_t i = 0; i < colidx.size(); ++i)
                    full[static_cast<std::size_t>(colidx[i])] = x[i];
                return full;
            };

            if (ker.size() == 1) {
                auto d = reconstruct_from_hat<T>(lift(ker[0]), m, R, opts.tol);
                if (d) add_witness(witnesses, *d, opts.tol);
                continue;
            }
            if (n == m + 1) {
                // with |T| = m+1 any kernel vector without zero entries is the
                // hat of some d (set d_i = 1 / entry at T minus {i}); look for a
                // nowhere-zero combination of the basis
                std::vector<T> x = ker[0];
                bool found = false;
                for (int trial = 1; trial <= 64 && !found; ++trial) {
                    ZeroTest<T> zero(std::span<const T>(x), opts.tol);
                    found = true;
                    for (const T& e : x)
                        if (zero(e)) { found = false; break; }
                    if (!found && static_cast<int>(ker.size()) > 1) {
                        x = ker[0];
                        T f(1);
                        for (std::size_t kidx = 1; kidx < ker.size(); ++kidx) {
                            f *= T(trial);
                            for (std::size_t i = 0; i < x.size(); ++i) x[i] += f * ker[kidx][i];
                        }
                    }
                }
                if (found) {
                    auto d = reconstruct_from_hat<T>(lift(x), m, R, opts.tol);
                    if (d) {
                        add_witness(witnesses, *d, opts.tol);
                        continue;
                    }
                }
                // a nowhere-zero vector exists unless a coordinate vanishes on
                // the whole kernel; in that residual case no witness has
                // support exactly T and the support is still decided
                bool coord_vanishes = false;
                for (std::size_t i = 0; i < ker[0].size() && !coord_vanishes; ++i) {
                    bool all0 = true;
                    for (const auto& w : ker) {
                        ZeroTest<T> zero(std::span<const T>(w), opts.tol);
                        if (!zero(w[i])) { all0 = false; break; }
                    }
                    coord_vanishes = all0;
                }
                if (!coord_vanishes && !found) all_decided = false;
                continue;
            }
            all_decided = false;
        } while (next_subset(R, t));
    }
    return all_decided;
}

}  // namespace

template <class T>
UAnalysis<T> analyze_U(const Matrix<T>& a, const Matrix<T>& b, int m,
                       const CheckOptions& opts) {
    if (a.cols() != b.cols())
        throw std::invalid_argument("analyze_U: operands must share the column count");
    const int R = a.cols();
    UAnalysis<T> res;
    if (m < 1 || m > std::min({a.rows(), b.rows(), R})) {
        res.verdict = Verdict::NotApplicable;
        res.route = "compound matrix not defined at order " + std::to_string(m);
        return res;
    }
    res.product_rows = static_cast<int>(binomial(a.rows(), m) * binomial(b.rows(), m));
    res.product_cols = static_cast<int>(binomial(R, m));

    if (check_K(a, b, m, opts).holds()) {
        res.verdict = Verdict::Holds;
        res.route = "(K" + std::to_string(m) + ")";
        res.kernel_dim = 0;
        res.witnesses_exhaustive = true;
        return res;
    }

    Matrix<T> p = khatri_rao(compound(a, m), compound(b, m));
    int r = rank_t(p, opts.tol);
    res.kernel_dim = p.cols() - r;
    if (res.kernel_dim == 0) {
        res.verdict = Verdict::Holds;
        res.route = "(C" + std::to_string(m) + ")";
        res.witnesses_exhaustive = true;
        return res;
    }

    if (check_H(a, b, m, opts).holds()) {
        res.verdict = Verdict::Holds;
        res.route = "(H" + std::to_string(m) + ")";
        res.witnesses_exhaustive = true;
        return res;
    }

    // indicator witnesses from zero columns of the product
    {
        ZeroTest<T> zero(std::span<const T>(p.entries()), opts.tol);
        auto s = first_subset(m);
        for (int c = 0; c < p.cols(); ++c) {
            bool zcol = true;
            for (int i = 0; i < p.rows() && zcol; ++i) zcol = zero(p(i, c));
            if (zcol) {
                std::vector<T> d(static_cast<std::size_t>(R), T(0));
                for (int i : s) d[static_cast<std::size_t>(i)] = T(1);
                add_witness(res.witnesses, std::move(d), opts.tol);
            }
            next_subset(R, s);
        }
    }

    auto ker = kernel_basis_t(p, opts.tol);
    for (const auto& w : ker) {
        auto d = reconstruct_from_hat<T>(w, m, R, opts.tol);
        if (d) add_witness(res.witnesses, *d, opts.tol);
    }

    if (res.kernel_dim == 1) {
        if (!res.witnesses.empty()) {
            res.verdict = Verdict::Fails;
            res.route = "one-dimensional kernel spanned by a hat vector";
        } else {
            res.verdict = Verdict::Holds;
            res.route = "one-dimensional kernel, direction is no hat vector";
        }
        res.witnesses_exhaustive = true;
        return res;
    }

    bool exhaustive = false;
    if constexpr (std::is_same_v<T, Rational>) {
        if (opts.support_search && R <= opts.support_search_max_terms)
            exhaustive = support_search(p, m, R, opts, res.witnesses);
    }
    res.witnesses_exhaustive = exhaustive;
    if (!res.witnesses.empty()) {
        res.verdict = Verdict::Fails;
        res.route = exhaustive ? "support search (complete)" : "witness found";
    } else if (exhaustive) {
        res.verdict = Verdict::Holds;
        res.route = "support search exhausted, no hat vector in the kernel";
    } else {
        res.verdict = Verdict::Unknown;
        res.route = "kernel dimension " + std::to_string(res.kernel_dim) +
                    ", no witness found";
    }
    return res;
}

template <class T>
ConditionOutcome<T> check_U(const Matrix<T>& a, const Matrix<T>& b, int m,
                            const CheckOptions& opts) {
    UAnalysis<T> an = analyze_U(a, b, m, opts);
    ConditionOutcome<T> out;
    out.verdict = an.verdict;
    out.witnesses = std::move(an.witnesses);
    out.detail = an.route;
    if (an.verdict != Verdict::NotApplicable)
        out.detail += "; kernel dim " + std::to_string(an.kernel_dim);
    return out;
}

template <class T>
ConditionOutcome<T> check_W(const Matrix<T>& a, const Matrix<T>& b, const Matrix<T>& c,
                            int m, const CheckOptions& opts) {
    if (c.cols() != a.cols())
        throw std::invalid_argument("check_W: C must share the column count");
    UAnalysis<T> an = analyze_U(a, b, m, opts);
    ConditionOutcome<T> out;
    if (an.verdict == Verdict::NotApplicable) {
        out.verdict = Verdict::NotApplicable;
        out.detail = an.route;
        return out;
    }
    if (an.verdict == Verdict::Holds) {
        out.verdict = Verdict::Holds;
        out.detail = "via (U" + std::to_string(m) + "): " + an.route;
        return out;
    }
    if (an.verdict == Verdict::Unknown) {
        out.verdict = Verdict::Unknown;
        out.detail = an.route;
        return out;
    }
    Matrix<T> ct = c.transposed();
    for (const auto& d : an.witnesses) {
        if (in_range_of_t(std::span<const T>(d), ct, opts.tol)) {
            out.verdict = Verdict::Fails;
            out.witnesses.push_back(d);
            out.detail = "kernel hat direction lies in range(C^T)";
            return out;
        }
    }
    if (an.witnesses_exhaustive) {
        out.verdict = Verdict::Holds;
        out.detail = "every kernel hat direction avoids range(C^T)";
    } else {
        out.verdict = Verdict::Unknown;
        out.detail = "witness list not exhaustive; " + an.route;
    }
    return out;
}

template <class T>
std::vector<ColumnDirection<T>> one_nonzero_directions(const Matrix<T>& m,
                                                       const Tolerance& tol) {
    std::vector<ColumnDirection<T>> report;
    for (int c = 0; c < m.cols(); ++c) {
        ColumnDirection<T> entry;
        entry.column = c;
        Matrix<T> others = m.drop_column(c);
        entry.others_rank = rank_t(others, tol);
        entry.kernel_dim = m.rows() - entry.others_rank;
        auto col = m.column(c);
        entry.in_span = in_range_of_t(std::span<const T>(col), others, tol);
        entry.nonempty = !entry.in_span;
        if (entry.kernel_dim == 1) {
            auto ker = kernel_basis_t(others.transposed(), tol);
            if (ker.size() == 1) entry.direction = ker[0];
        }
        report.push_back(std::move(entry));
    }
    return report;
}

// explicit instantiations for the two scalar modes
template std::vector<Rational> hat_vector<Rational>(std::span<const Rational>, int);
template std::vector<double> hat_vector<double>(std::span<const double>, int);
template std::optional<std::vector<Rational>> reconstruct_from_hat<Rational>(
    std::span<const Rational>, int, int, const Tolerance&);
template std::optional<std::vector<double>> reconstruct_from_hat<double>(
    std::span<const double>, int, int, const Tolerance&);
template ConditionOutcome<Rational> check_K<Rational>(const MatQ&, const MatQ&, int,
                                                      const CheckOptions&);
template ConditionOutcome<double> check_K<double>(const MatD&, const MatD&, int,
                                                  const CheckOptions&);
template ConditionOutcome<Rational> check_C<Rational>(const MatQ&, const MatQ&, int,
                                                      const CheckOptions&);
template ConditionOutcome<double> check_C<double>(const MatD&, const MatD&, int,
                                                  const CheckOptions&);
template ConditionOutcome<Rational> check_H<Rational>(const MatQ&, const MatQ&, int,
                                                      const CheckOptions&);
template ConditionOutcome<double> check_H<double>(const MatD&, const MatD&, int,
                                                  const CheckOptions&);
template ConditionOutcome<Rational> check_U<Rational>(const MatQ&, const MatQ&, int,
                                                      const CheckOptions&);
template ConditionOutcome<double> check_U<double>(const MatD&, const MatD&, int,
                                                  const CheckOptions&);
template ConditionOutcome<Rational> check_W<Rational>(const MatQ&, const MatQ&, const MatQ&,
                                                      int, const CheckOptions&);
template ConditionOutcome<double> check_W<double>(const MatD&, const MatD&, const MatD&,
                                                  int, const CheckOptions&);
template UAnalysis<Rational> analyze_U<Rational>(const MatQ&, const MatQ&, int,
                                                 const CheckOptions&);
template UAnalysis<double> analyze_U<double>(const MatD&, const MatD&, int,
                                             const CheckOptions&);
template std::vector<ColumnDirection<Rational>> one_nonzero_directions<Rational>(
    const MatQ&, const Tolerance&);
template std::vector<ColumnDirection<double>> one_nonzero_directions<double>(
    const MatD&, const Tolerance&);

}  // namespace cpdcert
