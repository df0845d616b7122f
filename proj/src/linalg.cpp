#include "cpdcert/linalg.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <algorithm>
#include <cstring>
#include <numeric>
#include <stdexcept>

namespace cpdcert {

namespace {

constexpr unsigned long long kPrime = (1ULL << 61) - 1;  // Mersenne prime

inline unsigned long long mulmod(unsigned long long a, unsigned long long b) {
    return static_cast<unsigned long long>(
        (static_cast<unsigned __int128>(a) * b) % kPrime);
}

unsigned long long powmod(unsigned long long base, unsigned long long e) {
    unsigned long long r = 1;
    while (e) {
        if (e & 1) r = mulmod(r, base);
        base = mulmod(base, base);
        e >>= 1;
    }
    return r;
}

/// Fraction-free row echelon form of an integer grid. Rows are permuted in
/// place; entries stay integral throughout (Bareiss divisions are exact even
/// when rank-deficient columns are skipped).
struct Echelon {
    std::vector<BigInt> a;
    int rows = 0, cols = 0, rank = 0;
    std::vector<int> pivot_cols;
};

Echelon bareiss_echelon(std::vector<BigInt> grid, int rows, int cols) {
    Echelon e;
    e.a = std::move(grid);
    e.rows = rows;
    e.cols = cols;
    auto at = [&](int i, int j) -> BigInt& {
        return e.a[static_cast<std::size_t>(i) * cols + j];
    };
    BigInt prev(1), tmp;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        // smallest nonzero pivot keeps the integer growth down; ties go to the
        // uppermost row so the echelon form is deterministic
        int p = -1;
        for (int i = r; i < rows; ++i) {
            if (sgn(at(i, c)) == 0) continue;
            if (p < 0 || mpz_cmpabs(at(i, c).get_mpz_t(), at(p, c).get_mpz_t()) < 0) p = i;
        }
        if (p < 0) continue;
        if (p != r)
            for (int j = 0; j < cols; ++j) std::swap(at(p, j), at(r, j));
        for (int i = r + 1; i < rows; ++i) {
            if (sgn(at(i, c)) == 0) {
                for (int j = c + 1; j < cols; ++j) {
                    mpz_mul(tmp.get_mpz_t(), at(r, c).get_mpz_t(), at(i, j).get_mpz_t());
                    mpz_divexact(at(i, j).get_mpz_t(), tmp.get_mpz_t(), prev.get_mpz_t());
                }
            } else {
                for (int j = c + 1; j < cols; ++j) {
                    mpz_mul(tmp.get_mpz_t(), at(r, c).get_mpz_t(), at(i, j).get_mpz_t());
                    mpz_submul(tmp.get_mpz_t(), at(i, c).get_mpz_t(), at(r, j).get_mpz_t());
                    mpz_divexact(at(i, j).get_mpz_t(), tmp.get_mpz_t(), prev.get_mpz_t());
                }
                at(i, c) = 0;
            }
        }
        prev = at(r, c);
        e.pivot_cols.push_back(c);
        ++r;
    }
    e.rank = r;
    return e;
}

}  // namespace

std::vector<BigInt> to_integer_rows(const MatQ& m) {
    std::vector<BigInt> grid(static_cast<std::size_t>(m.rows()) * m.cols());
    BigInt l, g;
    for (int i = 0; i < m.rows(); ++i) {
        l = 1;
        for (int j = 0; j < m.cols(); ++j)
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(i, j).get_den().get_mpz_t());
        g = 0;
        for (int j = 0; j < m.cols(); ++j) {
            BigInt& z = grid[static_cast<std::size_t>(i) * m.cols() + j];
            z = m(i, j).get_num() * (l / m(i, j).get_den());
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), z.get_mpz_t());
        }
        if (sgn(g) > 0 && g != 1)
            for (int j = 0; j < m.cols(); ++j)
                mpz_divexact(grid[static_cast<std::size_t>(i) * m.cols() + j].get_mpz_t(),
                             grid[static_cast<std::size_t>(i) * m.cols() + j].get_mpz_t(),
                             g.get_mpz_t());
    }
    return grid;
}

int rank_modp(const std::vector<BigInt>& grid, int rows, int cols) {
    std::vector<unsigned long long> a(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        a[i] = mpz_fdiv_ui(grid[i].get_mpz_t(), kPrime);
    auto at = [&](int i, int j) -> unsigned long long& {
        return a[static_cast<std::size_t>(i) * cols + j];
    };
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int p = -1;
        for (int i = r; i < rows; ++i)
            if (at(i, c) != 0) { p = i; break; }
        if (p < 0) continue;
        if (p != r)
            for (int j = c; j < cols; ++j) std::swap(at(p, j), at(r, j));
        unsigned long long inv = powmod(at(r, c), kPrime - 2);
        for (int i = r + 1; i < rows; ++i) {
            if (at(i, c) == 0) continue;
            unsigned long long f = mulmod(at(i, c), inv);
            at(i, c) = 0;
            for (int j = c + 1; j < cols; ++j) {
                unsigned long long sub = mulmod(f, at(r, j));
                at(i, j) = (at(i, j) >= sub) ? at(i, j) - sub : at(i, j) + kPrime - sub;
            }
        }
        ++r;
    }
    return r;
}

int rank(const MatQ& m) {
    if (m.empty()) return 0;
    auto grid = to_integer_rows(m);
    int rp = rank_modp(grid, m.rows(), m.cols());
    if (rp == std::min(m.rows(), m.cols())) return rp;  // certified full rank
    return bareiss_echelon(std::move(grid), m.rows(), m.cols()).rank;
}

bool full_column_rank(const MatQ& m) {
    if (m.empty()) return m.cols() == 0;
    if (m.rows() < m.cols()) return false;
    auto grid = to_integer_rows(m);
    if (rank_modp(grid, m.rows(), m.cols()) == m.cols()) return true;
    return bareiss_echelon(std::move(grid), m.rows(), m.cols()).rank == m.cols();
}

std::vector<std::vector<Rational>> kernel_basis(const MatQ& m) {
    const int n = m.cols();
    if (m.empty()) {
        // trivially the whole space
        std::vector<std::vector<Rational>> basis;
        for (int f = 0; f < n; ++f) {
            std::vector<Rational> v(static_cast<std::size_t>(n), Rational(0));
            v[static_cast<std::size_t>(f)] = 1;
            basis.push_back(std::move(v));
        }
        return basis;
    }
    Echelon e = bareiss_echelon(to_integer_rows(m), m.rows(), m.cols());
    std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
    for (int c : e.pivot_cols) is_pivot[static_cast<std::size_t>(c)] = true;
    auto at = [&](int i, int j) -> const BigInt& {
        return e.a[static_cast<std::size_t>(i) * n + j];
    };

    std::vector<std::vector<Rational>> basis;
    for (int f = 0; f < n; ++f) {
        if (is_pivot[static_cast<std::size_t>(f)]) continue;
        std::vector<Rational> x(static_cast<std::size_t>(n), Rational(0));
        x[static_cast<std::size_t>(f)] = 1;
        for (int t = e.rank - 1; t >= 0; --t) {
            int c = e.pivot_cols[static_cast<std::size_t>(t)];
            if (c > f) continue;
            Rational s(0);
            for (int j = c + 1; j <= f; ++j)
                if (!is_zero(x[static_cast<std::size_t>(j)]) && sgn(at(t, j)) != 0)
                    s += Rational(at(t, j)) * x[static_cast<std::size_t>(j)];
            x[static_cast<std::size_t>(c)] = -s / Rational(at(t, c));
        }
        // primitive integer representative, first nonzero entry positive
        BigInt l(1);
        for (const auto& q : x) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den().get_mpz_t());
        BigInt g(0);
        std::vector<BigInt> zi(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            zi[i] = x[i].get_num() * (l / x[i].get_den());
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), zi[i].get_mpz_t());
        }
        int lead = 0;
        for (std::size_t i = 0; i < zi.size(); ++i)
            if (sgn(zi[i]) != 0) { lead = sgn(zi[i]); break; }
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (sgn(g) > 0) mpz_divexact(zi[i].get_mpz_t(), zi[i].get_mpz_t(), g.get_mpz_t());
            x[i] = Rational(lead < 0 ? -zi[i] : zi[i]);
        }
        basis.push_back(std::move(x));
    }
    return basis;
}

bool in_range_of(std::span<const Rational> v, const MatQ& m) {
    if (static_cast<int>(v.size()) != m.rows())
        throw std::invalid_argument("in_range_of: vector length must equal rows");
    return rank(m.with_column(v)) == rank(m);
}

// ---------------------------------------------------------------- float mode

namespace {

std::vector<double> to_col_major(const MatD& m) {
    std::vector<double> a(static_cast<std::size_t>(m.rows()) * m.cols());
    for (int j = 0; j < m.cols(); ++j)
        for (int i = 0; i < m.rows(); ++i)
            a[static_cast<std::size_t>(j) * m.rows() + i] = m(i, j);
    return a;
}

std::vector<double> singular_values(const MatD& m) {
    auto a = to_col_major(m);
    int mn = std::min(m.rows(), m.cols());
    std::vector<double> s(static_cast<std::size_t>(std::max(mn, 1)));
    int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m.rows(), m.cols(), a.data(),
                              m.rows(), s.data(), nullptr, m.rows(), nullptr, mn);
    if (info != 0) throw std::runtime_error("dgesdd failed to converge");
    s.resize(static_cast<std::size_t>(mn));
    return s;
}

int rank_from_singular_values(const std::vector<double>& s, int rows, int cols,
                              std::optional<double> tol) {
    if (s.empty()) return 0;
    double thresh = tol ? *tol : default_float_rank_tol(rows, cols, s[0]);
    int r = 0;
    for (double v : s)
        if (v > thresh) ++r;
    return r;
}

}  // namespace

int rank(const MatD& m, std::optional<double> tol) {
    if (m.empty()) return 0;
    return rank_from_singular_values(singular_values(m), m.rows(), m.cols(), tol);
}

std::vector<std::vector<double>> kernel_basis(const MatD& m, std::optional<double> tol) {
    const int n = m.cols();
    std::vector<std::vector<double>> basis;
    if (m.empty()) {
        for (int f = 0; f < n; ++f) {
            std::vector<double> v(static_cast<std::size_t>(n), 0.0);
            v[static_cast<std::size_t>(f)] = 1.0;
            basis.push_back(std::move(v));
        }
        return basis;
    }
    auto a = to_col_major(m);
    int mn = std::min(m.rows(), n);
    std::vector<double> s(static_cast<std::size_t>(mn));
    std::vector<double> u(static_cast<std::size_t>(m.rows()) * m.rows());
    std::vector<double> vt(static_cast<std::size_t>(n) * n);
    int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'A', m.rows(), n, a.data(), m.rows(),
                              s.data(), u.data(), m.rows(), vt.data(), n);
    if (info != 0) throw std::runtime_error("dgesdd failed to converge");
    int r = rank_from_singular_values(s, m.rows(), n, tol);
    for (int k = r; k < n; ++k) {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j)
            v[static_cast<std::size_t>(j)] = vt[static_cast<std::size_t>(j) * n + k];
        basis.push_back(std::move(v));
    }
    return basis;
}

bool in_range_of(std::span<const double> v, const MatD& m, std::optional<double> tol) {
    if (static_cast<int>(v.size()) != m.rows())
        throw std::invalid_argument("in_range_of: vector length must equal rows");
    return rank(m.with_column(v), tol) == rank(m, tol);
}

bool full_column_rank(const MatD& m, std::optional<double> tol) {
    if (m.rows() < m.cols()) return false;
    return rank(m, tol) == m.cols();
}

bool khatri_rao_full_column_rank_float(const MatD& ca, const MatD& cb) {
    if (ca.cols() != cb.cols())
        throw std::invalid_argument("column counts differ");
    const int q = ca.cols();
    if (q == 0) return true;
    if (static_cast<long long>(ca.rows()) * cb.rows() < q) return false;

    auto a = to_col_major(ca);
    auto b = to_col_major(cb);
    std::vector<double> na(static_cast<std::size_t>(q)), nb(na);
    for (int j = 0; j < q; ++j) {
        na[static_cast<std::size_t>(j)] =
            cblas_dnrm2(ca.rows(), a.data() + static_cast<std::size_t>(j) * ca.rows(), 1);
        nb[static_cast<std::size_t>(j)] =
            cblas_dnrm2(cb.rows(), b.data() + static_cast<std::size_t>(j) * cb.rows(), 1);
        if (na[static_cast<std::size_t>(j)] == 0.0 || nb[static_cast<std::size_t>(j)] == 0.0)
            return false;  // zero column in the product
    }

    // G = (A^T A) o (B^T B), column-normalised; o is the entrywise product.
    std::vector<double> g(static_cast<std::size_t>(q) * q);
    cblas_dsyrk(CblasColMajor, CblasLower, CblasTrans, q, ca.rows(), 1.0, a.data(),
                ca.rows(), 0.0, g.data(), q);
    const int block = 256;
    std::vector<double> t(static_cast<std::size_t>(q) * block);
    for (int c0 = 0; c0 < q; c0 += block) {
        int w = std::min(block, q - c0);
        cblas_dgemm(CblasColMajor, CblasTrans, CblasNoTrans, q, w, cb.rows(), 1.0,
                    b.data(), cb.rows(), b.data() + static_cast<std::size_t>(c0) * cb.rows(),
                    cb.rows(), 0.0, t.data(), q);
        for (int j = 0; j < w; ++j) {
            const int col = c0 + j;
            double scale_col = na[static_cast<std::size_t>(col)] * nb[static_cast<std::size_t>(col)];
            for (int i = col; i < q; ++i) {
                double scale = scale_col * na[static_cast<std::size_t>(i)] * nb[static_cast<std::size_t>(i)];
                std::size_t gi = static_cast<std::size_t>(col) * q + i;
                g[gi] = g[gi] * t[static_cast<std::size_t>(j) * q + i] / scale;
            }
        }
    }

    std::vector<lapack_int> piv(static_cast<std::size_t>(q));
    lapack_int rk = 0;
    LAPACKE_dpstrf(LAPACK_COL_MAJOR, 'L', q, g.data(), q, piv.data(), &rk, -1.0);
    return rk == q;
}

}  // namespace cpdcert
