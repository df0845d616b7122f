#include "cpdcert/gallery.hpp"

#include <functional>
#include <sstream>

#include "cpdcert/generic.hpp"
#include "cpdcert/linalg.hpp"

namespace cpdcert::gallery {

namespace {

Rational q(long num, long den = 1) { return Rational(num, den); }

/// Tiny check accumulator so a case reports every mismatch, not just the first.
struct Checker {
    std::ostringstream bad;
    bool ok = true;
    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            bad << (bad.tellp() > 0 ? "; " : "") << what;
        }
    }
};

bool fired(const Certificate& c, const std::string& rule) {
    for (const auto& f : c.fired)
        if (f.rule == rule) return true;
    return false;
}

bool columns_proportional(const MatQ& x, const MatQ& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
    for (int c = 0; c < x.cols(); ++c) {
        // find the scale from the first nonzero entry, then compare the column
        Rational scale;
        bool have = false;
        for (int i = 0; i < x.rows(); ++i) {
            if (!is_zero(y(i, c))) {
                scale = x(i, c) / y(i, c);
                have = true;
                break;
            }
            if (!is_zero(x(i, c))) return false;
        }
        if (!have || is_zero(scale)) return false;
        for (int i = 0; i < x.rows(); ++i)
            if (x(i, c) != scale * y(i, c)) return false;
    }
    return true;
}

}  // namespace

FactorTriple<Rational> three_term_triple() {
    MatQ a{{q(1), q(1), q(1)}, {q(-1), q(-2), q(3)}};
    MatQ b{{q(6), q(12), q(2)}, {q(3), q(4), q(-1)}, {q(4), q(6), q(-4)}};
    return {a, b, MatQ::identity(3)};
}

FactorTriple<Rational> four_term_triple() {
    MatQ a{{q(1), q(0), q(1), q(1)}, {q(0), q(1), q(1), q(2)}};
    MatQ b{{q(1), q(1), q(0), q(0)}, {q(1), q(0), q(1), q(0)}, {q(1), q(0), q(0), q(1)}};
    MatQ c{{q(6), q(-6), q(-3), q(-2)},
           {q(12), q(-24), q(-8), q(-6)},
           {q(2), q(6), q(-3), q(-6)}};
    return {a, b, c};
}

std::pair<MatQ, MatQ> sharpness_pair(const Rational& alpha, const Rational& beta) {
    MatQ bhat{{q(6), q(12), q(2)}, {q(3), q(4), q(-1)}, {q(4), q(6), q(-4)}};
    MatQ diag_ab(3, 3), diag_inv(3, 3);
    diag_ab(0, 0) = 1; diag_ab(1, 1) = alpha; diag_ab(2, 2) = beta;
    diag_inv(0, 0) = 1; diag_inv(1, 1) = 1 / alpha; diag_inv(2, 2) = 1 / beta;
    MatQ v{{q(1), q(1), q(1), q(1)},
           {q(1), q(2), q(4, 3), q(3, 2)},
           {q(1), q(-3), q(3), q(9)}};
    MatQ w{{q(6), q(-6), q(-3), q(-2)},
           {q(-24, 5), q(48, 5), q(16, 5), q(12, 5)},
           {q(2, 15), q(2, 5), q(-1, 5), q(-2, 5)}};
    return {bhat * diag_ab * v, diag_inv * w};
}

FactorTriple<Rational> rank6_cube_triple() {
    auto with_extra = [](std::array<int, 5> pattern) {
        MatQ m(5, 6);
        for (int i = 0; i < 5; ++i) m(i, i) = 1;
        for (int i = 0; i < 5; ++i) m(i, 5) = pattern[static_cast<std::size_t>(i)];
        return m;
    };
    return {with_extra({1, 1, 1, 1, 0}), with_extra({1, 1, 1, 0, 1}), with_extra({1, 1, 0, 1, 1})};
}

FactorTriple<Rational> rank5_cube_triple() {
    MatQ a{{q(1), q(0), q(0), q(0), q(1)},
           {q(0), q(1), q(0), q(0), q(1)},
           {q(0), q(0), q(1), q(0), q(1)},
           {q(0), q(0), q(0), q(1), q(0)}};
    MatQ b{{q(1), q(0), q(0), q(0), q(1)},
           {q(0), q(1), q(0), q(0), q(1)},
           {q(0), q(0), q(1), q(0), q(0)},
           {q(0), q(0), q(0), q(1), q(1)}};
    MatQ c{{q(1), q(0), q(0), q(0), q(1)},
           {q(0), q(1), q(0), q(0), q(0)},
           {q(0), q(0), q(1), q(0), q(1)},
           {q(0), q(0), q(0), q(1), q(1)}};
    return {a, b, c};
}

MatQ wide_third_hat_a() {
    // Vandermonde rows 1, t, t^2, t^3 at distinct nodes: every 4 columns independent
    MatQ m(4, 8);
    const long nodes[8] = {1, 2, 3, 4, 5, 6, 7, 8};
    for (int j = 0; j < 8; ++j) {
        long p = 1;
        for (int i = 0; i < 4; ++i) {
            m(i, j) = q(p);
            p *= nodes[j];
        }
    }
    return m;
}

MatQ wide_third_hat_b() {
    MatQ m(4, 8);
    const long nodes[8] = {2, 3, 5, 7, 11, 13, 17, 19};
    for (int j = 0; j < 8; ++j) {
        long p = 1;
        for (int i = 0; i < 4; ++i) {
            m(i, j) = q(p);
            p *= nodes[j];
        }
    }
    return m;
}

FactorTriple<Rational> wide_third_triple() {
    MatQ ah = wide_third_hat_a(), bh = wide_third_hat_b();
    MatQ a(5, 8), b(5, 8);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 8; ++j) {
            a(i, j) = ah(i, j);
            b(i, j) = bh(i, j);
        }
    a(4, 0) = 1;  // fifth rows pick out the first and the last column
    b(4, 7) = 1;
    return {a, b, MatQ::identity(8)};
}

FactorTriple<Rational> identity_third_triple() {
    MatQ a{{q(1), q(0), q(0), q(1), q(1)},
           {q(0), q(1), q(0), q(1), q(2)},
           {q(0), q(0), q(1), q(1), q(3)}};
    MatQ b{{q(1), q(0), q(0), q(1), q(1)},
           {q(0), q(1), q(0), q(1), q(3)},
           {q(0), q(0), q(1), q(1), q(5)}};
    return {a, b, MatQ::identity(5)};
}

MatQ identity_third_product() {
    return MatQ{{q(1), q(0), q(1), q(6), q(0), q(1), q(1), q(0), q(0), q(2)},
                {q(0), q(0), q(1), q(10), q(0), q(0), q(0), q(0), q(0), q(4)},
                {q(0), q(0), q(0), q(0), q(0), q(-1), q(-5), q(0), q(0), q(2)},
                {q(0), q(0), q(1), q(9), q(0), q(0), q(0), q(0), q(0), q(4)},
                {q(0), q(1), q(1), q(15), q(0), q(0), q(0), q(1), q(1), q(8)},
                {q(0), q(0), q(0), q(0), q(0), q(0), q(0), q(1), q(3), q(4)},
                {q(0), q(0), q(0), q(0), q(0), q(-1), q(-3), q(0), q(0), q(2)},
                {q(0), q(0), q(0), q(0), q(0), q(0), q(0), q(1), q(2), q(4)},
                {q(0), q(0), q(0), q(0), q(1), q(1), q(15), q(1), q(6), q(2)}};
}

std::vector<Rational> identity_third_kernel_vector() {
    return {q(0), q(0), q(-4), q(0), q(0), q(2), q(0), q(-4), q(0), q(-1)};
}

MatQ direction_factor_a(const Rational& alpha) {
    MatQ m{{q(0), q(1), q(0), q(0), q(0)},
           {q(1), q(0), q(1), q(0), q(0)},
           {q(1), q(0), q(0), q(1), q(0)},
           {q(0), q(0), q(0), q(0), q(1)}};
    m(0, 1) = alpha;
    return m;
}

MatQ direction_factor_b() {
    return MatQ{{q(0), q(1), q(0), q(0), q(0)},
                {q(1), q(0), q(1), q(0), q(0)},
                {q(0), q(0), q(0), q(1), q(0)},
                {q(1), q(0), q(0), q(0), q(1)}};
}

MatQ direction_factor_c() {
    return MatQ{{q(1), q(1), q(0), q(0), q(0)},
                {q(0), q(0), q(1), q(0), q(0)},
                {q(0), q(0), q(0), q(1), q(0)},
                {q(1), q(0), q(0), q(0), q(1)}};
}

MatQ masked_perturbation_factor(int zero_row, std::uint64_t seed) {
    MaskPattern mask;
    mask.zeros.push_back({zero_row, 0});
    MatQ v = sample_matrix(SamplerKind::masked(mask), 4, 1, seed);
    return MatQ::hcat(MatQ::identity(4), v);
}

namespace {

CaseResult case_pd_pair_equality() {
    Checker ck;
    auto small = three_term_triple();
    auto big = four_term_triple();
    ck.expect(tensor_equals(from_factors(small), from_factors(big)),
              "the 3-term and 4-term constructions disagree");
    auto cert = certify(small);
    ck.expect(fired(cert, "kruskal"), "k-rank sum rule did not fire on the 3-term triple");
    ck.expect(cert.tier == Tier::UniqueCPD, "3-term certificate tier");
    return {"pd-pair-equality", ck.ok, ck.bad.str()};
}

CaseResult case_sharpness() {
    Checker ck;
    auto base = four_term_triple();
    auto t0 = from_factors(base);
    for (auto [al, be] : {std::pair<Rational, Rational>{q(1), q(1)},
                          std::pair<Rational, Rational>{q(-2, 5), q(1, 15)}}) {
        auto [bbar, cbar] = sharpness_pair(al, be);
        FactorTriple<Rational> alt(base.A, bbar, cbar);
        ck.expect(tensor_equals(t0, from_factors(alt)),
                  "alternative decomposition changes the tensor at alpha=" + to_string(al));
    }
    auto [bprop, cprop] = sharpness_pair(q(-2, 5), q(1, 15));
    ck.expect(columns_proportional(bprop, base.B), "B columns not proportional at (-2/5, 1/15)");
    ck.expect(columns_proportional(cprop, base.C), "C columns not proportional at (-2/5, 1/15)");
    auto [bskew, cskew] = sharpness_pair(q(1), q(1));
    ck.expect(!columns_proportional(bskew, base.B), "B columns proportional away from (-2/5, 1/15)");

    CertifyOptions opts;
    ck.expect(check_common_one(base, 2, opts).holds(), "common-factor inequality with C shared");
    ck.expect(check_common_one(base, 1, opts).holds(), "common-factor inequality with B shared");
    ck.expect(check_common_one(base, 0, opts).fails(), "common-factor inequality with A shared is sharp");
    return {"sharpness-family", ck.ok, ck.bad.str()};
}

CaseResult case_rank6_cube() {
    Checker ck;
    auto f = rank6_cube_triple();
    for (const MatQ* m : {&f.A, &f.B, &f.C}) ck.expect(krank(*m) == 4, "k-rank is not 4");
    auto cert = certify(f);
    ck.expect(!fired(cert, "kruskal"), "k-rank sum rule fired with 12 < 14");
    ck.expect(fired(cert, "two_k"), "two-k rule did not fire");
    ck.expect(cert.tier == Tier::UniqueCPD, "certificate tier");
    return {"rank6-cube", ck.ok, ck.bad.str()};
}

CaseResult case_rank5_cube() {
    Checker ck;
    auto f = rank5_cube_triple();
    const MatQ* m[3] = {&f.A, &f.B, &f.C};
    for (int i = 0; i < 3; ++i) {
        ck.expect(rank(*m[i]) == 4 && krank(*m[i]) == 3, "rank/k-rank of a factor");
        auto c3 = check_C(*m[i], *m[(i + 1) % 3], 3);
        ck.expect(c3.holds(), "(C3) fails for a factor pair");
        auto h = h_profile(*m[i], *m[(i + 1) % 3]);
        for (int delta = 1; delta <= 5; ++delta)
            ck.expect(h(delta) == std::min(delta, 3), "H profile is not min(delta, 3)");
    }
    auto cert = certify(f);
    ck.expect(!fired(cert, "kruskal") && !fired(cert, "two_k"), "a k-rank rule fired unexpectedly");
    ck.expect(fired(cert, "two_of_three_U"), "two-of-three rule did not fire");
    ck.expect(!fired(cert, "one_factor_w"), "one-factor rule fired although the inequality is sharp");
    ck.expect(cert.tier == Tier::UniqueCPD, "certificate tier");
    return {"rank5-cube", ck.ok, ck.bad.str()};
}

CaseResult case_wide_third() {
    Checker ck;
    ck.expect(krank(wide_third_hat_a()) == 4 && krank(wide_third_hat_b()) == 4,
              "hat factors must have k-rank 4");
    auto f = wide_third_triple();
    auto h = h_profile(f.A, f.B);
    const int expected[8] = {1, 2, 3, 4, 3, 2, 2, 2};
    for (int d = 1; d <= 8; ++d)
        ck.expect(h(d) == expected[d - 1], "H profile entry at delta=" + std::to_string(d));
    ck.expect(check_common_one(f, 2, {}).holds(), "common-factor inequality");
    auto hbc = h_profile(f.B, f.C);
    ck.expect(hbc(5) == 4, "H_BC(5) should be 4");
    auto cert = certify(f);
    ck.expect(fired(cert, "one_factor_w"), "one-factor route did not fire");
    ck.expect(!fired(cert, "two_of_three_U"), "two-of-three fired although only one condition holds");
    ck.expect(cert.tier == Tier::UniqueCPD, "certificate tier");
    return {"wide-third-factor", ck.ok, ck.bad.str()};
}

CaseResult case_identity_third() {
    Checker ck;
    auto f = identity_third_triple();
    auto p = khatri_rao(compound(f.A, 2), compound(f.B, 2));
    ck.expect(p == identity_third_product(), "compound Khatri-Rao product differs from the frozen one");
    auto ker = kernel_basis(p);
    ck.expect(ker.size() == 1, "kernel dimension is not one");
    if (ker.size() == 1) {
        auto expect = identity_third_kernel_vector();
        // proportionality: v * expect_0 == expect * v_0 entrywise
        bool prop = true;
        Rational v2 = ker[0][2], e2 = expect[2];
        for (int i = 0; i < 10; ++i)
            prop = prop && ker[0][static_cast<std::size_t>(i)] * e2 == expect[static_cast<std::size_t>(i)] * v2;
        ck.expect(prop, "kernel vector not proportional to the frozen one");
    }
    ck.expect(check_U(f.A, f.B, 2).holds(), "(U2) should hold despite the nontrivial kernel");
    auto cert = certify(f);
    ck.expect(fired(cert, "one_factor_w"), "one-factor route did not fire");
    ck.expect(cert.tier == Tier::UniqueCPD, "certificate tier");
    bool saw_na = false;
    for (const auto& r : cert.table)
        if (r.condition == "U" && r.order == 4) saw_na = r.verdict == Verdict::NotApplicable;
    ck.expect(saw_na, "(U4) should be not-applicable: the order-4 compound is undefined");
    return {"identity-third-factor", ck.ok, ck.bad.str()};
}

CaseResult case_w5_construction() {
    Checker ck;
    MatQ a = sample_matrix(SamplerKind::dense(), 7, 10, 20240501);
    MatQ b = sample_matrix(SamplerKind::dense(), 7, 10, 20240502);
    auto an = analyze_U(a, b, 5);
    ck.expect(an.kernel_dim == 1, "kernel of the 441x252 product is not one-dimensional");
    ck.expect(an.verdict == Verdict::Fails && !an.witnesses.empty(),
              "(U5) should fail with a reconstructed witness");
    MatQ c = sample_matrix(SamplerKind::dense(), 7, 10, 20240503);
    if (!an.witnesses.empty()) {
        ck.expect(!in_range_of(std::span<const Rational>(an.witnesses[0]), c.transposed()),
                  "witness direction unexpectedly lies in range(C^T)");
    }
    ck.expect(krank(c) >= 5, "sampled C needs k-rank at least 5");
    auto w = check_W(a, b, c, 5);
    ck.expect(w.holds(), "(W5) should hold for the sampled C");
    FactorTriple<Rational> f(a, b, c);
    auto cert = certify(f);
    ck.expect(fired(cert, "one_factor_w"), "one-factor route did not fire");
    ck.expect(cert.tier == Tier::UniqueCPD, "certificate tier");
    return {"w5-construction", ck.ok, ck.bad.str()};
}

CaseResult case_direction_analysis(const Rational& alpha) {
    Checker ck;
    MatQ a = direction_factor_a(alpha), b = direction_factor_b(), c = direction_factor_c();
    ck.expect(full_column_rank(khatri_rao(a, b)), "A (.) B rank");
    ck.expect(full_column_rank(khatri_rao(b, c)), "B (.) C rank");
    ck.expect(full_column_rank(khatri_rao(c, a)), "C (.) A rank");
    ck.expect(full_column_rank(khatri_rao(compound(a, 2), compound(b, 2))), "order-2 (A,B) rank");
    ck.expect(full_column_rank(khatri_rao(compound(b, 2), compound(c, 2))), "order-2 (B,C) rank");
    ck.expect(full_column_rank(khatri_rao(compound(c, 2), compound(a, 2))), "order-2 (C,A) rank");

    auto directions = [&](const MatQ& m) {
        std::vector<int> axes;
        for (const auto& r : one_nonzero_directions(m)) {
            if (!r.nonempty) continue;
            if (!r.direction) return std::vector<int>{};  // ambiguous direction
            int axis = -1;
            int nz = 0;
            for (int i = 0; i < static_cast<int>(r.direction->size()); ++i)
                if (!is_zero((*r.direction)[static_cast<std::size_t>(i)])) { ++nz; axis = i; }
            axes.push_back(nz == 1 ? axis : -1);
        }
        std::sort(axes.begin(), axes.end());
        return axes;
    };
    ck.expect(directions(a) == std::vector<int>({0, 3}), "directions of A are not {e1, e4}");
    ck.expect(directions(b) == std::vector<int>({0, 2}), "directions of B are not {e1, e3}");
    ck.expect(directions(c) == std::vector<int>({1, 2}), "directions of C are not {e2, e3}");
    return {"direction-analysis", ck.ok, ck.bad.str()};
}

CaseResult case_masked_perturbation() {
    Checker ck;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        MatQ a = masked_perturbation_factor(3, 1000 + seed);
        MatQ b = masked_perturbation_factor(2, 2000 + seed);
        MatQ c = masked_perturbation_factor(1, 3000 + seed);
        ck.expect(is_zero(a(3, 4)) && is_zero(b(2, 4)) && is_zero(c(1, 4)),
                  "mask did not zero the stated coordinates");
        ck.expect(check_C(a, b, 3).holds(), "(C3) for (A,B) at seed " + std::to_string(seed));
        ck.expect(check_C(b, c, 3).holds(), "(C3) for (B,C) at seed " + std::to_string(seed));
    }
    return {"masked-perturbation", ck.ok, ck.bad.str()};
}

CaseResult case_identity_slab() {
    Checker ck;
    // factors (X, X^-T, E) reproduce the stacked-identity tensor for any
    // nonsingular X; the all-ones third factor has k-rank 1
    MatQ x{{q(1), q(1), q(0), q(0)},
           {q(0), q(1), q(1), q(0)},
           {q(0), q(0), q(1), q(1)},
           {q(0), q(0), q(0), q(1)}};
    MatQ xinvt{{q(1), q(0), q(0), q(0)},
               {q(-1), q(1), q(0), q(0)},
               {q(1), q(-1), q(1), q(0)},
               {q(-1), q(1), q(-1), q(1)}};
    const int K = 3;
    MatQ e(K, 4);
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < 4; ++j) e(i, j) = 1;
    FactorTriple<Rational> f(x, xinvt, e);
    auto t = from_factors(f);
    ck.expect(is_sfs(t), "stacked-identity tensor is not SFS");
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < K; ++k)
                ck.expect(t(i, j, k) == (i == j ? q(1) : q(0)), "tensor is not the stacked identity");
    ck.expect(krank(e) == 1, "all-ones factor must have k-rank 1");
    auto cert = certify(f);
    ck.expect(cert.tier == Tier::NecessaryViolated, "necessary conditions should be violated");

    MatQ hadamard{{q(1), q(1), q(1), q(1)},
                  {q(1), q(-1), q(1), q(-1)},
                  {q(1), q(1), q(-1), q(-1)},
                  {q(1), q(-1), q(-1), q(1)}};
    MatQ e4(K, 4);
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < 4; ++j) e4(i, j) = 1;
    auto sfs_cert = certify_sfs(hadamard, e4);
    ck.expect(sfs_cert.tier == Tier::Inconclusive, "SFS certifier must not fire on the slab family");
    return {"identity-slab", ck.ok, ck.bad.str()};
}

}  // namespace

std::vector<std::string> case_names() {
    return {"pd-pair-equality", "sharpness-family",     "rank6-cube",
            "rank5-cube",       "wide-third-factor",    "identity-third-factor",
            "w5-construction",  "direction-analysis",   "masked-perturbation",
            "identity-slab"};
}

std::vector<CaseResult> run_cases(const std::string& only, const Rational& alpha) {
    std::vector<std::pair<std::string, std::function<CaseResult()>>> cases = {
        {"pd-pair-equality", case_pd_pair_equality},
        {"sharpness-family", case_sharpness},
        {"rank6-cube", case_rank6_cube},
        {"rank5-cube", case_rank5_cube},
        {"wide-third-factor", case_wide_third},
        {"identity-third-factor", case_identity_third},
        {"w5-construction", case_w5_construction},
        {"direction-analysis", [&alpha] { return case_direction_analysis(alpha); }},
        {"masked-perturbation", case_masked_perturbation},
        {"identity-slab", case_identity_slab},
    };
    std::vector<CaseResult> results;
    for (auto& [name, fn] : cases) {
        if (!only.empty() && only != name) continue;
        results.push_back(fn());
    }
    return results;
}

}  // namespace cpdcert::gallery
