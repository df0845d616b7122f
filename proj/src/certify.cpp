#include "cpdcert/certify.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace cpdcert {

std::string to_string(Tier t) {
    switch (t) {
        case Tier::UniqueCPD: return "unique-cpd";
        case Tier::ThirdFactorUnique: return "third-factor-unique";
        case Tier::NecessaryViolated: return "necessary-violated";
        case Tier::Inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

constexpr const char* kNames[3] = {"A", "B", "C"};

template <class T>
std::vector<std::vector<std::string>> render_witnesses(
    const std::vector<std::vector<T>>& ws) {
    std::vector<std::vector<std::string>> out;
    for (const auto& w : ws) {
        std::vector<std::string> row;
        row.reserve(w.size());
        for (const auto& x : w) row.push_back(to_string(x));
        out.push_back(std::move(row));
    }
    return out;
}

std::string pair_roles(int x, int y) {
    return std::string("(") + kNames[x] + "," + kNames[y] + ")";
}
std::string triple_roles(int x, int y, int z) {
    return std::string("(") + kNames[x] + "," + kNames[y] + ";" + kNames[z] + ")";
}

template <class T>
ConditionRecord record_of(const std::string& cond, const std::string& roles, int order,
                          const ConditionOutcome<T>& out) {
    ConditionRecord r;
    r.condition = cond;
    r.roles = roles;
    r.order = order;
    r.verdict = out.verdict;
    r.detail = out.detail;
    r.witnesses = render_witnesses(out.witnesses);
    return r;
}

/// max(min(k_X, k_Y - 1), min(k_X - 1, k_Y))
int mixed_krank_bound(int kx, int ky) {
    return std::max(std::min(kx, ky - 1), std::min(kx - 1, ky));
}

}  // namespace

template <class T>
NecessaryReport<T> necessary_conditions(const FactorTriple<T>& f, const CertifyOptions& opts) {
    NecessaryReport<T> rep;
    const Matrix<T>* m[3] = {&f.A, &f.B, &f.C};
    int kr[3];
    for (int i = 0; i < 3; ++i) kr[i] = krank_t(*m[i], opts.check.tol);

    {
        ConditionRecord r;
        r.condition = "necessary-krank";
        r.roles = "(A,B,C)";
        int mn = std::min({kr[0], kr[1], kr[2]});
        r.verdict = mn >= 2 ? Verdict::Holds : Verdict::Fails;
        r.detail = "min k-rank = " + std::to_string(mn);
        rep.records.push_back(r);
    }
    for (int i = 0; i < 3; ++i) {
        int x = i, y = (i + 1) % 3;
        ConditionRecord r;
        r.condition = "necessary-kr-product";
        r.roles = pair_roles(x, y);
        bool ok = full_column_rank_t(khatri_rao(*m[x], *m[y]), opts.check.tol);
        r.verdict = ok ? Verdict::Holds : Verdict::Fails;
        r.detail = std::string(kNames[x]) + " (.) " + kNames[y] +
                   (ok ? " has full column rank" : " is column rank deficient");
        rep.records.push_back(r);
    }
    for (int i = 0; i < 3; ++i) {
        int x = i, y = (i + 1) % 3;
        auto out = check_U(*m[x], *m[y], 2, opts.check);
        rep.records.push_back(record_of("necessary-U", pair_roles(x, y), 2, out));
    }

    rep.violated = std::any_of(rep.records.begin(), rep.records.end(),
                               [](const ConditionRecord& r) { return r.verdict == Verdict::Fails; });
    rep.all_hold = std::all_of(rep.records.begin(), rep.records.end(),
                               [](const ConditionRecord& r) { return r.verdict == Verdict::Holds; });
    return rep;
}

template <class T>
ConditionOutcome<T> check_common_one(const FactorTriple<T>& f, int common_role,
                                     const CertifyOptions& opts) {
    if (common_role < 0 || common_role > 2)
        throw std::invalid_argument("check_common_one: role must be 0, 1 or 2");
    const Matrix<T>* m[3] = {&f.A, &f.B, &f.C};
    int z = common_role, x = (z + 1) % 3, y = (z + 2) % 3;
    int kx = krank_t(*m[x], opts.check.tol);
    int ky = krank_t(*m[y], opts.check.tol);
    int kz = krank_t(*m[z], opts.check.tol);
    int lhs = mixed_krank_bound(kx, ky) + kz;
    ConditionOutcome<T> out;
    out.verdict = lhs >= f.terms() + 1 ? Verdict::Holds : Verdict::Fails;
    out.detail = "max(min(k_" + std::string(kNames[x]) + ",k_" + kNames[y] +
                 "-1),min(k_" + kNames[x] + "-1,k_" + kNames[y] + ")) + k_" + kNames[z] +
                 " = " + std::to_string(lhs) + " vs R+1 = " + std::to_string(f.terms() + 1);
    return out;
}

template <class T>
ConditionOutcome<T> check_common_two(const FactorTriple<T>& f, const CertifyOptions& opts) {
    const Matrix<T>* m[3] = {&f.A, &f.B, &f.C};
    int kr[3], rk[3];
    for (int i = 0; i < 3; ++i) {
        kr[i] = krank_t(*m[i], opts.check.tol);
        rk[i] = rank_t(*m[i], opts.check.tol);
    }
    const int R = f.terms();
    bool first = kr[2] >= 2 && mixed_krank_bound(kr[0], kr[1]) + rk[2] >= R + 1;
    bool second = kr[0] >= 2 && mixed_krank_bound(kr[1], kr[2]) + rk[0] >= R + 1;
    ConditionOutcome<T> out;
    out.verdict = (first || second) ? Verdict::Holds : Verdict::Fails;
    out.detail = std::string("line 1 ") + (first ? "holds" : "fails") + ", line 2 " +
                 (second ? "holds" : "fails");
    return out;
}

template <class T>
Certificate certify(const FactorTriple<T>& f, const CertifyOptions& opts) {
    Certificate cert;
    cert.dim1 = f.A.rows();
    cert.dim2 = f.B.rows();
    cert.dim3 = f.C.rows();
    cert.terms = f.terms();
    cert.exact = std::is_same_v<T, Rational>;
    const int R = f.terms();
    const Matrix<T>* m[3] = {&f.A, &f.B, &f.C};
    for (int i = 0; i < 3; ++i) {
        cert.ranks[static_cast<std::size_t>(i)] = rank_t(*m[i], opts.check.tol);
        cert.kranks[static_cast<std::size_t>(i)] = krank_t(*m[i], opts.check.tol);
        cert.orders[static_cast<std::size_t>(i)] = R - cert.ranks[static_cast<std::size_t>(i)] + 2;
    }

    auto nec = necessary_conditions(f, opts);
    cert.necessary_violated = nec.violated;
    cert.necessary_all_hold = nec.all_hold;
    for (auto& r : nec.records) cert.table.push_back(std::move(r));

    // Kruskal: k_A + k_B + k_C >= 2R + 2
    {
        int s = cert.kranks[0] + cert.kranks[1] + cert.kranks[2];
        ConditionRecord r;
        r.condition = "kruskal-sum";
        r.roles = "(A,B,C)";
        r.verdict = s >= 2 * R + 2 ? Verdict::Holds : Verdict::Fails;
        r.detail = "k-rank sum = " + std::to_string(s) + " vs 2R+2 = " + std::to_string(2 * R + 2);
        cert.table.push_back(r);
        if (r.verdict == Verdict::Holds)
            cert.fired.push_back({"kruskal", "(A,B,C)", Tier::UniqueCPD, r.detail});
    }

    // two-k rule over the cyclic rotations (X, Y, Z)
    {
        int nrot = opts.all_roles ? 3 : 1;
        for (int rot = 0; rot < nrot; ++rot) {
            int x = rot, y = (rot + 1) % 3, z = (rot + 2) % 3;
            int kx = cert.kranks[static_cast<std::size_t>(x)];
            int ry = cert.ranks[static_cast<std::size_t>(y)], rz = cert.ranks[static_cast<std::size_t>(z)];
            int ky = cert.kranks[static_cast<std::size_t>(y)], kz = cert.kranks[static_cast<std::size_t>(z)];
            bool line1 = kx + ry + rz >= 2 * R + 2;
            bool line2 = std::min(rz + ky, kz + ry) >= R + 2;
            ConditionRecord r;
            r.condition = "two-k";
            r.roles = std::string("(") + kNames[x] + "," + kNames[y] + "," + kNames[z] + ")";
            r.verdict = (line1 && line2) ? Verdict::Holds : Verdict::Fails;
            r.detail = "k_" + std::string(kNames[x]) + "+r_" + kNames[y] + "+r_" + kNames[z] +
                       " = " + std::to_string(kx + ry + rz) + " vs " + std::to_string(2 * R + 2) +
                       "; min = " + std::to_string(std::min(rz + ky, kz + ry)) + " vs " +
                       std::to_string(R + 2);
            cert.table.push_back(r);
            if (r.verdict == Verdict::Holds)
                cert.fired.push_back({"two_k", r.roles, Tier::UniqueCPD, r.detail});
        }
    }

    // two-of-three rule: (U m_X) for the complementary pair of each role
    {
        int holds = 0;
        std::string which;
        for (int zrole = 0; zrole < 3; ++zrole) {
            int x = (zrole + 1) % 3, y = (zrole + 2) % 3;
            int order = cert.orders[static_cast<std::size_t>(zrole)];
            auto out = check_U(*m[x], *m[y], order, opts.check);
            cert.table.push_back(record_of("U", pair_roles(x, y), order, out));
            if (out.holds()) {
                ++holds;
                which += std::string(which.empty() ? "" : ", ") + "(U" + std::to_string(order) +
                         ") for " + pair_roles(x, y);
            }
        }
        if (holds >= 2)
            cert.fired.push_back({"two_of_three_U", "(A,B,C)", Tier::UniqueCPD, which});
    }

    // one-factor route: (5.1) + (C1) + (W m_Z) gives overall uniqueness;
    // the weaker premise set gives uniqueness of the third factor only
    {
        int nroles = opts.all_roles ? 3 : 1;
        for (int i = 0; i < nroles; ++i) {
            int z = opts.all_roles ? i : 2;
            int x = (z + 1) % 3, y = (z + 2) % 3;
            if (z == 2) { x = 0; y = 1; }
            int order = cert.orders[static_cast<std::size_t>(z)];

            auto eq51 = check_common_one(f, z, opts);
            cert.table.push_back(record_of("common-one", triple_roles(x, y, z), 0, eq51));

            ConditionRecord c1;
            c1.condition = "C1";
            c1.roles = pair_roles(x, y);
            bool c1_ok = full_column_rank_t(khatri_rao(*m[x], *m[y]), opts.check.tol);
            c1.verdict = c1_ok ? Verdict::Holds : Verdict::Fails;
            c1.detail = std::string(kNames[x]) + " (.) " + kNames[y] +
                        (c1_ok ? " has full column rank" : " is column rank deficient");
            cert.table.push_back(c1);

            auto w = check_W(*m[x], *m[y], *m[z], order, opts.check);
            cert.table.push_back(record_of("W", triple_roles(x, y, z), order, w));

            int minxy = std::min(cert.kranks[static_cast<std::size_t>(x)],
                                 cert.kranks[static_cast<std::size_t>(y)]);
            if (eq51.holds() && c1_ok && w.holds()) {
                cert.fired.push_back({"one_factor_w", triple_roles(x, y, z), Tier::UniqueCPD,
                                      "(5.1)-type inequality, (C1) and (W" + std::to_string(order) +
                                          ") all hold"});
            } else if (c1_ok && w.holds() && minxy >= order - 1 &&
                       cert.kranks[static_cast<std::size_t>(z)] >= 1) {
                cert.fired.push_back({"third_factor_w", triple_roles(x, y, z),
                                      Tier::ThirdFactorUnique,
                                      "(C1), (W" + std::to_string(order) +
                                          ") and the k-rank chain premise hold"});
                if (cert.unique_third_role < 0) cert.unique_third_role = z;
            }
        }
    }

    // informational: the two-common-factor inequality set
    cert.table.push_back(record_of("common-two", "(A,B,C)", 0, check_common_two(f, opts)));

    cert.tier = Tier::Inconclusive;
    bool unique = std::any_of(cert.fired.begin(), cert.fired.end(),
                              [](const FiredRule& r) { return r.tier == Tier::UniqueCPD; });
    bool third = std::any_of(cert.fired.begin(), cert.fired.end(),
                             [](const FiredRule& r) { return r.tier == Tier::ThirdFactorUnique; });
    if (unique) {
        if (cert.necessary_violated)
            throw std::logic_error("certify: a uniqueness rule fired against a violated necessary condition");
        cert.tier = Tier::UniqueCPD;
    } else if (third) {
        cert.tier = Tier::ThirdFactorUnique;
    } else if (cert.necessary_violated) {
        cert.tier = Tier::NecessaryViolated;
    }
    return cert;
}

template <class T>
Certificate certify_sfs(const Matrix<T>& a, const Matrix<T>& c, const CertifyOptions& opts) {
    FactorTriple<T> f(a, a, c);
    Certificate cert = certify(f, opts);
    cert.sfs = true;
    const int R = f.terms();
    int ka = cert.kranks[0], kc = cert.kranks[2];
    int m_a = cert.orders[0], m_c = cert.orders[2];

    auto caa = check_C(a, a, m_c, opts.check);
    cert.table.push_back(record_of("sfs-C", "(A,A)", m_c, caa));
    auto cac = check_C(a, c, m_a, opts.check);
    cert.table.push_back(record_of("sfs-C", "(A,C)", m_a, cac));

    {
        ConditionRecord r;
        r.condition = "sfs-krank-sum";
        r.roles = "(A,C)";
        r.verdict = ka + kc >= R + 2 ? Verdict::Holds : Verdict::Fails;
        r.detail = "k_A + k_C = " + std::to_string(ka + kc) + " vs R+2 = " + std::to_string(R + 2);
        cert.table.push_back(r);
        if (r.verdict == Verdict::Holds && caa.holds())
            cert.fired.push_back({"sfs_pair_compound", "(A,A;C)", Tier::UniqueCPD,
                                  "k_A + k_C >= R+2 and the (A,A) compound product has full column rank"});
    }
    {
        int lhs = ka + mixed_krank_bound(kc, ka);
        ConditionRecord r;
        r.condition = "sfs-krank-mixed";
        r.roles = "(A,C)";
        r.verdict = lhs >= R + 1 ? Verdict::Holds : Verdict::Fails;
        r.detail = "k_A + max(min(k_C-1,k_A),min(k_C,k_A-1)) = " + std::to_string(lhs) +
                   " vs R+1 = " + std::to_string(R + 1);
        cert.table.push_back(r);
        if (r.verdict == Verdict::Holds && cac.holds())
            cert.fired.push_back({"sfs_cross_compound", "(A,C;A)", Tier::UniqueCPD,
                                  "mixed k-rank inequality and the (A,C) compound product hold"});
    }
    if (caa.holds() && cac.holds())
        cert.fired.push_back({"sfs_both_compound", "(A,A,C)", Tier::UniqueCPD,
                              "both compound products have full column rank"});

    bool unique = std::any_of(cert.fired.begin(), cert.fired.end(),
                              [](const FiredRule& r) { return r.tier == Tier::UniqueCPD; });
    // An SFS decomposition may be unique even when the unsymmetric CPD is not,
    // so a violated unsymmetric necessary condition never downgrades past
    // Inconclusive here.
    cert.tier = unique ? Tier::UniqueCPD : Tier::Inconclusive;
    cert.unique_third_role = -1;
    return cert;
}

std::string Certificate::summary() const {
    std::ostringstream os;
    os << (sfs ? "SFS decomposition" : "decomposition") << " " << dim1 << "x" << dim2 << "x"
       << dim3 << ", R = " << terms << ", " << (exact ? "exact" : "float") << " mode\n";
    os << "ranks (A,B,C) = (" << ranks[0] << "," << ranks[1] << "," << ranks[2] << ")";
    os << ", k-ranks = (" << kranks[0] << "," << kranks[1] << "," << kranks[2] << ")";
    os << ", orders m = (" << orders[0] << "," << orders[1] << "," << orders[2] << ")\n";
    if (fired.empty()) {
        os << "no rule fired\n";
    } else {
        for (const auto& r : fired)
            os << "fired " << r.rule << " " << r.roles << " -> " << to_string(r.tier) << "\n";
    }
    os << "conclusion: " << to_string(tier);
    if (tier == Tier::ThirdFactorUnique && unique_third_role >= 0)
        os << " (" << kNames[unique_third_role] << ")";
    os << "\n";
    return os.str();
}

template NecessaryReport<Rational> necessary_conditions<Rational>(const FactorTriple<Rational>&,
                                                                  const CertifyOptions&);
template NecessaryReport<double> necessary_conditions<double>(const FactorTriple<double>&,
                                                              const CertifyOptions&);
template ConditionOutcome<Rational> check_common_one<Rational>(const FactorTriple<Rational>&, int,
                                                               const CertifyOptions&);
template ConditionOutcome<double> check_common_one<double>(const FactorTriple<double>&, int,
                                                           const CertifyOptions&);
template ConditionOutcome<Rational> check_common_two<Rational>(const FactorTriple<Rational>&,
                                                               const CertifyOptions&);
template ConditionOutcome<double> check_common_two<double>(const FactorTriple<double>&,
                                                           const CertifyOptions&);
template Certificate certify<Rational>(const FactorTriple<Rational>&, const CertifyOptions&);
template Certificate certify<double>(const FactorTriple<double>&, const CertifyOptions&);
template Certificate certify_sfs<Rational>(const MatQ&, const MatQ&, const CertifyOptions&);
template Certificate certify_sfs<double>(const MatD&, const MatD&, const CertifyOptions&);

}  // namespace cpdcert
