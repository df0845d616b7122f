#include "cpdcert/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cpdcert {

namespace {

bool looks_decimal(const std::string& tok) {
    return tok.find('.') != std::string::npos || tok.find('e') != std::string::npos ||
           tok.find('E') != std::string::npos;
}

}  // namespace

ParsedMatrix parse_matrix_text(const std::string& text) {
    ParsedMatrix pm;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    int rows = -1, cols = -1;
    std::vector<std::string> tokens;
    std::vector<int> token_lines;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            if (tok == "name") {
                if (!(ls >> pm.name)) throw ParseError("name header without a value", line_no);
            } else if (tok == "rows") {
                if (!(ls >> rows) || rows < 1) throw ParseError("bad rows header", line_no);
            } else if (tok == "cols") {
                if (!(ls >> cols) || cols < 1) throw ParseError("bad cols header", line_no);
            } else {
                tokens.push_back(tok);
                token_lines.push_back(line_no);
            }
        }
    }
    if (rows < 1 || cols < 1) throw ParseError("missing rows/cols header", line_no);
    if (static_cast<long long>(tokens.size()) != static_cast<long long>(rows) * cols)
        throw ParseError("expected " + std::to_string(static_cast<long long>(rows) * cols) +
                             " entries, found " + std::to_string(tokens.size()),
                         line_no);

    pm.exact = true;
    for (const auto& tok : tokens)
        if (looks_decimal(tok)) pm.exact = false;

    pm.float_mat = MatD(rows, cols);
    if (pm.exact) pm.exact_mat = MatQ(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const std::string& tok = tokens[static_cast<std::size_t>(i) * cols + j];
            int at = token_lines[static_cast<std::size_t>(i) * cols + j];
            if (pm.exact) {
                auto q = rational_from_string(tok);
                if (!q) throw ParseError("malformed entry '" + tok + "'", at);
                pm.exact_mat(i, j) = *q;
                pm.float_mat(i, j) = q->get_d();
            } else {
                try {
                    std::size_t used = 0;
                    double v = std::stod(tok, &used);
                    if (used != tok.size()) throw std::invalid_argument(tok);
                    pm.float_mat(i, j) = v;
                } catch (const std::exception&) {
                    // a rational token inside a float file is still fine
                    auto q = rational_from_string(tok);
                    if (!q) throw ParseError("malformed entry '" + tok + "'", at);
                    pm.float_mat(i, j) = q->get_d();
                }
            }
        }
    return pm;
}

ParsedMatrix load_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_matrix_text(buf.str());
}

namespace {

template <class T>
std::string write_matrix_impl(const Matrix<T>& m, const std::string& name) {
    std::ostringstream os;
    if (!name.empty()) os << "name " << name << "\n";
    os << "rows " << m.rows() << "\ncols " << m.cols() << "\n";
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) os << (j ? " " : "") << to_string(m(i, j));
        os << "\n";
    }
    return os.str();
}

}  // namespace

std::string write_matrix_text(const MatQ& m, const std::string& name) {
    return write_matrix_impl(m, name);
}
std::string write_matrix_text(const MatD& m, const std::string& name) {
    return write_matrix_impl(m, name);
}

std::string digest_hex(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

Verdict verdict_from_string(const std::string& s) {
    if (s == "holds") return Verdict::Holds;
    if (s == "fails") return Verdict::Fails;
    if (s == "unknown") return Verdict::Unknown;
    if (s == "not-applicable") return Verdict::NotApplicable;
    throw std::runtime_error("unknown verdict '" + s + "'");
}

Tier tier_from_string(const std::string& s) {
    if (s == "unique-cpd") return Tier::UniqueCPD;
    if (s == "third-factor-unique") return Tier::ThirdFactorUnique;
    if (s == "necessary-violated") return Tier::NecessaryViolated;
    if (s == "inconclusive") return Tier::Inconclusive;
    throw std::runtime_error("unknown tier '" + s + "'");
}

}  // namespace

std::string certificate_json(const Certificate& cert, const std::string& inputs_digest) {
    nlohmann::ordered_json j;
    j["format"] = "cpd-certificate/1";
    j["inputs"] = {{"digest", inputs_digest},
                   {"dims", {cert.dim1, cert.dim2, cert.dim3}},
                   {"terms", cert.terms},
                   {"mode", cert.exact ? "exact" : "float"},
                   {"sfs", cert.sfs}};
    j["computed"] = {{"ranks", cert.ranks}, {"kranks", cert.kranks}, {"orders", cert.orders}};
    nlohmann::ordered_json table = nlohmann::ordered_json::array();
    for (const auto& r : cert.table) {
        nlohmann::ordered_json e;
        e["condition"] = r.condition;
        e["roles"] = r.roles;
        e["order"] = r.order;
        e["verdict"] = to_string(r.verdict);
        e["detail"] = r.detail;
        e["witnesses"] = r.witnesses;
        table.push_back(std::move(e));
    }
    j["conditions"] = std::move(table);
    nlohmann::ordered_json fired = nlohmann::ordered_json::array();
    for (const auto& f : cert.fired)
        fired.push_back({{"rule", f.rule}, {"roles", f.roles}, {"tier", to_string(f.tier)},
                         {"note", f.note}});
    j["fired"] = std::move(fired);
    j["conclusion"] = {{"tier", to_string(cert.tier)},
                       {"third_factor_role", cert.unique_third_role},
                       {"necessary_violated", cert.necessary_violated},
                       {"necessary_all_hold", cert.necessary_all_hold}};
    j["summary"] = cert.summary();
    return j.dump(2) + "\n";
}

Certificate certificate_from_json(const std::string& json_text) {
    auto j = nlohmann::ordered_json::parse(json_text);
    if (j.at("format").get<std::string>() != "cpd-certificate/1")
        throw std::runtime_error("unsupported certificate format tag");
    Certificate c;
    const auto& in = j.at("inputs");
    c.dim1 = in.at("dims").at(0).get<int>();
    c.dim2 = in.at("dims").at(1).get<int>();
    c.dim3 = in.at("dims").at(2).get<int>();
    c.terms = in.at("terms").get<int>();
    c.exact = in.at("mode").get<std::string>() == "exact";
    c.sfs = in.at("sfs").get<bool>();
    const auto& comp = j.at("computed");
    for (int i = 0; i < 3; ++i) {
        c.ranks[static_cast<std::size_t>(i)] = comp.at("ranks").at(static_cast<std::size_t>(i)).get<int>();
        c.kranks[static_cast<std::size_t>(i)] = comp.at("kranks").at(static_cast<std::size_t>(i)).get<int>();
        c.orders[static_cast<std::size_t>(i)] = comp.at("orders").at(static_cast<std::size_t>(i)).get<int>();
    }
    for (const auto& e : j.at("conditions")) {
        ConditionRecord r;
        r.condition = e.at("condition").get<std::string>();
        r.roles = e.at("roles").get<std::string>();
        r.order = e.at("order").get<int>();
        r.verdict = verdict_from_string(e.at("verdict").get<std::string>());
        r.detail = e.at("detail").get<std::string>();
        r.witnesses = e.at("witnesses").get<std::vector<std::vector<std::string>>>();
        c.table.push_back(std::move(r));
    }
    for (const auto& e : j.at("fired")) {
        FiredRule f;
        f.rule = e.at("rule").get<std::string>();
        f.roles = e.at("roles").get<std::string>();
        f.tier = tier_from_string(e.at("tier").get<std::string>());
        f.note = e.at("note").get<std::string>();
        c.fired.push_back(std::move(f));
    }
    const auto& con = j.at("conclusion");
    c.tier = tier_from_string(con.at("tier").get<std::string>());
    c.unique_third_role = con.at("third_factor_role").get<int>();
    c.necessary_violated = con.at("necessary_violated").get<bool>();
    c.necessary_all_hold = con.at("necessary_all_hold").get<bool>();
    return c;
}

int exit_code_for(Tier t) {
    switch (t) {
        case Tier::UniqueCPD: return 0;
        case Tier::ThirdFactorUnique: return 2;
        case Tier::Inconclusive: return 3;
        case Tier::NecessaryViolated: return 4;
    }
    return 1;
}

}  // namespace cpdcert
