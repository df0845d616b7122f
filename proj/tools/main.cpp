#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "cpdcert/gallery.hpp"
#include "cpdcert/generic.hpp"
#include "cpdcert/io.hpp"

using namespace cpdcert;

namespace {

struct LoadedTriple {
    bool exact = true;
    std::optional<FactorTriple<Rational>> q;
    std::optional<FactorTriple<double>> d;
    std::string digest;
};

int resolve_mode(const std::string& mode, bool files_exact) {
    // 1 = exact, 0 = float
    if (mode == "exact") {
        if (!files_exact)
            throw std::runtime_error("exact mode requested but an input has decimal entries");
        return 1;
    }
    if (mode == "float") return 0;
    return files_exact ? 1 : 0;
}

LoadedTriple load_triple(const std::string& pa, const std::string& pb, const std::string& pc,
                         const std::string& mode) {
    ParsedMatrix a = load_matrix_file(pa), b = load_matrix_file(pb), c = load_matrix_file(pc);
    LoadedTriple t;
    bool files_exact = a.exact && b.exact && c.exact;
    t.exact = resolve_mode(mode, files_exact) == 1;
    if (t.exact) {
        t.q.emplace(a.exact_mat, b.exact_mat, c.exact_mat);
        t.digest = digest_hex(write_matrix_text(a.exact_mat) + write_matrix_text(b.exact_mat) +
                              write_matrix_text(c.exact_mat));
    } else {
        t.d.emplace(a.float_mat, b.float_mat, c.float_mat);
        t.digest = digest_hex(write_matrix_text(a.float_mat) + write_matrix_text(b.float_mat) +
                              write_matrix_text(c.float_mat));
    }
    return t;
}

void emit_certificate(const Certificate& cert, const std::string& digest,
                      const std::string& out_path) {
    std::cout << cert.summary();
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << certificate_json(cert, digest);
    }
}

SamplerKind sampler_from_name(const std::string& name) {
    if (name == "dense") return SamplerKind::dense();
    if (name == "toeplitz") return SamplerKind::toeplitz();
    if (name == "hankel") return SamplerKind::hankel();
    throw std::runtime_error("unknown sampler '" + name + "'");
}

WitnessMode witness_mode_from_name(const std::string& name) {
    if (name == "exact") return WitnessMode::Exact;
    if (name == "float") return WitnessMode::Float;
    if (name == "auto") return WitnessMode::Auto;
    throw std::runtime_error("unknown mode '" + name + "'");
}

void parse_range_spec(const std::string& spec, TableRanges& r) {
    // "I=4..7,K=2..33" in any order, either part optional
    std::istringstream in(spec);
    std::string part;
    while (std::getline(in, part, ',')) {
        if (part.empty()) continue;
        char axis = part[0];
        auto eq = part.find('=');
        auto dots = part.find("..");
        if (eq == std::string::npos || dots == std::string::npos)
            throw std::runtime_error("bad range spec '" + part + "' (use I=lo..hi)");
        int lo = std::stoi(part.substr(eq + 1, dots - eq - 1));
        int hi = std::stoi(part.substr(dots + 2));
        if (axis == 'I' || axis == 'i') { r.i_lo = lo; r.i_hi = hi; }
        else if (axis == 'K' || axis == 'k') { r.k_lo = lo; r.k_hi = hi; }
        else throw std::runtime_error("bad range axis '" + std::string(1, axis) + "'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"certification of uniqueness for canonical polyadic decompositions"};
    app.require_subcommand(1);

    // check
    std::string pa, pb, pc, mode = "auto", roles = "all", out_path;
    std::optional<double> tol;
    auto* check = app.add_subcommand("check", "certify a factor triple read from matrix files");
    check->add_option("a", pa, "first factor file")->required();
    check->add_option("b", pb, "second factor file")->required();
    check->add_option("c", pc, "third factor file")->required();
    check->add_option("--mode", mode, "exact|float|auto (default auto)");
    check->add_option("--tol", tol, "float rank tolerance");
    check->add_option("--roles", roles, "all|fixed role assignments");
    check->add_option("--out", out_path, "write the certificate document here");

    // check-sfs
    std::string spa, spc, smode = "auto", sout;
    std::optional<double> stol;
    auto* check_sfs = app.add_subcommand("check-sfs",
                                         "certify a symmetric-frontal-slice decomposition (A, A, C)");
    check_sfs->add_option("a", spa, "shared factor file")->required();
    check_sfs->add_option("c", spc, "third factor file")->required();
    check_sfs->add_option("--mode", smode, "exact|float|auto");
    check_sfs->add_option("--tol", stol, "float rank tolerance");
    check_sfs->add_option("--out", sout, "write the certificate document here");

    // generic
    std::vector<int> dims;
    int grank = 0;
    bool max_rank = false;
    std::string sampler = "dense", gmode = "auto";
    int trials = 3;
    std::uint64_t seed = 1;
    auto* generic = app.add_subcommand("generic", "generic-uniqueness witness search");
    generic->add_option("--dims", dims, "tensor dimensions I J K")->expected(3)->required();
    auto* rank_opt = generic->add_option("--rank", grank, "number of terms R");
    generic->add_flag("--max-rank", max_rank, "sweep R and report the largest witnessed value");
    generic->add_option("--sampler", sampler, "dense|toeplitz|hankel");
    generic->add_option("--trials", trials, "witness attempts per probe");
    generic->add_option("--seed", seed, "base RNG seed");
    generic->add_option("--mode", gmode, "exact|float|auto");

    // tables
    std::string which, tout = "text", tpath, trange;
    std::uint64_t tseed = 1;
    int ttrials = 3;
    std::string tmode = "auto";
    auto* tables = app.add_subcommand("tables", "regenerate the reference tables");
    tables->add_option("--which", which, "2|3|umwm")->required();
    tables->add_option("--range", trange, "e.g. I=4..7,K=2..33");
    tables->add_option("--out", tout, "text|csv");
    tables->add_option("--path", tpath, "output file (default stdout)");
    tables->add_option("--seed", tseed, "base RNG seed");
    tables->add_option("--trials", ttrials, "witness attempts per probe");
    tables->add_option("--mode", tmode, "exact|float|auto");

    // examples
    std::string only, alpha_text = "1";
    auto* examples = app.add_subcommand("examples", "run the built-in regression gallery");
    examples->add_option("--only", only, "run a single named case");
    examples->add_option("--alpha", alpha_text,
                         "parameter of the direction-analysis family (integer or p/q)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*check) {
            auto t = load_triple(pa, pb, pc, mode);
            CertifyOptions opts;
            opts.all_roles = roles != "fixed";
            opts.check.tol.rank_tol = tol;
            if (t.exact && tol)
                throw std::runtime_error("--tol applies to float mode only");
            Certificate cert = t.exact ? certify(*t.q, opts) : certify(*t.d, opts);
            emit_certificate(cert, t.digest, out_path);
            return exit_code_for(cert.tier);
        }
        if (*check_sfs) {
            ParsedMatrix a = load_matrix_file(spa), c = load_matrix_file(spc);
            bool exact = resolve_mode(smode, a.exact && c.exact) == 1;
            if (exact && stol) throw std::runtime_error("--tol applies to float mode only");
            CertifyOptions opts;
            opts.check.tol.rank_tol = stol;
            Certificate cert;
            std::string digest;
            if (exact) {
                cert = certify_sfs(a.exact_mat, c.exact_mat, opts);
                digest = digest_hex(write_matrix_text(a.exact_mat) + write_matrix_text(c.exact_mat));
            } else {
                cert = certify_sfs(a.float_mat, c.float_mat, opts);
                digest = digest_hex(write_matrix_text(a.float_mat) + write_matrix_text(c.float_mat));
            }
            emit_certificate(cert, digest, sout);
            return exit_code_for(cert.tier);
        }
        if (*generic) {
            GenericOptions opts;
            opts.trials = trials;
            opts.mode = witness_mode_from_name(gmode);
            opts.kinds = {sampler_from_name(sampler), sampler_from_name(sampler),
                          sampler_from_name(sampler)};
            const int I = dims[0], J = dims[1], K = dims[2];
            if (max_rank) {
                int best = 0;
                std::optional<GenericVerdict> best_v;
                for (int R = 1; R <= 2 * (I + J + K); ++R) {
                    std::optional<GenericVerdict> v;
                    try {
                        v = generic_unique_cpd(I, J, K, R, opts, seed);
                    } catch (const std::invalid_argument&) {
                        continue;  // beyond the probe guard
                    }
                    if (v) { best = R; best_v = v; }
                }
                if (best > 0) {
                    std::cout << "largest witnessed R = " << best << " (condition " << best_v->condition
                              << ", order " << best_v->order << ", "
                              << (best_v->exact ? "exact" : "float") << ", seed "
                              << best_v->witness_seed << ")\n";
                } else {
                    std::cout << "no witness found at any feasible R\n";
                }
                return 0;
            }
            if (rank_opt->count() == 0) throw std::runtime_error("give --rank R or --max-rank");
            auto v = generic_unique_cpd(I, J, K, grank, opts, seed);
            if (v) {
                std::cout << "witness found: R = " << grank << ", condition " << v->condition
                          << ", order " << v->order << ", " << (v->exact ? "exact" : "float")
                          << (v->exact ? "" : " (non-certified)") << ", seed " << v->witness_seed
                          << "\n" << v->detail << "\n";
            } else {
                std::cout << "no witness found (the search is one-sided; no non-uniqueness claim)\n";
            }
            return 0;
        }
        if (*tables) {
            TableKind kind;
            if (which == "2") kind = TableKind::Two;
            else if (which == "3") kind = TableKind::Three;
            else if (which == "umwm") kind = TableKind::UmWm;
            else throw std::runtime_error("--which must be 2, 3 or umwm");
            TableRanges ranges;
            if (kind == TableKind::Two) { ranges.i_lo = 4; ranges.i_hi = 9; }
            if (!trange.empty()) parse_range_spec(trange, ranges);
            GenericOptions opts;
            opts.trials = ttrials;
            opts.mode = witness_mode_from_name(tmode);
            Table t = make_table(kind, ranges, opts, tseed);
            std::string body;
            if (tout == "csv") body = table_csv(t);
            else {
                std::ostringstream os;
                os << t.title << "\n";
                for (const auto& p : t.provenance) os << p << "\n";
                os << t.text;
                body = os.str();
            }
            if (tpath.empty()) std::cout << body;
            else {
                std::ofstream f(tpath);
                if (!f) throw std::runtime_error("cannot write " + tpath);
                f << body;
            }
            return 0;
        }
        if (*examples) {
            auto alpha = rational_from_string(alpha_text);
            if (!alpha || sgn(*alpha) == 0)
                throw std::runtime_error("--alpha must be a nonzero integer or p/q");
            if (!only.empty()) {
                auto names = gallery::case_names();
                if (std::find(names.begin(), names.end(), only) == names.end())
                    throw std::runtime_error("unknown case '" + only + "'");
            }
            auto results = gallery::run_cases(only, *alpha);
            bool all = true;
            for (const auto& r : results) {
                std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name;
                if (!r.pass) std::cout << "  [" << r.message << "]";
                std::cout << "\n";
                all = all && r.pass;
            }
            return all ? 0 : 5;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
