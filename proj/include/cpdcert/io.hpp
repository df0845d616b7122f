#pragma once

#include <stdexcept>
#include <string>

#include "cpdcert/certify.hpp"
#include "cpdcert/matrix.hpp"

namespace cpdcert {

struct ParseError : std::runtime_error {
    int line;
    ParseError(const std::string& what, int line_no)
        : std::runtime_error(what + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
};

/// A matrix file: `name`, `rows`, `cols` headers followed by row-major
/// entries. Integer and p/q entries keep the file exact; any decimal entry
/// switches the whole matrix (and any run using it) to float mode.
struct ParsedMatrix {
    std::string name;
    bool exact = true;
    MatQ exact_mat;   // populated when exact
    MatD float_mat;   // always populated
};

ParsedMatrix parse_matrix_text(const std::string& text);
ParsedMatrix load_matrix_file(const std::string& path);

/// Canonical form; write(parse(f)) is byte-identical for canonical files.
std::string write_matrix_text(const MatQ& m, const std::string& name = "");
std::string write_matrix_text(const MatD& m, const std::string& name = "");

/// Versioned, diff-stable serialization of a certificate.
std::string certificate_json(const Certificate& cert, const std::string& inputs_digest);
Certificate certificate_from_json(const std::string& json_text);

std::string digest_hex(const std::string& data);  // FNV-1a 64

/// Exit code contract of the command-line frontend: a total function of the
/// conclusion tier (1 is reserved for input errors).
int exit_code_for(Tier t);

}  // namespace cpdcert
