#pragma once

#include <stdexcept>
#include <string>

#include "ospca/linalg.hpp"

namespace ospca {

struct MatrixIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Reads a square numeric CSV (UTF-8, LF or CRLF). A header row is
// auto-detected by a non-numeric first token. Symmetrization follows the
// checked SymMatrix construction rules.
SymMatrix load_matrix(const std::string& path);

void save_matrix_csv(const std::string& path, const SymMatrix& m);

// Shortest-faithful decimal for doubles (17 significant digits).
std::string format_double(double v);

}  // namespace ospca
