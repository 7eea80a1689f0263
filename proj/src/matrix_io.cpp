#include "ospca/matrix_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace ospca {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

bool parse_number(const std::string& tok, double& out) {
    if (tok.empty()) return false;
    const char* begin = tok.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + tok.size();
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

SymMatrix load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MatrixIoError("cannot open matrix file: " + path);

    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        rows.push_back(split_csv_line(line));
    }
    if (rows.empty()) throw MatrixIoError("matrix file is empty: " + path);

    // Header row: any non-numeric token in the first line.
    std::size_t first = 0;
    {
        bool numeric = true;
        double v;
        for (const auto& tok : rows[0])
            if (!parse_number(tok, v)) {
                numeric = false;
                break;
            }
        if (!numeric) first = 1;
    }
    if (first >= rows.size()) throw MatrixIoError("matrix file has a header but no data: " + path);

    const std::size_t n_rows = rows.size() - first;
    const std::size_t n_cols = rows[first].size();
    if (n_rows != n_cols)
        throw MatrixIoError("matrix is not square: " + std::to_string(n_rows) + " rows, " +
                            std::to_string(n_cols) + " columns");

    std::vector<std::vector<double>> data(n_rows, std::vector<double>(n_cols));
    for (std::size_t i = 0; i < n_rows; ++i) {
        const auto& row = rows[first + i];
        if (row.size() != n_cols)
            throw MatrixIoError("row " + std::to_string(i) + " has " +
                                std::to_string(row.size()) + " columns, expected " +
                                std::to_string(n_cols));
        for (std::size_t j = 0; j < n_cols; ++j) {
            if (!parse_number(row[j], data[i][j]))
                throw MatrixIoError("invalid numeric token '" + row[j] + "' at row " +
                                    std::to_string(i) + ", column " + std::to_string(j));
        }
    }

    try {
        return SymMatrix::from_rows(data);
    } catch (const std::invalid_argument& e) {
        throw MatrixIoError(e.what());
    }
}

void save_matrix_csv(const std::string& path, const SymMatrix& m) {
    std::ofstream out(path);
    if (!out) throw MatrixIoError("cannot open output file: " + path);
    for (int i = 0; i < m.dim(); ++i) {
        for (int j = 0; j < m.dim(); ++j) {
            if (j > 0) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

}  // namespace ospca
