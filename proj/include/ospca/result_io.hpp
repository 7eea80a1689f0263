// Result document: what `solve` writes and `verify` reads back. JSON is
// emitted with 17-significant-digit floats so vectors round-trip exactly.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ospca/certify.hpp"
#include "ospca/spca_exact.hpp"

namespace ospca {

struct BnbStepInfo {
    int k = 0;
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    double eps = 0.0;
    std::uint64_t nodes_explored = 0;
    std::uint64_t nodes_pruned = 0;
    bool relaxed = false;
};

struct BlockSummary {
    double delta = 0.0;
    int d = 0;
    std::vector<int> sizes;
    std::vector<std::vector<int>> components;
    std::string cost_full;        // C(n,p), exact decimal
    std::string cost_decomposed;  // sum_i C(n_i, p_i), exact decimal
    std::uint64_t supports_evaluated = 0;
};

struct ResultDocument {
    // config echo
    std::string mode;
    std::string matrix_path;
    int p = 0;
    int k = 0;
    double eps = 0.0;
    double delta = 0.0;
    int oracle_cap = 12;
    std::uint64_t seed = 0;

    // matrix summary
    int n = 0;
    double trace = 0.0;
    std::string fingerprint;

    SpcaSolution solution;

    CertificateReport solution_report;
    bool has_eps_report = false;
    CertificateReport eps_report;
    std::string eps_level = "none";  // none | cheap | oracle | skipped
    double slack = 0.0;

    std::vector<BnbStepInfo> bnb_steps;

    bool has_blocks = false;
    BlockSummary blocks;

    std::vector<std::string> warnings;

    bool aggregate_pass() const;
};

void write_result_json(std::ostream& os, const ResultDocument& doc);
void write_result_csv(std::ostream& os, const ResultDocument& doc);

// Parses a result document written by write_result_json. Fields not present
// keep their defaults.
ResultDocument read_result_json(const std::string& path);

std::string fingerprint_hex(std::uint64_t fp);

}  // namespace ospca
