// Batch entry points behind the CLI. Exit codes: 0 success with passing
// certificates, 1 usage/parse error, 2 certificate failure, 3 infeasible
// configuration.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ospca {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitCertificateFailure = 2;
inline constexpr int kExitInfeasible = 3;

struct RunConfig {
    std::string matrix_path;
    int p = 0;
    int k = 0;  // 0 = all n components
    std::string mode = "exact";
    double eps = 0.0;
    double delta = 0.0;
    std::string out_path = "-";  // "-" = stdout
    std::string format = "json";
    std::uint64_t seed = 0;
    int oracle_cap = 12;
    std::string cert_level = "auto";  // auto | cheap | oracle
};

struct GenConfig {
    int n = 0;
    int blocks = 1;
    int block_size = 0;
    double coupling = 1.0;
    double noise = 0.0;
    std::uint64_t seed = 0;
    std::string out_path;
};

struct BenchConfig {
    RunConfig base;
    int r_max = 0;
    std::vector<std::string> modes;
};

struct VerifyConfig {
    std::string matrix_path;
    std::string result_path;
    double tol = 1e-8;
    int oracle_cap = 12;
    std::string cert_level = "auto";
};

int cmd_solve(const RunConfig& cfg);
int cmd_gen(const GenConfig& cfg);
int cmd_bench(const BenchConfig& cfg);
int cmd_verify(const VerifyConfig& cfg);

}  // namespace ospca
