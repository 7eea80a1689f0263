// Command-line front end: solve / verify / gen / bench over CSV covariance
// matrices, emitting JSON or CSV result documents.
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ospca/commands.hpp"
#include "ospca/runtime.hpp"

namespace {

std::vector<std::string> split_modes(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(tok);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* env = std::getenv("ORTHO_SPCA_THREADS")) {
        ospca::set_max_threads(static_cast<unsigned>(std::strtoul(env, nullptr, 10)));
    } else {
        ospca::set_max_threads(0);  // auto
    }

    CLI::App app{"Orthogonal sparse PCA: exact, branch-and-bound, and block-decomposition solvers"};
    app.require_subcommand(1);

    ospca::RunConfig solve_cfg;
    auto* solve = app.add_subcommand("solve", "Solve for sparse components and certify them");
    solve->add_option("--matrix", solve_cfg.matrix_path, "Covariance matrix CSV")->required();
    solve->add_option("--p", solve_cfg.p, "Sparsity bound per component")->required();
    solve->add_option("--k", solve_cfg.k, "Number of components (default: n)");
    solve->add_option("--mode", solve_cfg.mode, "exact|bnb|threshold|deflation")
        ->check(CLI::IsMember({"exact", "bnb", "threshold", "deflation"}));
    solve->add_option("--eps", solve_cfg.eps, "Optimality tolerance for bnb/threshold")
        ->check(CLI::NonNegativeNumber);
    solve->add_option("--delta", solve_cfg.delta, "Threshold for block decomposition")
        ->check(CLI::NonNegativeNumber);
    solve->add_option("--out", solve_cfg.out_path, "Output path ('-' = stdout)");
    solve->add_option("--format", solve_cfg.format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    solve->add_option("--seed", solve_cfg.seed, "Echoed into the result document");
    solve->add_option("--oracle-cap", solve_cfg.oracle_cap,
                      "Max n for oracle-level certification");
    solve->add_option("--cert-level", solve_cfg.cert_level, "auto|cheap|oracle")
        ->check(CLI::IsMember({"auto", "cheap", "oracle"}));

    ospca::GenConfig gen_cfg;
    auto* gen = app.add_subcommand("gen", "Generate a synthetic block covariance matrix");
    gen->add_option("--n", gen_cfg.n, "Dimension (= blocks * block-size)")->required();
    gen->add_option("--blocks", gen_cfg.blocks, "Number of diagonal blocks")->required();
    gen->add_option("--block-size", gen_cfg.block_size, "Size of each block")->required();
    gen->add_option("--coupling", gen_cfg.coupling, "Magnitude of the block factors");
    gen->add_option("--noise", gen_cfg.noise, "Max magnitude of off-block entries")
        ->check(CLI::NonNegativeNumber);
    gen->add_option("--seed", gen_cfg.seed, "Generator seed");
    gen->add_option("--out", gen_cfg.out_path, "Output CSV path")->required();

    ospca::BenchConfig bench_cfg;
    std::string bench_modes = "exact";
    auto* bench = app.add_subcommand("bench", "Per-step solver metrics as CSV");
    bench->add_option("--matrix", bench_cfg.base.matrix_path, "Covariance matrix CSV")->required();
    bench->add_option("--p", bench_cfg.base.p, "Sparsity bound per component")->required();
    bench->add_option("--r-max", bench_cfg.r_max, "Number of steps to record")->required();
    bench->add_option("--mode", bench_modes, "Comma-separated: exact,bnb,threshold,deflation");
    bench->add_option("--eps", bench_cfg.base.eps, "Tolerance for bnb/threshold")
        ->check(CLI::NonNegativeNumber);
    bench->add_option("--delta", bench_cfg.base.delta, "Threshold for block decomposition")
        ->check(CLI::NonNegativeNumber);
    bench->add_option("--out", bench_cfg.base.out_path, "Output path ('-' = stdout)");
    bench->add_option("--seed", bench_cfg.base.seed, "Echoed only");

    ospca::VerifyConfig verify_cfg;
    auto* verify = app.add_subcommand("verify", "Re-certify a saved result against a matrix");
    verify->add_option("--matrix", verify_cfg.matrix_path, "Covariance matrix CSV")->required();
    verify->add_option("--result", verify_cfg.result_path, "Result JSON from solve")->required();
    verify->add_option("--tol", verify_cfg.tol, "Certificate tolerance");
    verify->add_option("--oracle-cap", verify_cfg.oracle_cap,
                       "Max n for oracle-level certification");
    verify->add_option("--cert-level", verify_cfg.cert_level, "auto|cheap|oracle")
        ->check(CLI::IsMember({"auto", "cheap", "oracle"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : ospca::kExitUsage;
    }

    try {
        if (solve->parsed()) return ospca::cmd_solve(solve_cfg);
        if (gen->parsed()) return ospca::cmd_gen(gen_cfg);
        if (bench->parsed()) {
            bench_cfg.modes = split_modes(bench_modes);
            if (bench_cfg.modes.empty()) {
                std::cerr << "error: no bench modes given\n";
                return ospca::kExitUsage;
            }
            return ospca::cmd_bench(bench_cfg);
        }
        if (verify->parsed()) return ospca::cmd_verify(verify_cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ospca::kExitUsage;
    }
    return ospca::kExitUsage;
}
