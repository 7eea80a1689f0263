// Threshold block-diagonalization and the decomposition solvers built on it:
// merging independently solved block sequences, and the greedy candidate-pool
// driver that yields the first K components with a 2*p*delta + eps guarantee.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ospca/spca_bnb.hpp"
#include "ospca/spca_exact.hpp"

namespace ospca {

// Exact unsigned big integer, base 1e9 limbs. Just enough arithmetic for
// binomial coefficients.
struct BigUInt {
    std::vector<std::uint32_t> limbs{0};  // little-endian

    static BigUInt from_u64(std::uint64_t v);
    static BigUInt binomial(int n, int k);
    void mul_small(std::uint64_t m);
    void div_small_exact(std::uint64_t d);
    void add(const BigUInt& other);
    std::string str() const;
    bool operator==(const BigUInt&) const = default;
};

// Result of block-diagonalizing a thresholded matrix. `permutation[r]` is the
// original index placed at permuted position r; `components` hold the original
// coordinates of each connected component; `blocks` are the principal
// submatrices of the thresholded matrix on those components (entries copied
// bit-exact).
struct BlockStructure {
    std::vector<int> permutation;
    std::vector<IndexSet> components;
    std::vector<SymMatrix> blocks;
    std::vector<int> offsets;  // start of each block in permuted coordinates
    double delta = 0.0;
    int n = 0;

    int block_count() const { return static_cast<int>(blocks.size()); }
    SymMatrix assemble() const;  // diag(blocks) in permuted coordinates
};

// Entries with |Q_ij| >= delta are kept (including the diagonal); the rest
// are set to zero.
SymMatrix threshold_matrix(const SymMatrix& q, double delta);

// Connected components of the graph with edges {(i,j) : i != j, Qd_ij != 0},
// each sorted ascending, ordered by smallest member.
std::vector<IndexSet> connected_components(const SymMatrix& qd);

BlockStructure block_diagonalize(const SymMatrix& q, double delta);

// Zero-pads every block solution into the permuted ambient space and sorts
// the union by variance (descending; ties by block index, then emission
// order). The result is a solution for the assembled block-diagonal matrix.
SpcaSolution merge_sorted(const std::vector<SpcaSolution>& block_solutions,
                          const BlockStructure& structure);

enum class BlockSolver { Exact, BranchAndBound };

// Per-block candidate state of the greedy pool driver.
struct CandidatePool {
    struct Entry {
        bool live = false;
        SparseComponent candidate;  // embedded in permuted coordinates
        double variance = 0.0;      // against the assembled block-diagonal matrix
        int emitted = 0;
        std::vector<SparseComponent> previous;  // block-local history
    };
    std::vector<Entry> entries;
};

// Incremental driver: block-diagonalize once, keep one live candidate per
// block, emit the best at each step, then refresh only the contributing
// block. Components come back in original coordinates with variances
// measured against the original matrix.
class ThresholdSolver {
public:
    ThresholdSolver(const SymMatrix& q, int p, double delta, double eps,
                    BlockSolver solver, SolveStats* stats = nullptr);

    const BlockStructure& structure() const { return structure_; }
    double certified_slack() const { return certified_slack_; }
    int emitted() const { return emitted_total_; }
    bool exhausted() const;
    SparseComponent next();

private:
    void refresh_block(int b);

    const SymMatrix& q_;
    BlockStructure structure_;
    CandidatePool pool_;
    int p_ = 0;
    double eps_used_ = 0.0;
    double certified_slack_ = 0.0;
    BlockSolver solver_ = BlockSolver::Exact;
    SolveStats* stats_ = nullptr;
    int emitted_total_ = 0;
    int pending_refresh_ = -1;  // block whose next candidate is computed lazily
};

// First K components via the candidate pool. eps = 0 forces the exact
// per-block solver; the returned solution's eps field carries the end-to-end
// certified slack 2*p*delta + eps.
SpcaSolution threshold_spca(const SymMatrix& q, int p, double delta, double eps,
                            int k_count, BlockSolver solver,
                            SolveStats* stats = nullptr);

// (C(n,p), sum_i C(n_i, min(p, n_i))): support enumeration counts for a flat
// solve versus the decomposed one.
std::pair<BigUInt, BigUInt> predicted_cost(const BlockStructure& structure, int p);

}  // namespace ospca
