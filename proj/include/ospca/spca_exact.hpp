// Exact solver for the k-th orthogonal sparse PCA subproblem: enumerate all
// size-p supports, solve the orthogonality-reduced eigenproblem on each, and
// keep the best. A sequential driver produces full component sequences.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ospca/linalg.hpp"
#include "ospca/solve_stats.hpp"

namespace ospca {

// Unit vector with an explicit support set. `sparsity_relaxed` marks dense
// completion components emitted when no p-sparse support admits a direction
// orthogonal to all previous components.
struct SparseComponent {
    IndexSet support;
    std::vector<double> values;  // |support| entries, unit norm
    double variance = 0.0;       // x^T Q x against the solved matrix
    bool sparsity_relaxed = false;

    std::vector<double> embedded() const { return embed(values, support); }
};

struct SpcaSolution {
    std::vector<SparseComponent> components;
    int n = 0;
    int p = 0;
    std::uint64_t q_fingerprint = 0;
    std::string mode;  // exact | bnb | threshold | deflation | merged
    double eps = 0.0;  // certified optimality slack (0 for exact solves)

    double total_variance() const;
};

// Outcome of the reduced PCA problem on one support. `feasible == false`
// means the restrictions of the previous components span all of R^|Y|, so
// no unit vector on Y can be orthogonal to them.
struct ReducedPca {
    bool feasible = false;
    double lambda = 0.0;
    std::vector<double> z;  // |Y| entries, unit norm, orthogonal to restrictions
    int basis_dim = 0;      // dimension spanned by the restricted previous components
};

ReducedPca reduced_pca_on_support(const SymMatrix& q, const IndexSet& y,
                                  const std::vector<SparseComponent>& previous);
ReducedPca reduced_pca_on_support(const SymMatrix& q, const IndexSet& y,
                                  const std::vector<std::vector<double>>& previous_embedded);

// Lexicographically next size-k combination in {0,...,n-1}; false when done.
bool next_combination(std::vector<int>& c, int n);

// Dense unit vector orthogonal to all previous components, built by
// Gram-Schmidt completion against the coordinate axes. Flagged relaxed.
SparseComponent dense_fallback_component(const SymMatrix& q,
                                         const std::vector<SparseComponent>& previous);

// Best component over all C(n,p) supports. Ties within 1e-12 of the best
// eigenvalue resolve to the lexicographically smallest support. May run the
// enumeration on a worker pool; the reduction is deterministic.
SparseComponent solve_kth_exact(const SymMatrix& q, int p,
                                const std::vector<SparseComponent>& previous,
                                SolveStats* stats = nullptr);

// K sequential calls to solve_kth_exact, each conditioned on the components
// produced so far.
SpcaSolution solve_sequence(const SymMatrix& q, int p, int k_count,
                            SolveStats* stats = nullptr);

}  // namespace ospca
