// Best-first branch-and-bound over partially determined supports, returning
// an eps-optimal component for the k-th subproblem together with a
// lower/upper-bound certificate.
#pragma once

#include <cstdint>
#include <vector>

#include "ospca/spca_exact.hpp"

namespace ospca {

// A node of the search: binary lower/upper bound vectors on the support
// indicator. l[j] = 1 forces index j into the support, u[j] = 0 excludes it.
struct SupportBounds {
    std::vector<std::uint8_t> l;
    std::vector<std::uint8_t> u;
    double upper_bound = 0.0;  // cached bound used for best-first ordering

    static SupportBounds root(int n);
    int l_count() const;
    int u_count() const;
};

struct BnbCertificate {
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    double eps = 0.0;
    std::uint64_t nodes_explored = 0;
    std::uint64_t nodes_pruned = 0;
    bool relaxed = false;  // dense fallback was required
};

// Valid upper bound on x^T Q x over the node's feasible set: restrict to the
// allowed index set U = {j : u[j] = 1}, project out the restricted previous
// components, and take the largest eigenvalue.
double upper_bound(const SymMatrix& q, int p,
                   const std::vector<SparseComponent>& previous,
                   const SupportBounds& node);

struct LowerBoundResult {
    bool feasible = false;
    double value = 0.0;
    SparseComponent witness;
};

// Feasible witness for the node: fill the forced indices up to size p with
// the largest free diagonal entries, then project a heuristic direction onto
// the orthogonal complement of the restricted previous components.
LowerBoundResult lower_bound(const SymMatrix& q, int p,
                             const std::vector<SparseComponent>& previous,
                             const SupportBounds& node);

struct BnbResult {
    SparseComponent component;
    BnbCertificate certificate;
};

// Branch-and-bound for the k-th subproblem; terminates when UB - LB <= eps.
BnbResult solve_kth_bnb(const SymMatrix& q, int p,
                        const std::vector<SparseComponent>& previous,
                        double eps, SolveStats* stats = nullptr);

// Sequential driver; per-step certificates optionally collected.
SpcaSolution solve_sequence_bnb(const SymMatrix& q, int p, int k_count, double eps,
                                SolveStats* stats = nullptr,
                                std::vector<BnbCertificate>* step_certificates = nullptr);

}  // namespace ospca
