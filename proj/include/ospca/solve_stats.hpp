#pragma once

#include <cstdint>

namespace ospca {

// Work counters shared by the solvers. `supports_evaluated` counts every
// candidate support passed through a reduced eigenvalue evaluation.
struct SolveStats {
    std::uint64_t supports_evaluated = 0;
    std::uint64_t bnb_nodes_explored = 0;
    std::uint64_t bnb_nodes_pruned = 0;

    void merge(const SolveStats& other) {
        supports_evaluated += other.supports_evaluated;
        bnb_nodes_explored += other.bnb_nodes_explored;
        bnb_nodes_pruned += other.bnb_nodes_pruned;
    }
};

}  // namespace ospca
