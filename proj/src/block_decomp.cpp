#include "ospca/block_decomp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ospca {

BigUInt BigUInt::from_u64(std::uint64_t v) {
    BigUInt b;
    b.limbs.clear();
    do {
        b.limbs.push_back(static_cast<std::uint32_t>(v % 1000000000ULL));
        v /= 1000000000ULL;
    } while (v != 0);
    return b;
}

void BigUInt::mul_small(std::uint64_t m) {
    std::uint64_t carry = 0;
    for (auto& limb : limbs) {
        const std::uint64_t cur = static_cast<std::uint64_t>(limb) * m + carry;
        limb = static_cast<std::uint32_t>(cur % 1000000000ULL);
        carry = cur / 1000000000ULL;
    }
    while (carry != 0) {
        limbs.push_back(static_cast<std::uint32_t>(carry % 1000000000ULL));
        carry /= 1000000000ULL;
    }
}

void BigUInt::div_small_exact(std::uint64_t d) {
    std::uint64_t rem = 0;
    for (auto it = limbs.rbegin(); it != limbs.rend(); ++it) {
        const std::uint64_t cur = rem * 1000000000ULL + *it;
        *it = static_cast<std::uint32_t>(cur / d);
        rem = cur % d;
    }
    if (rem != 0) throw std::logic_error("BigUInt: inexact division");
    while (limbs.size() > 1 && limbs.back() == 0) limbs.pop_back();
}

void BigUInt::add(const BigUInt& other) {
    const std::size_t sz = std::max(limbs.size(), other.limbs.size());
    limbs.resize(sz, 0);
    std::uint32_t carry = 0;
    for (std::size_t i = 0; i < sz; ++i) {
        std::uint64_t cur = static_cast<std::uint64_t>(limbs[i]) + carry;
        if (i < other.limbs.size()) cur += other.limbs[i];
        limbs[i] = static_cast<std::uint32_t>(cur % 1000000000ULL);
        carry = static_cast<std::uint32_t>(cur / 1000000000ULL);
    }
    if (carry != 0) limbs.push_back(carry);
}

std::string BigUInt::str() const {
    std::string out = std::to_string(limbs.back());
    for (auto it = limbs.rbegin() + 1; it != limbs.rend(); ++it) {
        std::string part = std::to_string(*it);
        out += std::string(9 - part.size(), '0') + part;
    }
    return out;
}

BigUInt BigUInt::binomial(int n, int k) {
    if (k < 0 || k > n) return BigUInt::from_u64(0);
    k = std::min(k, n - k);
    BigUInt r = BigUInt::from_u64(1);
    for (int i = 1; i <= k; ++i) {
        r.mul_small(static_cast<std::uint64_t>(n - k + i));
        r.div_small_exact(static_cast<std::uint64_t>(i));
    }
    return r;
}

SymMatrix BlockStructure::assemble() const {
    SymMatrix a(n);
    for (int b = 0; b < block_count(); ++b) {
        const int off = offsets[b];
        const SymMatrix& blk = blocks[b];
        for (int i = 0; i < blk.dim(); ++i)
            for (int j = i; j < blk.dim(); ++j) a.set(off + i, off + j, blk(i, j));
    }
    return a;
}

SymMatrix threshold_matrix(const SymMatrix& q, double delta) {
    if (delta < 0.0) throw std::invalid_argument("threshold_matrix: delta must be non-negative");
    const int n = q.dim();
    SymMatrix out(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double v = q(i, j);
            out.set(i, j, std::abs(v) >= delta ? v : 0.0);
        }
    return out;
}

std::vector<IndexSet> connected_components(const SymMatrix& qd) {
    const int n = qd.dim();
    std::vector<int> label(n, -1);
    std::vector<IndexSet> out;
    std::vector<int> stack;
    for (int s = 0; s < n; ++s) {
        if (label[s] >= 0) continue;
        const int comp = static_cast<int>(out.size());
        std::vector<int> members;
        stack.push_back(s);
        label[s] = comp;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            members.push_back(v);
            for (int w = 0; w < n; ++w) {
                if (w == v || label[w] >= 0) continue;
                if (qd(v, w) != 0.0) {
                    label[w] = comp;
                    stack.push_back(w);
                }
            }
        }
        std::sort(members.begin(), members.end());
        out.emplace_back(std::move(members), n);
    }
    return out;
}

BlockStructure block_diagonalize(const SymMatrix& q, double delta) {
    BlockStructure s;
    s.n = q.dim();
    s.delta = delta;
    SymMatrix qd = threshold_matrix(q, delta);
    s.components = connected_components(qd);
    s.permutation.reserve(s.n);
    int off = 0;
    for (const auto& comp : s.components) {
        s.offsets.push_back(off);
        off += comp.size();
        for (int i : comp.indices) s.permutation.push_back(i);
        s.blocks.push_back(qd.principal_submatrix(comp));
    }
    return s;
}

SpcaSolution merge_sorted(const std::vector<SpcaSolution>& block_solutions,
                          const BlockStructure& structure) {
    const int d = structure.block_count();
    if (static_cast<int>(block_solutions.size()) != d)
        throw std::invalid_argument("merge_sorted: block count mismatch");
    for (int b = 0; b < d; ++b)
        if (block_solutions[b].n != structure.blocks[b].dim())
            throw std::invalid_argument("merge_sorted: block dimension mismatch");

    struct Tagged {
        double variance;
        int block;
        int order;
        const SparseComponent* comp;
    };
    std::vector<Tagged> all;
    for (int b = 0; b < d; ++b) {
        const auto& comps = block_solutions[b].components;
        for (int i = 0; i < static_cast<int>(comps.size()); ++i)
            all.push_back({comps[i].variance, b, i, &comps[i]});
    }
    std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) {
        if (a.variance != b.variance) return a.variance > b.variance;
        if (a.block != b.block) return a.block < b.block;
        return a.order < b.order;
    });

    SpcaSolution out;
    out.n = structure.n;
    out.p = 0;
    for (const auto& bs : block_solutions) out.p = std::max(out.p, bs.p);
    out.q_fingerprint = structure.assemble().fingerprint();
    out.mode = "merged";
    out.eps = 0.0;
    for (const auto& bs : block_solutions) out.eps = std::max(out.eps, bs.eps);

    for (const auto& t : all) {
        SparseComponent c;
        const int off = structure.offsets[t.block];
        std::vector<int> idx(t.comp->support.indices);
        for (int& i : idx) i += off;
        c.support = IndexSet(std::move(idx), structure.n);
        c.values = t.comp->values;
        c.variance = t.comp->variance;
        c.sparsity_relaxed = t.comp->sparsity_relaxed;
        out.components.push_back(std::move(c));
    }
    return out;
}

ThresholdSolver::ThresholdSolver(const SymMatrix& q, int p, double delta, double eps,
                                 BlockSolver solver, SolveStats* stats)
    : q_(q), p_(p), solver_(solver), stats_(stats) {
    const int n = q.dim();
    if (p < 1 || p > n) throw std::invalid_argument("ThresholdSolver: p out of range");
    if (eps < 0.0 || delta < 0.0)
        throw std::invalid_argument("ThresholdSolver: eps and delta must be non-negative");

    if (eps == 0.0) solver_ = BlockSolver::Exact;
    eps_used_ = solver_ == BlockSolver::Exact ? 0.0 : eps;
    certified_slack_ = 2.0 * p * delta + eps_used_;

    structure_ = block_diagonalize(q, delta);
    pool_.entries.resize(structure_.block_count());
    for (int b = 0; b < structure_.block_count(); ++b) refresh_block(b);
}

bool ThresholdSolver::exhausted() const { return emitted_total_ >= structure_.n; }

void ThresholdSolver::refresh_block(int b) {
    auto& entry = pool_.entries[b];
    const SymMatrix& blk = structure_.blocks[b];
    if (entry.emitted >= blk.dim()) {
        entry.live = false;
        return;
    }
    const int pb = std::min(p_, blk.dim());
    SparseComponent next;
    if (solver_ == BlockSolver::Exact) {
        next = solve_kth_exact(blk, pb, entry.previous, stats_);
    } else {
        BnbResult r = solve_kth_bnb(blk, pb, entry.previous, eps_used_, stats_);
        if (stats_) {
            stats_->bnb_nodes_explored += r.certificate.nodes_explored;
            stats_->bnb_nodes_pruned += r.certificate.nodes_pruned;
        }
        next = std::move(r.component);
    }
    entry.previous.push_back(next);

    // Embed into the permuted ambient space for pool comparisons.
    SparseComponent embedded;
    const int off = structure_.offsets[b];
    std::vector<int> idx(next.support.indices);
    for (int& i : idx) i += off;
    embedded.support = IndexSet(std::move(idx), structure_.n);
    embedded.values = next.values;
    embedded.variance = next.variance;
    embedded.sparsity_relaxed = next.sparsity_relaxed;

    entry.candidate = std::move(embedded);
    entry.variance = next.variance;
    entry.live = true;
}

SparseComponent ThresholdSolver::next() {
    // The contributing block's replacement candidate is computed here, at the
    // start of the following step, so a K-step run prices exactly K + d - 1
    // block subproblems.
    if (pending_refresh_ >= 0) {
        refresh_block(pending_refresh_);
        pending_refresh_ = -1;
    }
    int best = -1;
    for (int b = 0; b < static_cast<int>(pool_.entries.size()); ++b) {
        const auto& e = pool_.entries[b];
        if (!e.live) continue;
        if (best < 0 || e.variance > pool_.entries[best].variance) best = b;
    }
    if (best < 0) throw std::logic_error("ThresholdSolver: pool exhausted");

    SparseComponent in_a = pool_.entries[best].candidate;
    ++pool_.entries[best].emitted;
    pool_.entries[best].live = false;
    pending_refresh_ = best;
    ++emitted_total_;

    // Inverse permutation back to original coordinates, then re-measure the
    // variance against the original matrix.
    std::vector<std::pair<int, double>> entries;
    entries.reserve(in_a.support.indices.size());
    for (std::size_t t = 0; t < in_a.support.indices.size(); ++t)
        entries.emplace_back(structure_.permutation[in_a.support.indices[t]], in_a.values[t]);
    std::sort(entries.begin(), entries.end());

    SparseComponent out;
    std::vector<int> idx;
    std::vector<double> vals;
    for (auto& [i, v] : entries) {
        idx.push_back(i);
        vals.push_back(v);
    }
    out.support = IndexSet(std::move(idx), structure_.n);
    out.values = std::move(vals);
    out.sparsity_relaxed = in_a.sparsity_relaxed;
    out.variance = q_.quad_form(out.embedded());
    return out;
}

SpcaSolution threshold_spca(const SymMatrix& q, int p, double delta, double eps, int k_count,
                            BlockSolver solver, SolveStats* stats) {
    const int n = q.dim();
    if (k_count < 1 || k_count > n) throw std::invalid_argument("threshold_spca: K out of range");

    ThresholdSolver driver(q, p, delta, eps, solver, stats);
    SpcaSolution sol;
    sol.n = n;
    sol.p = p;
    sol.q_fingerprint = q.fingerprint();
    sol.mode = "threshold";
    sol.eps = driver.certified_slack();
    for (int k = 0; k < k_count; ++k) {
        if (driver.exhausted())
            sol.components.push_back(dense_fallback_component(q, sol.components));
        else
            sol.components.push_back(driver.next());
    }
    return sol;
}

std::pair<BigUInt, BigUInt> predicted_cost(const BlockStructure& structure, int p) {
    BigUInt full = BigUInt::binomial(structure.n, p);
    BigUInt decomposed = BigUInt::from_u64(0);
    for (const auto& blk : structure.blocks) {
        const int ni = blk.dim();
        decomposed.add(BigUInt::binomial(ni, std::min(p, ni)));
    }
    return {full, decomposed};
}

}  // namespace ospca
