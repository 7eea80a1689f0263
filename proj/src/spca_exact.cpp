#include "ospca/spca_exact.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <thread>

#include "ospca/runtime.hpp"

namespace ospca {

namespace {

constexpr double kTieTol = 1e-12;       // eigenvalue window for support ties
constexpr double kRankTol = 1e-12;      // below this the reduced problem is degenerate
constexpr double kProjectionTol = 1e-10;

// Candidate window: supports within kTieTol of the best eigenvalue seen so
// far, in enumeration order. Entries are kept only while no earlier entry
// dominates them, so the window stays tiny even under massive ties.
struct CandidateWindow {
    struct Candidate {
        double lambda;
        std::vector<int> support;
        std::vector<double> z;
    };
    double best = -std::numeric_limits<double>::infinity();
    std::deque<Candidate> close;

    void offer(double lambda, const std::vector<int>& support, std::vector<double> z) {
        if (lambda < best - kTieTol) return;
        if (close.empty() || lambda > close.back().lambda)
            close.push_back({lambda, support, std::move(z)});
        if (lambda > best) {
            best = lambda;
            while (!close.empty() && close.front().lambda < best - kTieTol) close.pop_front();
        }
    }
};

ReducedPca reduced_pca_impl(const SymMatrix& q, const std::vector<int>& support,
                            const std::vector<std::vector<double>>& prev_embedded) {
    const int p = static_cast<int>(support.size());
    ReducedPca out;

    IndexSet y(support, q.dim());
    SymMatrix qy = q.principal_submatrix(y);

    if (prev_embedded.empty()) {
        EigPair e = sym_eig_max(qy);
        out.feasible = true;
        out.lambda = e.value;
        out.z = std::move(e.vector);
        out.basis_dim = 0;
        return out;
    }

    std::vector<std::vector<double>> restrictions;
    restrictions.reserve(prev_embedded.size());
    for (const auto& x : prev_embedded) {
        std::vector<double> v(p);
        for (int t = 0; t < p; ++t) v[t] = x[support[t]];
        restrictions.push_back(std::move(v));
    }
    OrthonormalBasis uy = gram_schmidt(restrictions);
    out.basis_dim = uy.size();
    if (uy.size() == p) return out;  // restrictions span R^p: no orthogonal direction exists

    SymMatrix proj = complement_projector(uy);
    SymMatrix pqp = projected_quadratic(proj, qy);
    EigPair e = sym_eig_max(pqp);
    std::vector<double> pw = proj.multiply(e.vector);
    const double npw = vec_norm(pw);
    if (e.value <= kRankTol && npw <= kProjectionTol) return out;
    if (npw <= kProjectionTol) return out;
    for (double& x : pw) x /= npw;
    out.feasible = true;
    out.lambda = e.value;
    out.z = std::move(pw);
    return out;
}

std::vector<std::vector<double>> embed_all(const std::vector<SparseComponent>& previous) {
    std::vector<std::vector<double>> out;
    out.reserve(previous.size());
    for (const auto& c : previous) out.push_back(c.embedded());
    return out;
}

// C(n,k) capped at max(); the enumeration falls back to a single worker when
// the count does not fit.
std::uint64_t binomial_capped(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    const std::uint64_t cap = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
        if (r > cap / num) return cap;
        r = r * num / static_cast<std::uint64_t>(i);
    }
    return r;
}

std::vector<int> unrank_combination(std::uint64_t rank, int n, int p) {
    std::vector<int> combo(p);
    int next = 0;
    for (int slot = 0; slot < p; ++slot) {
        for (int v = next; v < n; ++v) {
            const std::uint64_t block = binomial_capped(n - v - 1, p - slot - 1);
            if (rank < block) {
                combo[slot] = v;
                next = v + 1;
                break;
            }
            rank -= block;
        }
    }
    return combo;
}

SparseComponent component_from(const SymMatrix& q, const std::vector<int>& support,
                               std::vector<double> z) {
    SparseComponent c;
    c.support = IndexSet(support, q.dim());
    SymMatrix qy = q.principal_submatrix(c.support);
    c.variance = qy.quad_form(z);
    c.values = std::move(z);
    return c;
}

}  // namespace

double SpcaSolution::total_variance() const {
    double s = 0.0;
    for (const auto& c : components) s += c.variance;
    return s;
}

ReducedPca reduced_pca_on_support(const SymMatrix& q, const IndexSet& y,
                                  const std::vector<SparseComponent>& previous) {
    return reduced_pca_on_support(q, y, embed_all(previous));
}

ReducedPca reduced_pca_on_support(const SymMatrix& q, const IndexSet& y,
                                  const std::vector<std::vector<double>>& previous_embedded) {
    if (y.parent_dim != q.dim())
        throw std::invalid_argument("reduced_pca_on_support: dimension mismatch");
    if (y.size() < 1) throw std::invalid_argument("reduced_pca_on_support: empty support");
    return reduced_pca_impl(q, y.indices, previous_embedded);
}

bool next_combination(std::vector<int>& c, int n) {
    const int k = static_cast<int>(c.size());
    for (int i = k - 1; i >= 0; --i) {
        if (c[i] < n - k + i) {
            ++c[i];
            for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

SparseComponent dense_fallback_component(const SymMatrix& q,
                                         const std::vector<SparseComponent>& previous) {
    const int n = q.dim();
    if (static_cast<int>(previous.size()) >= n)
        throw std::invalid_argument("dense_fallback_component: no direction left");
    std::vector<std::vector<double>> vectors = embed_all(previous);
    for (int j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        vectors.push_back(std::move(e));
    }
    OrthonormalBasis basis = gram_schmidt(vectors);
    const auto& dir = basis.vectors.at(previous.size());

    SparseComponent c;
    c.support = IndexSet::full(n);
    c.values = dir;
    c.variance = q.quad_form(dir);
    c.sparsity_relaxed = true;
    return c;
}

SparseComponent solve_kth_exact(const SymMatrix& q, int p,
                                const std::vector<SparseComponent>& previous,
                                SolveStats* stats) {
    const int n = q.dim();
    if (p < 1 || p > n) throw std::invalid_argument("solve_kth_exact: p out of range");

    const std::vector<std::vector<double>> prev = embed_all(previous);
    const std::uint64_t total = binomial_capped(n, p);

    unsigned workers = effective_threads();
    const bool can_parallelize =
        workers > 1 && total >= 4096 && total != std::numeric_limits<std::uint64_t>::max();

    CandidateWindow merged;
    std::uint64_t evaluated = 0;

    if (!can_parallelize) {
        std::vector<int> combo(p);
        for (int i = 0; i < p; ++i) combo[i] = i;
        do {
            ++evaluated;
            ReducedPca r = reduced_pca_impl(q, combo, prev);
            if (r.feasible) merged.offer(r.lambda, combo, std::move(r.z));
        } while (next_combination(combo, n));
    } else {
        workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, total));
        std::vector<CandidateWindow> windows(workers);
        std::vector<std::uint64_t> counts(workers, 0);
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            const std::uint64_t lo = total * w / workers;
            const std::uint64_t hi = total * (w + 1) / workers;
            pool.emplace_back([&, w, lo, hi]() {
                std::vector<int> combo = unrank_combination(lo, n, p);
                for (std::uint64_t r = lo; r < hi; ++r) {
                    ++counts[w];
                    ReducedPca red = reduced_pca_impl(q, combo, prev);
                    if (red.feasible) windows[w].offer(red.lambda, combo, std::move(red.z));
                    if (!next_combination(combo, n)) break;
                }
            });
        }
        for (auto& t : pool) t.join();
        for (unsigned w = 0; w < workers; ++w) {
            evaluated += counts[w];
            for (auto& c : windows[w].close) merged.offer(c.lambda, c.support, std::move(c.z));
        }
    }

    if (stats) stats->supports_evaluated += evaluated;

    if (merged.close.empty()) return dense_fallback_component(q, previous);
    auto& win = merged.close.front();
    return component_from(q, win.support, std::move(win.z));
}

SpcaSolution solve_sequence(const SymMatrix& q, int p, int k_count, SolveStats* stats) {
    const int n = q.dim();
    if (k_count < 1 || k_count > n) throw std::invalid_argument("solve_sequence: K out of range");

    SpcaSolution sol;
    sol.n = n;
    sol.p = p;
    sol.q_fingerprint = q.fingerprint();
    sol.mode = "exact";
    sol.eps = 0.0;
    for (int k = 0; k < k_count; ++k)
        sol.components.push_back(solve_kth_exact(q, p, sol.components, stats));
    return sol;
}

}  // namespace ospca
