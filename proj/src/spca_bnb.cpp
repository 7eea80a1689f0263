#include "ospca/spca_bnb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace ospca {

namespace {

constexpr double kIncumbentTol = 1e-12;
constexpr double kProjectionTol = 1e-10;
const double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<std::vector<double>> embed_all(const std::vector<SparseComponent>& previous) {
    std::vector<std::vector<double>> out;
    out.reserve(previous.size());
    for (const auto& c : previous) out.push_back(c.embedded());
    return out;
}

std::vector<int> indices_where(const std::vector<std::uint8_t>& mask, std::uint8_t v) {
    std::vector<int> out;
    for (int j = 0; j < static_cast<int>(mask.size()); ++j)
        if (mask[j] == v) out.push_back(j);
    return out;
}

// lambda_max of the restriction of Q to U with the previous components
// projected out. Valid for every support inside U.
double bound_on_index_set(const SymMatrix& q, const std::vector<int>& u_set,
                          const std::vector<std::vector<double>>& prev) {
    IndexSet u(u_set, q.dim());
    SymMatrix qu = q.principal_submatrix(u);
    if (prev.empty()) return sym_eig_max(qu).value;

    std::vector<std::vector<double>> restrictions;
    restrictions.reserve(prev.size());
    for (const auto& x : prev) restrictions.push_back(restrict_to(x, u));
    OrthonormalBasis basis = gram_schmidt(restrictions);
    if (basis.size() == u.size()) return 0.0;
    if (basis.size() == 0) return sym_eig_max(qu).value;
    SymMatrix proj = complement_projector(basis);
    return sym_eig_max(projected_quadratic(proj, qu)).value;
}

struct Node {
    std::vector<std::uint8_t> l, u;
    int lc = 0, uc = 0;
    double ub = 0.0;
    std::uint64_t seq = 0;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.ub != b.ub) return a.ub < b.ub;  // max-heap on the cached bound
        return a.seq > b.seq;                  // ties: oldest first
    }
};

SparseComponent component_from_reduced(const SymMatrix& q, const std::vector<int>& support,
                                       const ReducedPca& red) {
    SparseComponent c;
    c.support = IndexSet(support, q.dim());
    SymMatrix qy = q.principal_submatrix(c.support);
    c.variance = qy.quad_form(red.z);
    c.values = red.z;
    return c;
}

}  // namespace

SupportBounds SupportBounds::root(int n) {
    SupportBounds b;
    b.l.assign(n, 0);
    b.u.assign(n, 1);
    return b;
}

int SupportBounds::l_count() const {
    int c = 0;
    for (auto v : l) c += v;
    return c;
}

int SupportBounds::u_count() const {
    int c = 0;
    for (auto v : u) c += v;
    return c;
}

double upper_bound(const SymMatrix& q, int p, const std::vector<SparseComponent>& previous,
                   const SupportBounds& node) {
    (void)p;
    std::vector<int> u_set = indices_where(node.u, 1);
    if (u_set.empty()) return kNegInf;
    return bound_on_index_set(q, u_set, embed_all(previous));
}

LowerBoundResult lower_bound(const SymMatrix& q, int p,
                             const std::vector<SparseComponent>& previous,
                             const SupportBounds& node) {
    LowerBoundResult out;

    std::vector<int> support = indices_where(node.l, 1);
    const int lcount = static_cast<int>(support.size());
    const int ucount = node.u_count();
    if (lcount > p || ucount < p) return out;

    // With the support already forced, the reduced solve is the exact answer.
    if (lcount == p || ucount == p) {
        if (ucount == p) support = indices_where(node.u, 1);
        IndexSet y(support, q.dim());
        ReducedPca red = reduced_pca_on_support(q, y, previous);
        if (!red.feasible) return out;
        out.feasible = true;
        out.witness = component_from_reduced(q, support, red);
        out.value = out.witness.variance;
        return out;
    }

    std::vector<int> free;
    for (int j = 0; j < static_cast<int>(node.u.size()); ++j)
        if (node.u[j] == 1 && node.l[j] == 0) free.push_back(j);
    std::sort(free.begin(), free.end(), [&](int a, int b) {
        if (q(a, a) != q(b, b)) return q(a, a) > q(b, b);
        return a < b;
    });
    for (int j : free) {
        if (static_cast<int>(support.size()) == p) break;
        support.push_back(j);
    }
    std::sort(support.begin(), support.end());
    IndexSet y(support, q.dim());

    SymMatrix qy = q.principal_submatrix(y);
    EigPair heuristic = sym_eig_max(qy);
    std::vector<double> z = heuristic.vector;
    if (!previous.empty()) {
        std::vector<std::vector<double>> restrictions;
        for (const auto& c : previous) restrictions.push_back(restrict_to(c.embedded(), y));
        OrthonormalBasis basis = gram_schmidt(restrictions);
        if (basis.size() == y.size()) return out;
        if (basis.size() > 0) {
            for (const auto& b : basis.vectors) {
                const double cdot = vec_dot(z, b);
                for (std::size_t i = 0; i < z.size(); ++i) z[i] -= cdot * b[i];
            }
        }
        const double nz = vec_norm(z);
        if (nz <= kProjectionTol) return out;
        for (double& x : z) x /= nz;
    }
    out.feasible = true;
    out.witness.support = y;
    out.witness.variance = qy.quad_form(z);
    out.witness.values = std::move(z);
    out.value = out.witness.variance;
    return out;
}

BnbResult solve_kth_bnb(const SymMatrix& q, int p,
                        const std::vector<SparseComponent>& previous, double eps,
                        SolveStats* stats) {
    const int n = q.dim();
    if (p < 1 || p > n) throw std::invalid_argument("solve_kth_bnb: p out of range");
    if (eps < 0.0) throw std::invalid_argument("solve_kth_bnb: eps must be non-negative");

    BnbResult result;
    BnbCertificate& cert = result.certificate;
    cert.eps = eps;

    SupportBounds root = SupportBounds::root(n);

    // Fully determined root: the support is forced, no search needed.
    if (p == n) {
        IndexSet y = IndexSet::full(n);
        ReducedPca red = reduced_pca_on_support(q, y, previous);
        if (stats) ++stats->supports_evaluated;
        if (red.feasible) {
            result.component = component_from_reduced(q, y.indices, red);
            cert.lower_bound = cert.upper_bound = result.component.variance;
        } else {
            result.component = dense_fallback_component(q, previous);
            cert.lower_bound = cert.upper_bound = result.component.variance;
            cert.relaxed = true;
        }
        return result;
    }

    double lb_global = kNegInf;
    bool have_incumbent = false;
    SparseComponent incumbent;

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    std::uint64_t seq = 0;

    Node root_node;
    root_node.l = root.l;
    root_node.u = root.u;
    root_node.lc = 0;
    root_node.uc = n;
    root_node.ub = upper_bound(q, p, previous, root);
    root_node.seq = seq++;
    open.push(std::move(root_node));

    double ub_global = open.top().ub;

    const std::vector<double> diag = [&] {
        std::vector<double> d(n);
        for (int i = 0; i < n; ++i) d[i] = q(i, i);
        return d;
    }();

    while (true) {
        while (!open.empty() && open.top().ub <= lb_global) {
            open.pop();
            ++cert.nodes_pruned;
        }
        if (open.empty()) {
            ub_global = have_incumbent ? lb_global : kNegInf;
            break;
        }
        ub_global = open.top().ub;
        if (have_incumbent && ub_global - lb_global <= eps) break;

        Node cur = open.top();
        open.pop();
        ++cert.nodes_explored;

        int branch = -1;
        for (int j = 0; j < n; ++j) {
            if (cur.l[j] == 0 && cur.u[j] == 1 && (branch < 0 || diag[j] > diag[branch]))
                branch = j;
        }
        if (branch < 0) continue;  // no free index; cannot happen for queued nodes

        for (int val = 0; val <= 1; ++val) {
            Node child;
            child.l = cur.l;
            child.u = cur.u;
            child.l[branch] = static_cast<std::uint8_t>(val);
            child.u[branch] = static_cast<std::uint8_t>(val);
            child.lc = cur.lc + val;
            child.uc = cur.uc - (1 - val);
            if (child.lc > p || child.uc < p) {
                ++cert.nodes_pruned;
                continue;
            }

            double lb = kNegInf, ub = kNegInf;
            SparseComponent witness;
            bool have_witness = false;

            if (child.lc == p || child.uc == p) {
                std::vector<int> support =
                    indices_where(child.lc == p ? child.l : child.u, 1);
                if (stats) ++stats->supports_evaluated;
                ReducedPca red = reduced_pca_on_support(q, IndexSet(support, n), previous);
                if (!red.feasible) {
                    ++cert.nodes_pruned;
                    continue;
                }
                witness = component_from_reduced(q, support, red);
                lb = ub = witness.variance;
                have_witness = true;
            } else {
                SupportBounds sb;
                sb.l = child.l;
                sb.u = child.u;
                if (stats) ++stats->supports_evaluated;
                LowerBoundResult lbr = lower_bound(q, p, previous, sb);
                if (lbr.feasible) {
                    lb = lbr.value;
                    witness = std::move(lbr.witness);
                    have_witness = true;
                }
                ub = upper_bound(q, p, previous, sb);
            }

            if (have_witness && lb > lb_global + kIncumbentTol) {
                lb_global = lb;
                incumbent = std::move(witness);
                have_incumbent = true;
            }
            if (ub > lb_global) {
                child.ub = ub;
                child.seq = seq++;
                open.push(std::move(child));
            } else {
                ++cert.nodes_pruned;
            }
        }
    }

    if (!have_incumbent) {
        result.component = dense_fallback_component(q, previous);
        cert.lower_bound = cert.upper_bound = result.component.variance;
        cert.relaxed = true;
        return result;
    }

    cert.lower_bound = lb_global;
    cert.upper_bound = std::max(ub_global, lb_global);
    result.component = std::move(incumbent);
    return result;
}

SpcaSolution solve_sequence_bnb(const SymMatrix& q, int p, int k_count, double eps,
                                SolveStats* stats,
                                std::vector<BnbCertificate>* step_certificates) {
    const int n = q.dim();
    if (k_count < 1 || k_count > n)
        throw std::invalid_argument("solve_sequence_bnb: K out of range");

    SpcaSolution sol;
    sol.n = n;
    sol.p = p;
    sol.q_fingerprint = q.fingerprint();
    sol.mode = "bnb";
    sol.eps = eps;
    for (int k = 0; k < k_count; ++k) {
        BnbResult r = solve_kth_bnb(q, p, sol.components, eps, stats);
        if (stats) {
            stats->bnb_nodes_explored += r.certificate.nodes_explored;
            stats->bnb_nodes_pruned += r.certificate.nodes_pruned;
        }
        if (step_certificates) step_certificates->push_back(r.certificate);
        sol.components.push_back(std::move(r.component));
    }
    return sol;
}

}  // namespace ospca
