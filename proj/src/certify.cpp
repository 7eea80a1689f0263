#include "ospca/certify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ospca/spca_exact.hpp"

namespace ospca {

namespace {

const double kNegInf = -std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Oracle internals. Deliberately separate from the solver reduction: rank and
// nullspace come from Householder QR with column pivoting, eigenvalues from
// bisection on the inertia of shifted matrices. No Jacobi, no Gram-Schmidt.
// ---------------------------------------------------------------------------

// Number of eigenvalues of the dense symmetric q x q matrix `c` strictly
// greater than t, by counting positive pivots of an LDL^T factorization.
int count_eigs_above(const std::vector<double>& c, int q, double t) {
    std::vector<double> m(c);
    for (int i = 0; i < q; ++i) m[static_cast<std::size_t>(i) * q + i] -= t;

    double scale = std::abs(t);
    for (double v : c) scale = std::max(scale, std::abs(v));
    const double tiny = std::max(1e-300, 1e-18 * scale);

    std::vector<double> d(q, 0.0);
    std::vector<double> lower(static_cast<std::size_t>(q) * q, 0.0);
    int positive = 0;
    for (int j = 0; j < q; ++j) {
        double dj = m[static_cast<std::size_t>(j) * q + j];
        for (int k = 0; k < j; ++k)
            dj -= lower[static_cast<std::size_t>(j) * q + k] *
                  lower[static_cast<std::size_t>(j) * q + k] * d[k];
        if (std::abs(dj) < tiny) dj = -tiny;  // t hit an eigenvalue of a leading minor
        d[j] = dj;
        if (dj > 0.0) ++positive;
        for (int i = j + 1; i < q; ++i) {
            double v = m[static_cast<std::size_t>(i) * q + j];
            for (int k = 0; k < j; ++k)
                v -= lower[static_cast<std::size_t>(i) * q + k] *
                     lower[static_cast<std::size_t>(j) * q + k] * d[k];
            lower[static_cast<std::size_t>(i) * q + j] = v / dj;
        }
    }
    return positive;
}

double lambda_max_by_inertia(const std::vector<double>& c, int q) {
    if (q == 1) return c[0];
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < q; ++i) {
        double radius = 0.0;
        for (int j = 0; j < q; ++j)
            if (j != i) radius += std::abs(c[static_cast<std::size_t>(i) * q + j]);
        lo = std::min(lo, c[static_cast<std::size_t>(i) * q + i] - radius);
        hi = std::max(hi, c[static_cast<std::size_t>(i) * q + i] + radius);
    }
    if (lo == hi) return lo;
    for (int iter = 0; iter < 200; ++iter) {
        const double width = hi - lo;
        if (width <= 1e-13 * std::max(1.0, std::abs(lo) + std::abs(hi))) break;
        const double mid = 0.5 * (lo + hi);
        if (count_eigs_above(c, q, mid) >= 1)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Orthonormal basis (columns, returned as vectors) of the nullspace of V^T,
// where V is p x m given by columns. Householder QR with column pivoting.
std::vector<std::vector<double>> nullspace_columns(std::vector<std::vector<double>> cols, int p) {
    const int m = static_cast<int>(cols.size());
    // Full accumulated orthogonal factor, row-major p x p, starts as identity.
    std::vector<double> qf(static_cast<std::size_t>(p) * p, 0.0);
    for (int i = 0; i < p; ++i) qf[static_cast<std::size_t>(i) * p + i] = 1.0;

    int rank = 0;
    const int steps = std::min(p, m);
    for (int j = 0; j < steps; ++j) {
        int pivot = -1;
        double best = 0.0;
        for (int c = j; c < m; ++c) {
            double s = 0.0;
            for (int r = j; r < p; ++r) s += cols[c][r] * cols[c][r];
            if (s > best) {
                best = s;
                pivot = c;
            }
        }
        if (pivot < 0 || std::sqrt(best) <= 1e-10) break;
        std::swap(cols[j], cols[pivot]);

        // Householder vector for rows j..p-1 of column j.
        std::vector<double> h(p, 0.0);
        double norm = std::sqrt(best);
        if (cols[j][j] > 0.0) norm = -norm;
        h[j] = cols[j][j] - norm;
        for (int r = j + 1; r < p; ++r) h[r] = cols[j][r];
        double hsq = 0.0;
        for (int r = j; r < p; ++r) hsq += h[r] * h[r];
        if (hsq == 0.0) {
            ++rank;
            continue;
        }
        const double beta = 2.0 / hsq;

        for (int c = j; c < m; ++c) {
            double s = 0.0;
            for (int r = j; r < p; ++r) s += h[r] * cols[c][r];
            s *= beta;
            for (int r = j; r < p; ++r) cols[c][r] -= s * h[r];
        }
        // qf <- qf * H (H symmetric), applied to each row of qf.
        for (int r = 0; r < p; ++r) {
            double s = 0.0;
            for (int k = j; k < p; ++k) s += qf[static_cast<std::size_t>(r) * p + k] * h[k];
            s *= beta;
            for (int k = j; k < p; ++k) qf[static_cast<std::size_t>(r) * p + k] -= s * h[k];
        }
        ++rank;
    }

    std::vector<std::vector<double>> null_cols;
    for (int c = rank; c < p; ++c) {
        std::vector<double> col(p);
        for (int r = 0; r < p; ++r) col[r] = qf[static_cast<std::size_t>(r) * p + c];
        null_cols.push_back(std::move(col));
    }
    return null_cols;
}

double angle_degrees(const std::vector<double>& a, const std::vector<double>& b) {
    const double na = vec_norm(a);
    const double nb = vec_norm(b);
    if (na == 0.0 || nb == 0.0) return 90.0;
    double c = vec_dot(a, b) / (na * nb);
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c) * 180.0 / std::numbers::pi;
}

SymMatrix deflate(const SymMatrix& q, const std::vector<double>& x) {
    const int n = q.dim();
    const std::vector<double> qx = q.multiply(x);
    const double xqx = vec_dot(x, qx);
    std::vector<double> raw(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            raw[static_cast<std::size_t>(i) * n + j] =
                q(i, j) - x[i] * qx[j] - qx[i] * x[j] + xqx * x[i] * x[j];
    return SymMatrix::symmetrized(n, raw);
}

}  // namespace

bool CertificateReport::aggregate_pass() const {
    if (oracle_cap_exceeded) return false;
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

const CertCheck* CertificateReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

CertificateReport check_solution(const SymMatrix& q, int p, const SpcaSolution& sol,
                                 double tol) {
    CertificateReport rep;
    const int n = q.dim();
    const int count = static_cast<int>(sol.components.size());
    const bool deflation = sol.mode == "deflation";

    std::vector<std::vector<double>> xs;
    xs.reserve(count);
    for (const auto& c : sol.components) xs.push_back(c.embedded());

    double worst_norm = 0.0;
    for (const auto& x : xs) worst_norm = std::max(worst_norm, std::abs(vec_norm(x) - 1.0));
    rep.checks.push_back({"unit_norms", worst_norm <= tol, worst_norm, tol});

    double worst_inner = 0.0;
    for (int i = 0; i < count; ++i)
        for (int j = i + 1; j < count; ++j)
            worst_inner = std::max(worst_inner, std::abs(vec_dot(xs[i], xs[j])));
    if (deflation) {
        rep.info.push_back({"max_abs_inner_product", worst_inner});
        rep.info.push_back({"max_angle_deviation_deg", max_pairwise_angle_deviation(sol)});
    } else {
        rep.checks.push_back({"pairwise_orthogonality", worst_inner <= tol, worst_inner, tol});
    }

    int worst_support = 0;
    int relaxed_count = 0;
    for (const auto& c : sol.components) {
        if (c.sparsity_relaxed) {
            ++relaxed_count;
            continue;
        }
        worst_support = std::max(worst_support, c.support.size());
    }
    rep.checks.push_back({"sparsity", worst_support <= p,
                          static_cast<double>(worst_support), static_cast<double>(p)});
    if (relaxed_count > 0)
        rep.info.push_back({"relaxed_components", static_cast<double>(relaxed_count)});

    double worst_var = 0.0;
    for (int i = 0; i < count; ++i) {
        const double direct = q.quad_form(xs[i]);
        const double rel = std::abs(sol.components[i].variance - direct) /
                           std::max(1.0, std::abs(direct));
        worst_var = std::max(worst_var, rel);
    }
    rep.checks.push_back({"variance_consistency", worst_var <= tol, worst_var, tol});

    // Monotonicity holds up to the solution's certified slack; relaxed
    // components are outside the feasible set, so the gate stops there.
    double worst_increase = 0.0;
    const double mono_tol = sol.eps + tol;
    for (int i = 0; i + 1 < count; ++i) {
        if (sol.components[i].sparsity_relaxed || sol.components[i + 1].sparsity_relaxed) break;
        worst_increase = std::max(
            worst_increase, sol.components[i + 1].variance - sol.components[i].variance);
    }
    if (deflation)
        rep.info.push_back({"max_variance_increase", worst_increase});
    else
        rep.checks.push_back({"monotone_variances", worst_increase <= mono_tol, worst_increase,
                              mono_tol});

    if (count == n) {
        const double sum = sol.total_variance();
        const double target = q.trace();
        const double err = std::abs(sum - target);
        const double trace_tol = tol * std::max(1.0, std::abs(target));
        if (deflation)
            rep.info.push_back({"variance_sum", sum});
        else
            rep.checks.push_back({"trace_identity", err <= trace_tol, err, trace_tol});
    }
    return rep;
}

CertificateReport check_eps_certificate(const SymMatrix& q, int p, const SpcaSolution& sol,
                                        double slack, EpsCertLevel level, int oracle_cap) {
    CertificateReport rep;
    const int count = static_cast<int>(sol.components.size());

    if (level == EpsCertLevel::Cheap) {
        const double lambda_q = sym_eig_max(q).value;
        double worst_gap = kNegInf;
        for (const auto& c : sol.components)
            worst_gap = std::max(worst_gap, lambda_q - c.variance);
        rep.checks.push_back({"eps_cheap", worst_gap <= slack, worst_gap, slack});
        return rep;
    }

    if (q.dim() > oracle_cap) {
        rep.oracle_cap_exceeded = true;
        rep.info.push_back({"oracle_cap", static_cast<double>(oracle_cap)});
        rep.info.push_back({"n", static_cast<double>(q.dim())});
        return rep;
    }

    const double tol = slack + 1e-9;
    double worst_gap = kNegInf;
    int skipped = 0;
    std::vector<SparseComponent> prefix;
    for (int k = 0; k < count; ++k) {
        OracleResult opt = oracle_kth_optimum(q, p, prefix);
        if (!opt.feasible) {
            ++skipped;
        } else {
            worst_gap = std::max(worst_gap, opt.value - sol.components[k].variance);
        }
        prefix.push_back(sol.components[k]);
    }
    if (skipped > 0) rep.info.push_back({"oracle_infeasible_steps", static_cast<double>(skipped)});
    if (worst_gap == kNegInf) worst_gap = 0.0;  // nothing comparable
    rep.checks.push_back({"eps_oracle", worst_gap <= tol, worst_gap, tol});
    return rep;
}

SpcaSolution deflation_baseline(const SymMatrix& q, int p, int k_count, SolveStats* stats) {
    const int n = q.dim();
    if (k_count < 1 || k_count > n)
        throw std::invalid_argument("deflation_baseline: K out of range");

    SpcaSolution sol;
    sol.n = n;
    sol.p = p;
    sol.q_fingerprint = q.fingerprint();
    sol.mode = "deflation";
    sol.eps = 0.0;

    SymMatrix current = q;
    for (int k = 0; k < k_count; ++k) {
        SparseComponent c = solve_kth_exact(current, p, {}, stats);
        const std::vector<double> x = c.embedded();
        c.variance = q.quad_form(x);  // report against the original matrix
        sol.components.push_back(c);
        if (k + 1 < k_count) current = deflate(current, x);
    }
    return sol;
}

double max_pairwise_angle_deviation(const SpcaSolution& sol) {
    const int count = static_cast<int>(sol.components.size());
    if (count < 2) return 0.0;
    std::vector<std::vector<double>> xs;
    for (const auto& c : sol.components) xs.push_back(c.embedded());
    double worst = 0.0;
    for (int i = 0; i < count; ++i)
        for (int j = i + 1; j < count; ++j)
            worst = std::max(worst, std::abs(90.0 - angle_degrees(xs[i], xs[j])));
    return worst;
}

double oracle_lambda_max(const std::vector<double>& a, int n) {
    if (n < 1 || static_cast<int>(a.size()) != n * n)
        throw std::invalid_argument("oracle_lambda_max: bad dimensions");
    return lambda_max_by_inertia(a, n);
}

OracleResult oracle_support_optimum(const SymMatrix& q, const IndexSet& y,
                                    const std::vector<std::vector<double>>& previous_embedded) {
    const int p = y.size();
    OracleResult out;

    std::vector<double> qy(static_cast<std::size_t>(p) * p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            qy[static_cast<std::size_t>(i) * p + j] = q(y.indices[i], y.indices[j]);

    std::vector<std::vector<double>> cols;
    cols.reserve(previous_embedded.size());
    for (const auto& x : previous_embedded) {
        std::vector<double> v(p);
        for (int t = 0; t < p; ++t) v[t] = x[y.indices[t]];
        cols.push_back(std::move(v));
    }

    std::vector<std::vector<double>> basis = nullspace_columns(std::move(cols), p);

    const int dim = static_cast<int>(basis.size());
    if (dim == 0) return out;  // previous components span R^p on this support

    std::vector<double> reduced(static_cast<std::size_t>(dim) * dim, 0.0);
    for (int a = 0; a < dim; ++a) {
        std::vector<double> tmp(p, 0.0);
        for (int i = 0; i < p; ++i) {
            double s = 0.0;
            for (int j = 0; j < p; ++j) s += qy[static_cast<std::size_t>(i) * p + j] * basis[a][j];
            tmp[i] = s;
        }
        for (int b = a; b < dim; ++b) {
            double s = 0.0;
            for (int i = 0; i < p; ++i) s += basis[b][i] * tmp[i];
            reduced[static_cast<std::size_t>(a) * dim + b] = s;
            reduced[static_cast<std::size_t>(b) * dim + a] = s;
        }
    }

    out.feasible = true;
    out.value = lambda_max_by_inertia(reduced, dim);
    return out;
}

OracleResult oracle_kth_optimum(const SymMatrix& q, int p,
                                const std::vector<SparseComponent>& previous) {
    const int n = q.dim();
    if (p < 1 || p > n) throw std::invalid_argument("oracle_kth_optimum: p out of range");

    std::vector<std::vector<double>> prev;
    prev.reserve(previous.size());
    for (const auto& c : previous) prev.push_back(c.embedded());

    OracleResult best;
    std::vector<int> combo(p);
    for (int i = 0; i < p; ++i) combo[i] = i;
    while (true) {
        OracleResult r = oracle_support_optimum(q, IndexSet(combo, n), prev);
        if (r.feasible && (!best.feasible || r.value > best.value)) best = r;
        // next lexicographic combination, written out straight-line
        int i = p - 1;
        while (i >= 0 && combo[i] == n - p + i) --i;
        if (i < 0) break;
        ++combo[i];
        for (int j = i + 1; j < p; ++j) combo[j] = combo[j - 1] + 1;
    }
    return best;
}

}  // namespace ospca
