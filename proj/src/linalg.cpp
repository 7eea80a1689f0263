#include "ospca/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace ospca {

IndexSet::IndexSet(std::vector<int> idx, int dim) : indices(std::move(idx)), parent_dim(dim) {
    if (dim < 0) throw std::invalid_argument("IndexSet: negative parent dimension");
    int prev = -1;
    for (int i : indices) {
        if (i <= prev) throw std::invalid_argument("IndexSet: indices must be strictly increasing");
        if (i < 0 || i >= dim) throw std::invalid_argument("IndexSet: index out of range");
        prev = i;
    }
}

IndexSet IndexSet::full(int dim) {
    std::vector<int> idx(dim);
    for (int i = 0; i < dim; ++i) idx[i] = i;
    return IndexSet(std::move(idx), dim);
}

SymMatrix::SymMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {
    if (n < 1) throw std::invalid_argument("SymMatrix: dimension must be at least 1");
}

SymMatrix SymMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const int n = static_cast<int>(rows.size());
    if (n < 1) throw std::invalid_argument("SymMatrix: empty input");
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != n)
            throw std::invalid_argument("SymMatrix: input is not square");
    }
    double max_entry = 0.0;
    for (const auto& r : rows)
        for (double v : r) max_entry = std::max(max_entry, std::abs(v));
    double worst = 0.0;
    int wi = 0, wj = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double d = std::abs(rows[i][j] - rows[j][i]);
            if (d > worst) {
                worst = d;
                wi = i;
                wj = j;
            }
        }
    }
    if (worst > 1e-9 * max_entry) {
        throw std::invalid_argument(
            "SymMatrix: asymmetry beyond tolerance at (" + std::to_string(wi) + "," +
            std::to_string(wj) + "): " + std::to_string(rows[wi][wj]) + " vs " +
            std::to_string(rows[wj][wi]));
    }
    SymMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m.set(i, j, 0.5 * (rows[i][j] + rows[j][i]));
    return m;
}

SymMatrix SymMatrix::symmetrized(int n, const std::vector<double>& raw) {
    if (static_cast<int>(raw.size()) != n * n)
        throw std::invalid_argument("SymMatrix: raw size mismatch");
    SymMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            m.set(i, j, 0.5 * (raw[static_cast<std::size_t>(i) * n + j] +
                               raw[static_cast<std::size_t>(j) * n + i]));
    return m;
}

double SymMatrix::trace() const {
    double t = 0.0;
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

double SymMatrix::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
}

double SymMatrix::frobenius() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

SymMatrix SymMatrix::principal_submatrix(const IndexSet& y) const {
    if (y.parent_dim != n_) throw std::invalid_argument("principal_submatrix: dimension mismatch");
    const int p = y.size();
    SymMatrix out(p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            out.a_[static_cast<std::size_t>(i) * p + j] =
                a_[static_cast<std::size_t>(y.indices[i]) * n_ + y.indices[j]];
    return out;
}

std::vector<double> SymMatrix::multiply(std::span<const double> x) const {
    std::vector<double> out(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        const double* row = a_.data() + static_cast<std::size_t>(i) * n_;
        for (int j = 0; j < n_; ++j) s += row[j] * x[j];
        out[i] = s;
    }
    return out;
}

double SymMatrix::quad_form(std::span<const double> x) const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) {
        const double* row = a_.data() + static_cast<std::size_t>(i) * n_;
        double r = 0.0;
        for (int j = 0; j < n_; ++j) r += row[j] * x[j];
        s += x[i] * r;
    }
    return s;
}

std::uint64_t SymMatrix::fingerprint() const {
    std::uint64_t h = 14695981039346656037ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xffULL;
            h *= 1099511628211ULL;
        }
    };
    mix(static_cast<std::uint64_t>(n_));
    for (double v : a_) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        mix(bits);
    }
    return h;
}

double vec_dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double vec_norm(std::span<const double> a) { return std::sqrt(vec_dot(a, a)); }

EigPair sym_eig_max(const SymMatrix& m) {
    const int n = m.dim();
    if (n == 1) return {m(0, 0), {1.0}};

    std::vector<double> a = m.data();
    std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;

    auto off_frob = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double x = a[static_cast<std::size_t>(i) * n + j];
                s += 2.0 * x * x;
            }
        return std::sqrt(s);
    };

    const double stop = 1e-12 * std::max(1.0, m.frobenius());
    for (int sweep = 0; sweep < 100; ++sweep) {
        if (off_frob() <= stop) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a[static_cast<std::size_t>(p) * n + q];
                if (apq == 0.0) continue;
                const double theta =
                    (a[static_cast<std::size_t>(q) * n + q] - a[static_cast<std::size_t>(p) * n + p]) /
                    (2.0 * apq);
                const double t =
                    (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                a[static_cast<std::size_t>(p) * n + p] -= t * apq;
                a[static_cast<std::size_t>(q) * n + q] += t * apq;
                a[static_cast<std::size_t>(p) * n + q] = 0.0;
                a[static_cast<std::size_t>(q) * n + p] = 0.0;
                for (int r = 0; r < n; ++r) {
                    if (r != p && r != q) {
                        const double arp = a[static_cast<std::size_t>(r) * n + p];
                        const double arq = a[static_cast<std::size_t>(r) * n + q];
                        const double np = arp - s * (arq + tau * arp);
                        const double nq = arq + s * (arp - tau * arq);
                        a[static_cast<std::size_t>(r) * n + p] = np;
                        a[static_cast<std::size_t>(p) * n + r] = np;
                        a[static_cast<std::size_t>(r) * n + q] = nq;
                        a[static_cast<std::size_t>(q) * n + r] = nq;
                    }
                    const double vrp = v[static_cast<std::size_t>(r) * n + p];
                    const double vrq = v[static_cast<std::size_t>(r) * n + q];
                    v[static_cast<std::size_t>(r) * n + p] = vrp - s * (vrq + tau * vrp);
                    v[static_cast<std::size_t>(r) * n + q] = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }

    int best = 0;
    for (int i = 1; i < n; ++i)
        if (a[static_cast<std::size_t>(i) * n + i] > a[static_cast<std::size_t>(best) * n + best])
            best = i;

    EigPair out;
    out.value = a[static_cast<std::size_t>(best) * n + best];
    out.vector.resize(n);
    for (int r = 0; r < n; ++r) out.vector[r] = v[static_cast<std::size_t>(r) * n + best];

    int lead = 0;
    for (int i = 1; i < n; ++i)
        if (std::abs(out.vector[i]) > std::abs(out.vector[lead])) lead = i;
    if (out.vector[lead] < 0.0)
        for (double& x : out.vector) x = -x;
    return out;
}

OrthonormalBasis gram_schmidt(const std::vector<std::vector<double>>& vectors, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("gram_schmidt: tol must be positive");
    OrthonormalBasis basis;
    if (vectors.empty()) return basis;
    basis.ambient_dim = static_cast<int>(vectors.front().size());
    for (const auto& v : vectors)
        if (static_cast<int>(v.size()) != basis.ambient_dim)
            throw std::invalid_argument("gram_schmidt: mixed ambient dimensions");

    for (const auto& v : vectors) {
        std::vector<double> w = v;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis.vectors) {
                const double c = vec_dot(w, b);
                for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * b[i];
            }
        }
        const double nw = vec_norm(w);
        if (nw >= tol) {
            for (double& x : w) x /= nw;
            basis.vectors.push_back(std::move(w));
        }
    }
    return basis;
}

SymMatrix complement_projector(const OrthonormalBasis& basis) {
    const int n = basis.ambient_dim;
    if (n < 1) throw std::invalid_argument("complement_projector: ambient dimension missing");
    SymMatrix p(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double s = (i == j) ? 1.0 : 0.0;
            for (const auto& u : basis.vectors) s -= u[i] * u[j];
            p.set(i, j, s);
        }
    }
    return p;
}

std::vector<double> restrict_to(std::span<const double> v, const IndexSet& y) {
    if (static_cast<int>(v.size()) != y.parent_dim)
        throw std::invalid_argument("restrict_to: dimension mismatch");
    std::vector<double> out(y.indices.size());
    for (std::size_t i = 0; i < y.indices.size(); ++i) out[i] = v[y.indices[i]];
    return out;
}

std::vector<double> embed(std::span<const double> w, const IndexSet& y) {
    if (static_cast<int>(w.size()) != y.size())
        throw std::invalid_argument("embed: length mismatch");
    std::vector<double> out(y.parent_dim, 0.0);
    for (std::size_t i = 0; i < y.indices.size(); ++i) out[y.indices[i]] = w[i];
    return out;
}

SymMatrix projected_quadratic(const SymMatrix& p, const SymMatrix& m) {
    const int n = p.dim();
    if (m.dim() != n) throw std::invalid_argument("projected_quadratic: dimension mismatch");
    std::vector<double> t(static_cast<std::size_t>(n) * n, 0.0);  // t = m * p
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += m(i, k) * p(k, j);
            t[static_cast<std::size_t>(i) * n + j] = s;
        }
    std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);  // out = p * t
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += p(i, k) * t[static_cast<std::size_t>(k) * n + j];
            out[static_cast<std::size_t>(i) * n + j] = s;
        }
    return SymMatrix::symmetrized(n, out);
}

}  // namespace ospca
