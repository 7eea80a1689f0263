// Dense symmetric linear algebra used throughout the solvers: a cyclic
// Jacobi eigensolver, Gram-Schmidt with re-orthogonalization, complement
// projectors, and restriction/embedding between full and support coordinates.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ospca {

// Sorted set of coordinate indices inside {0, ..., parent_dim-1}.
struct IndexSet {
    std::vector<int> indices;
    int parent_dim = 0;

    IndexSet() = default;
    IndexSet(std::vector<int> idx, int dim);  // validates strictly increasing, in range

    int size() const { return static_cast<int>(indices.size()); }
    static IndexSet full(int dim);
};

// Dense symmetric matrix with exact entrywise symmetry enforced at
// construction. Positive semi-definiteness is not required.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(int n);  // zero matrix

    // Checked construction from row data: averages (M + M^T)/2 when the
    // asymmetry is at most 1e-9 * max|entry|, otherwise throws naming the
    // worst offending entry.
    static SymMatrix from_rows(const std::vector<std::vector<double>>& rows);

    // Unchecked construction from row-major data; averages mirrored entries.
    static SymMatrix symmetrized(int n, const std::vector<double>& raw);

    int dim() const { return n_; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    void set(int i, int j, double v) {
        a_[static_cast<std::size_t>(i) * n_ + j] = v;
        a_[static_cast<std::size_t>(j) * n_ + i] = v;
    }

    double trace() const;
    double max_abs() const;
    double frobenius() const;
    const std::vector<double>& data() const { return a_; }

    SymMatrix principal_submatrix(const IndexSet& y) const;  // exact gather, no arithmetic
    std::vector<double> multiply(std::span<const double> x) const;
    double quad_form(std::span<const double> x) const;  // x^T M x

    std::uint64_t fingerprint() const;  // FNV-1a over dimension and entries

private:
    int n_ = 0;
    std::vector<double> a_;
};

struct EigPair {
    double value = 0.0;
    std::vector<double> vector;
};

struct OrthonormalBasis {
    int ambient_dim = 0;
    std::vector<std::vector<double>> vectors;
    int size() const { return static_cast<int>(vectors.size()); }
};

double vec_dot(std::span<const double> a, std::span<const double> b);
double vec_norm(std::span<const double> a);

// Largest eigenvalue and a unit eigenvector, via cyclic Jacobi rotations.
// Sign convention: the entry of largest magnitude is positive (ties broken
// at the lowest index).
EigPair sym_eig_max(const SymMatrix& m);

// Orthonormal basis of span(vectors). Inputs whose residual after two
// projection passes is below `tol` are dropped (numerical rank detection).
OrthonormalBasis gram_schmidt(const std::vector<std::vector<double>>& vectors,
                              double tol = 1e-10);

// P = I - U U^T for the given basis U; symmetric and idempotent.
SymMatrix complement_projector(const OrthonormalBasis& basis);

// Components of v on the index set Y, in Y's sorted order.
std::vector<double> restrict_to(std::span<const double> v, const IndexSet& y);

// Zero-padding of w into R^{parent_dim}, placing entries on Y.
std::vector<double> embed(std::span<const double> w, const IndexSet& y);

// P * M * P, symmetrized.
SymMatrix projected_quadratic(const SymMatrix& p, const SymMatrix& m);

}  // namespace ospca
