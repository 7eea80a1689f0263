#pragma once

#include <cmath>
#include <vector>

#include "ospca/linalg.hpp"
#include "ospca/rng.hpp"

namespace test {

inline ospca::SymMatrix make_sym(const std::vector<std::vector<double>>& rows) {
    return ospca::SymMatrix::from_rows(rows);
}

// The 3x3 fixture with two optimal first components: [[5,1,0],[1,5,2],[0,2,2]].
inline ospca::SymMatrix coupled3() {
    return make_sym({{5, 1, 0}, {1, 5, 2}, {0, 2, 2}});
}

inline ospca::SymMatrix random_symmetric(int n, std::uint64_t seed, double scale = 1.0) {
    ospca::SplitMix64 rng(seed);
    std::vector<double> raw(static_cast<std::size_t>(n) * n);
    for (auto& v : raw) v = rng.uniform(-scale, scale);
    return ospca::SymMatrix::symmetrized(n, raw);
}

// G^T G for a random G: positive semi-definite, generically full rank.
inline ospca::SymMatrix random_psd(int n, std::uint64_t seed, double scale = 1.0) {
    ospca::SplitMix64 rng(seed);
    std::vector<double> g(static_cast<std::size_t>(n) * n);
    for (auto& v : g) v = rng.uniform(-scale, scale);
    std::vector<double> raw(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                s += g[static_cast<std::size_t>(k) * n + i] * g[static_cast<std::size_t>(k) * n + j];
            raw[static_cast<std::size_t>(i) * n + j] = s;
        }
    return ospca::SymMatrix::symmetrized(n, raw);
}

inline std::vector<double> random_unit(int n, ospca::SplitMix64& rng) {
    std::vector<double> v(n);
    double norm2 = 0.0;
    do {
        for (auto& x : v) x = rng.uniform(-1.0, 1.0);
        norm2 = 0.0;
        for (double x : v) norm2 += x * x;
    } while (norm2 < 1e-8);
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& x : v) x *= inv;
    return v;
}

// Numerical rank by Gaussian elimination with partial pivoting on the rows.
inline int rank_oracle(std::vector<std::vector<double>> rows, double tol = 1e-8) {
    if (rows.empty()) return 0;
    const int m = static_cast<int>(rows.size());
    const int n = static_cast<int>(rows[0].size());
    int rank = 0;
    for (int col = 0; col < n && rank < m; ++col) {
        int pivot = -1;
        double best = tol;
        for (int r = rank; r < m; ++r)
            if (std::abs(rows[r][col]) > best) {
                best = std::abs(rows[r][col]);
                pivot = r;
            }
        if (pivot < 0) continue;
        std::swap(rows[rank], rows[pivot]);
        for (int r = rank + 1; r < m; ++r) {
            const double f = rows[r][col] / rows[rank][col];
            for (int c = col; c < n; ++c) rows[r][c] -= f * rows[rank][c];
        }
        ++rank;
    }
    return rank;
}

}  // namespace test
