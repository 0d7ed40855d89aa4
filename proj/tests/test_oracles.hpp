#pragma once

// Test-only reference implementations, kept independent of the library
// code paths they cross-check.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "osd/gf2.hpp"

namespace oracle {

/// GF(2) rank by plain elimination over vector<vector<int>>.
inline std::size_t rank(std::vector<std::vector<int>> m) {
    if (m.empty()) return 0;
    const std::size_t rows = m.size(), cols = m[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t pivot = rows;
        for (std::size_t i = r; i < rows; ++i)
            if (m[i][c]) {
                pivot = i;
                break;
            }
        if (pivot == rows) continue;
        std::swap(m[r], m[pivot]);
        for (std::size_t i = 0; i < rows; ++i)
            if (i != r && m[i][c])
                for (std::size_t j = 0; j < cols; ++j) m[i][j] ^= m[r][j];
        ++r;
    }
    return r;
}

inline std::vector<std::vector<int>> to_rows(const osd::BitMatrix& m) {
    std::vector<std::vector<int>> out(m.rows(), std::vector<int>(m.cols(), 0));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m.get(i, j);
    return out;
}

/// Remainder of a(x) mod g(x) over GF(2), coefficients as 0/1 ints
/// (index = degree).
inline std::vector<int> poly_remainder(std::vector<int> a, const std::vector<int>& g) {
    int dg = -1;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g[i]) dg = static_cast<int>(i);
    for (int i = static_cast<int>(a.size()) - 1; i >= dg; --i) {
        if (!a[i]) continue;
        for (int j = 0; j <= dg; ++j) a[i - dg + j] ^= g[j];
    }
    a.resize(dg < 0 ? 0 : static_cast<std::size_t>(dg));
    return a;
}

inline bool is_zero(const std::vector<int>& v) {
    for (int x : v)
        if (x) return false;
    return true;
}

/// Standard normal upper tail by adaptive Simpson on the density, an
/// independent route to Q(x).
inline double q_by_quadrature(double x) {
    auto phi = [](double t) {
        return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
    };
    // integrate phi over [x, x+40] with fine fixed Simpson panels
    const double a = x, b = x + 40.0;
    const int panels = 40000;
    const double h = (b - a) / panels;
    double acc = phi(a) + phi(b);
    for (int i = 1; i < panels; ++i) acc += phi(a + i * h) * ((i & 1) ? 4.0 : 2.0);
    return acc * h / 3.0;
}

/// Weighted Hamming distance by the plain definition, index order.
inline double whd_naive(const osd::BitVec& c, const osd::BitVec& y, const std::vector<double>& alpha) {
    double s = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i)
        if (c.get(i) != y.get(i)) s += alpha[i];
    return s;
}

/// Random matrix of the given shape; retried by callers until full rank.
inline osd::BitMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    osd::BitMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            if (rng() & 1) m.set(i, j, true);
    return m;
}

inline osd::BitMatrix random_full_rank(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    for (;;) {
        osd::BitMatrix m = random_matrix(rows, cols, rng);
        if (rank(to_rows(m)) == rows) return m;
    }
}

}  // namespace oracle
