#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "pcbo/gp.hpp"

namespace oracles {

using pcbo::EncodedPoint;
using pcbo::KernelHyper;
using pcbo::kNumCategories;

using LMat = std::vector<std::vector<long double>>;

inline long double kernel_ld(const EncodedPoint& a, const EncodedPoint& b, const KernelHyper& h) {
    long double d2 = 0;
    const long double ta = (static_cast<long double>(a.x_alpha) - b.x_alpha) / h.lengthscales[0];
    d2 += ta * ta;
    const int ca = a.category(), cb = b.category();
    for (int k = 0; k < kNumCategories; ++k) {
        const long double t = ((ca == k) - (cb == k)) / static_cast<long double>(h.lengthscales[k + 1]);
        d2 += t * t;
    }
    const long double d = std::sqrt(d2);
    const long double s = std::sqrt(5.0L) * d;
    return h.amplitude * (1 + s + 5 * d2 / 3) * std::exp(-s);
}

// Solves A X = B by Gauss-Jordan with partial pivoting, long double.
inline LMat solve_ld(LMat a, LMat b) {
    const std::size_t n = a.size(), m = b[0].size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const long double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            for (std::size_t k = 0; k < m; ++k) b[r][k] -= f * b[c][k];
        }
    }
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t k = 0; k < m; ++k) b[r][k] /= a[r][r];
    return b;
}

// Predictive mean and variance of the latent function, straight from the
// textbook formulas, with the same standardization the model applies.
inline std::pair<long double, long double> dense_posterior(const std::vector<EncodedPoint>& x, const std::vector<double>& y,
                                                    const KernelHyper& h, const EncodedPoint& q, bool standardize) {
    const std::size_t n = x.size();
    long double center = 0, scale = 1;
    if (standardize) {
        for (double v : y) center += v;
        center /= n;
        long double ss = 0;
        for (double v : y) ss += (v - center) * (v - center);
        scale = std::sqrt(ss / (n - 1));
    }
    LMat k(n, std::vector<long double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) k[i][j] = kernel_ld(x[i], x[j], h) + (i == j ? h.noise : 0.0L);
    LMat rhs(n, std::vector<long double>(2));
    for (std::size_t i = 0; i < n; ++i) {
        rhs[i][0] = (y[i] - center) / scale - h.mean;
        rhs[i][1] = kernel_ld(x[i], q, h);
    }
    const LMat sol = solve_ld(k, rhs);
    long double mu = h.mean, var = h.amplitude;
    for (std::size_t i = 0; i < n; ++i) {
        mu += rhs[i][1] * sol[i][0];
        var -= rhs[i][1] * sol[i][1];
    }
    return {center + scale * mu, scale * scale * var};
}

}  // namespace oracles
