#pragma once

// Test-only reference implementations, deliberately on different algebraic
// routes than the library: normal-equation OLS (vs Householder QR) and an
// adaptive-Simpson incomplete beta (vs the continued fraction).

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qgad::testsupport {

// Solves (X'X) beta = X'y by Gauss-Jordan with partial pivoting and returns
// the residual sum of squares.
inline double ols_rss_normal_equations(const std::vector<double>& x, const std::vector<double>& y,
                                       std::size_t m, std::size_t k) {
    std::vector<double> xtx(k * k, 0.0), xty(k, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t a = 0; a < k; ++a) {
            xty[a] += x[i * k + a] * y[i];
            for (std::size_t b = 0; b < k; ++b) xtx[a * k + b] += x[i * k + a] * x[i * k + b];
        }
    }
    // Gauss-Jordan
    std::vector<double> beta = xty;
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < k; ++r) {
            if (std::abs(xtx[r * k + col]) > std::abs(xtx[pivot * k + col])) pivot = r;
        }
        if (std::abs(xtx[pivot * k + col]) < 1e-12) {
            throw std::runtime_error("oracle OLS: singular normal equations");
        }
        if (pivot != col) {
            for (std::size_t c = 0; c < k; ++c) std::swap(xtx[col * k + c], xtx[pivot * k + c]);
            std::swap(beta[col], beta[pivot]);
        }
        const double d = xtx[col * k + col];
        for (std::size_t c = 0; c < k; ++c) xtx[col * k + c] /= d;
        beta[col] /= d;
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            const double f = xtx[r * k + col];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < k; ++c) xtx[r * k + c] -= f * xtx[col * k + c];
            beta[r] -= f * beta[col];
        }
    }
    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double fit = 0.0;
        for (std::size_t a = 0; a < k; ++a) fit += x[i * k + a] * beta[a];
        const double r = y[i] - fit;
        rss += r * r;
    }
    return rss;
}

namespace oracle_detail {

inline double beta_integrand(double t, double a, double b) {
    if (t <= 0.0 || t >= 1.0) {
        // a, b >= 1 in every use here, so the integrand vanishes at endpoints
        return (a > 1.0 && b > 1.0) ? 0.0 : std::pow(t, a - 1.0) * std::pow(1.0 - t, b - 1.0);
    }
    return std::exp((a - 1.0) * std::log(t) + (b - 1.0) * std::log(1.0 - t));
}

inline double adaptive_simpson(double lo, double hi, double f_lo, double f_mid, double f_hi,
                               double whole, double tol, int depth, double a, double b) {
    const double mid = 0.5 * (lo + hi);
    const double lmid = 0.5 * (lo + mid);
    const double rmid = 0.5 * (mid + hi);
    const double f_lmid = beta_integrand(lmid, a, b);
    const double f_rmid = beta_integrand(rmid, a, b);
    const double left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lmid + f_mid);
    const double right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_rmid + f_hi);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson(lo, mid, f_lo, f_lmid, f_mid, left, tol / 2.0, depth - 1, a, b) +
           adaptive_simpson(mid, hi, f_mid, f_rmid, f_hi, right, tol / 2.0, depth - 1, a, b);
}

} // namespace oracle_detail

// Regularized incomplete beta by adaptive quadrature.
inline double inc_beta_quadrature(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double f_lo = oracle_detail::beta_integrand(0.0, a, b);
    const double f_hi = oracle_detail::beta_integrand(x, a, b);
    const double f_mid = oracle_detail::beta_integrand(x / 2.0, a, b);
    const double whole = x / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
    const double integral =
        oracle_detail::adaptive_simpson(0.0, x, f_lo, f_mid, f_hi, whole, 1e-13, 40, a, b);
    const double ln_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    return integral / std::exp(ln_beta);
}

inline double f_survival_quadrature(double f, double d1, double d2) {
    if (!(f > 0.0)) return 1.0;
    if (std::isinf(f)) return 0.0;
    return inc_beta_quadrature(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

// Full reference Granger F/p computation on the same convention as the
// library (intercept + de-meaned series, df2 = m - 2p - 1).
inline void granger_oracle(const std::vector<double>& x, const std::vector<double>& y, int p,
                           double& f_out, double& pval_out) {
    const auto n = static_cast<long>(y.size());
    auto demean = [](std::vector<double> v) {
        double mean = 0.0;
        for (double t : v) mean += t;
        mean /= static_cast<double>(v.size());
        for (double& t : v) t -= mean;
        return v;
    };
    const std::vector<double> xs = demean(x);
    const std::vector<double> ys = demean(y);
    const auto m = static_cast<std::size_t>(n - p);
    const std::size_t k_r = static_cast<std::size_t>(p) + 1;
    const std::size_t k_u = 2 * static_cast<std::size_t>(p) + 1;
    std::vector<double> design_r(m * k_r), design_u(m * k_u), target(m);
    for (std::size_t row = 0; row < m; ++row) {
        const auto t = static_cast<std::size_t>(p) + row;
        target[row] = ys[t];
        design_r[row * k_r] = 1.0;
        design_u[row * k_u] = 1.0;
        for (long lag = 1; lag <= p; ++lag) {
            design_r[row * k_r + lag] = ys[t - lag];
            design_u[row * k_u + lag] = ys[t - lag];
            design_u[row * k_u + p + lag] = xs[t - lag];
        }
    }
    const double rss_r = ols_rss_normal_equations(design_r, target, m, k_r);
    const double rss_u = ols_rss_normal_equations(design_u, target, m, k_u);
    const double df2 = static_cast<double>(m) - 2.0 * p - 1.0;
    f_out = (std::max(rss_r - rss_u, 0.0) / p) / (rss_u / df2);
    pval_out = f_survival_quadrature(f_out, p, df2);
}

} // namespace qgad::testsupport
