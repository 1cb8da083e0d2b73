#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace qgad::data {

struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace stats_detail {

// Continued-fraction evaluation for the regularized incomplete beta
// (modified Lentz method).
inline double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

} // namespace stats_detail

// Regularized incomplete beta I_x(a, b).
inline double inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log(1.0 - x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return bt * stats_detail::betacf(a, b, x) / a;
    }
    return 1.0 - bt * stats_detail::betacf(b, a, 1.0 - x) / b;
}

// P(F > f) for an F(d1, d2) variate.
inline double f_survival(double f, double d1, double d2) {
    if (!(f > 0.0)) return 1.0;
    if (std::isinf(f)) return 0.0;
    return inc_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

// Least squares via Householder QR. X is m x k row-major; returns the
// residual sum of squares and optionally the coefficients.
inline double ols_rss(std::vector<double> x, std::vector<double> y, std::size_t m, std::size_t k,
                      std::vector<double>* beta_out = nullptr) {
    if (k == 0 || m < k) throw std::invalid_argument("ols_rss: underdetermined system");
    std::vector<double> diag(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        double norm_sq = 0.0;
        for (std::size_t i = j; i < m; ++i) norm_sq += x[i * k + j] * x[i * k + j];
        const double norm = std::sqrt(norm_sq);
        if (norm < 1e-10) {
            throw SingularMatrixError("ols_rss: rank-deficient design matrix (column " +
                                      std::to_string(j) + ")");
        }
        const double alpha = x[j * k + j] >= 0.0 ? -norm : norm;
        // Householder vector v = x_j - alpha e_j, stored in place of column j
        x[j * k + j] -= alpha;
        double v_sq = 0.0;
        for (std::size_t i = j; i < m; ++i) v_sq += x[i * k + j] * x[i * k + j];
        diag[j] = alpha;
        if (v_sq < 1e-300) continue;
        for (std::size_t c = j + 1; c < k; ++c) {
            double dot = 0.0;
            for (std::size_t i = j; i < m; ++i) dot += x[i * k + j] * x[i * k + c];
            const double scale = 2.0 * dot / v_sq;
            for (std::size_t i = j; i < m; ++i) x[i * k + c] -= scale * x[i * k + j];
        }
        double dot_y = 0.0;
        for (std::size_t i = j; i < m; ++i) dot_y += x[i * k + j] * y[i];
        const double scale_y = 2.0 * dot_y / v_sq;
        for (std::size_t i = j; i < m; ++i) y[i] -= scale_y * x[i * k + j];
    }

    double rss = 0.0;
    for (std::size_t i = k; i < m; ++i) rss += y[i] * y[i];

    if (beta_out) {
        std::vector<double> beta(k, 0.0);
        for (std::size_t jj = k; jj-- > 0;) {
            double s = y[jj];
            for (std::size_t c = jj + 1; c < k; ++c) s -= x[jj * k + c] * beta[c];
            beta[jj] = s / diag[jj];
        }
        *beta_out = std::move(beta);
    }
    return rss;
}

struct GrangerResult {
    std::string feature;
    int max_lag = 0;
    double f_stat = 0.0;
    double p_value = 1.0;
    bool selected = false;
};

// Nested-OLS Granger causality test: does x help predict y beyond y's own
// lags? Both regressions carry an intercept; series are de-meaned first.
// F = ((RSS_r - RSS_u)/p) / (RSS_u/(m - 2p - 1)) with m = n - p usable rows.
inline GrangerResult granger_test(const std::vector<double>& x, const std::vector<double>& y,
                                  int max_lag) {
    if (x.size() != y.size()) throw std::invalid_argument("granger_test: length mismatch");
    if (max_lag < 1) throw std::invalid_argument("granger_test: max_lag must be >= 1");
    const auto n = static_cast<long>(y.size());
    const long p = max_lag;
    if (n <= 3 * p + 1) throw std::invalid_argument("granger_test: series too short for lag order");

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

    const double rss_r = ols_rss(design_r, target, m, k_r);
    const double rss_u = ols_rss(design_u, target, m, k_u);

    const double df2 = static_cast<double>(m) - 2.0 * static_cast<double>(p) - 1.0;
    if (df2 < 1.0) throw std::invalid_argument("granger_test: not enough observations");

    GrangerResult out;
    out.max_lag = max_lag;
    if (rss_u <= 1e-14 * std::max(rss_r, 1e-300)) {
        // perfect predictability; F blows up
        out.f_stat = std::numeric_limits<double>::infinity();
        out.p_value = 0.0;
        return out;
    }
    const double num = std::max(rss_r - rss_u, 0.0) / static_cast<double>(p);
    out.f_stat = num / (rss_u / df2);
    out.p_value = f_survival(out.f_stat, static_cast<double>(p), df2);
    return out;
}

struct FeatureSelection {
    std::vector<GrangerResult> ranked;
    std::vector<std::string> skipped; // singular regressions, reported not fatal
};

// Tests every candidate series against the label series and ranks by
// ascending p-value; entries below alpha are flagged selected.
inline FeatureSelection select_features(
    const std::vector<std::pair<std::string, std::vector<double>>>& candidates,
    const std::vector<double>& labels, double alpha, int max_lag) {
    if (candidates.empty()) throw std::invalid_argument("select_features: no candidates");
    FeatureSelection out;
    for (const auto& [name, series] : candidates) {
        try {
            GrangerResult r = granger_test(series, labels, max_lag);
            r.feature = name;
            r.selected = r.p_value < alpha;
            out.ranked.push_back(std::move(r));
        } catch (const SingularMatrixError&) {
            out.skipped.push_back(name);
        }
    }
    std::stable_sort(out.ranked.begin(), out.ranked.end(),
                     [](const GrangerResult& a, const GrangerResult& b) {
                         if (a.p_value != b.p_value) return a.p_value < b.p_value;
                         return a.feature < b.feature;
                     });
    return out;
}

} // namespace qgad::data
