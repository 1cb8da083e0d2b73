#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgad/data/series.hpp"
#include "qgad/model_fn.hpp"

namespace qgad::detect {

using data::TimePoint;
using data::TimeWindow;

struct DetectError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ScoreMode { Combined, GenOnly, DiscOnly };

inline const char* mode_name(ScoreMode m) {
    switch (m) {
    case ScoreMode::Combined:
        return "combined";
    case ScoreMode::GenOnly:
        return "gen_only";
    default:
        return "disc_only";
    }
}

inline ScoreMode mode_from_name(const std::string& s) {
    if (s == "combined") return ScoreMode::Combined;
    if (s == "gen_only") return ScoreMode::GenOnly;
    if (s == "disc_only") return ScoreMode::DiscOnly;
    throw std::invalid_argument("unknown score mode: " + s);
}

struct ScoreComponents {
    long t = 0;
    double mse = 0.0;
    double d = 0.0;
    double w_g = 0.0;
    double w_d = 0.0;
    double s = 0.0;
    bool flag = false;
};

struct Weights {
    double w_g = 0.5;
    double w_d = 0.5;
};

// w_G = L_D/(L_G + L_D), w_D = L_G/(L_G + L_D): confidence goes to the
// component with the lower training loss. An exactly-zero loss pair is a
// pathological run; fall back to even weights with a warning.
inline Weights loss_weights(double loss_g, double loss_d) {
    if (loss_g < 0.0 || loss_d < 0.0 || !std::isfinite(loss_g) || !std::isfinite(loss_d)) {
        throw DetectError("loss_weights: losses must be finite and nonnegative");
    }
    const double sum = loss_g + loss_d;
    if (sum == 0.0) {
        std::cerr << "warning: degenerate zero training losses; using equal weights\n";
        return {0.5, 0.5};
    }
    return {loss_d / sum, loss_g / sum};
}

inline ScoreComponents make_score(double mse, double d, const Weights& w, ScoreMode mode,
                                  long t = 0) {
    ScoreComponents sc;
    sc.t = t;
    sc.mse = mse;
    sc.d = d;
    switch (mode) {
    case ScoreMode::Combined:
        sc.w_g = w.w_g;
        sc.w_d = w.w_d;
        break;
    case ScoreMode::GenOnly:
        sc.w_g = 1.0;
        sc.w_d = 0.0;
        break;
    case ScoreMode::DiscOnly:
        sc.w_g = 0.0;
        sc.w_d = 1.0;
        break;
    }
    sc.s = sc.w_g * sc.mse + sc.w_d * (1.0 - sc.d);
    return sc;
}

// Scores one point: generator prediction error against the actual target,
// discriminator score of (window, actual target), weighted per mode.
inline ScoreComponents score_point(const GeneratorFn& gen, const DiscriminatorFn& disc,
                                   double loss_g, double loss_d, const TimeWindow& window,
                                   ScoreMode mode = ScoreMode::Combined) {
    const TimePoint predicted = gen(window);
    const double da = predicted.a - window.target.a;
    const double db = predicted.b - window.target.b;
    const double mse = (da * da + db * db) / 2.0;
    const double d = disc(window, window.target);
    return make_score(mse, d, loss_weights(loss_g, loss_d), mode, window.t);
}

struct Threshold {
    double value = 0.0;
    double percentile = 99.99;
    std::size_t source_size = 0;
};

// Nearest-rank order statistic: k = ceil(p/100 * n), threshold = k-th
// smallest. The 1e-9 slack guards against percentile values that are not
// binary-representable landing just above an integer rank.
inline Threshold compute_threshold(std::vector<double> scores, double percentile = 99.99) {
    if (scores.empty()) throw DetectError("compute_threshold: empty score list");
    if (!(percentile > 0.0) || percentile > 100.0) {
        throw DetectError("compute_threshold: percentile must lie in (0, 100]");
    }
    for (double s : scores) {
        if (!std::isfinite(s)) throw DetectError("compute_threshold: non-finite score");
    }
    std::sort(scores.begin(), scores.end());
    const auto n = scores.size();
    auto k = static_cast<std::size_t>(
        std::ceil(percentile * static_cast<double>(n) / 100.0 - 1e-9));
    k = std::clamp<std::size_t>(k, 1, n);
    Threshold t;
    t.value = scores[k - 1];
    t.percentile = percentile;
    t.source_size = n;
    return t;
}

// Anomalous iff strictly above the threshold.
inline std::vector<bool> classify(const std::vector<ScoreComponents>& scores,
                                  const Threshold& threshold) {
    std::vector<bool> flags(scores.size(), false);
    for (std::size_t i = 0; i < scores.size(); ++i) flags[i] = scores[i].s > threshold.value;
    return flags;
}

struct MetricsReport {
    double accuracy = 0.0;
    double recall = 0.0;
    double precision = 0.0;
    double f1 = 0.0;
    double mse = 0.0;
    long tp = 0, fp = 0, tn = 0, fn = 0;
};

// Confusion-matrix metrics with anomaly as the positive class.
inline MetricsReport metrics(const std::vector<bool>& flags, const std::vector<bool>& labels,
                             double mse = 0.0) {
    if (flags.size() != labels.size()) throw DetectError("metrics: length mismatch");
    MetricsReport r;
    r.mse = mse;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (labels[i]) {
            flags[i] ? ++r.tp : ++r.fn;
        } else {
            flags[i] ? ++r.fp : ++r.tn;
        }
    }
    const auto total = static_cast<double>(flags.size());
    r.accuracy = total > 0.0 ? static_cast<double>(r.tp + r.tn) / total : 0.0;
    r.precision = (r.tp + r.fp) > 0 ? static_cast<double>(r.tp) / (r.tp + r.fp) : 0.0;
    r.recall = (r.tp + r.fn) > 0 ? static_cast<double>(r.tp) / (r.tp + r.fn) : 0.0;
    r.f1 = (r.precision + r.recall) > 0.0
               ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
               : 0.0;
    return r;
}

struct SeriesResult {
    std::vector<ScoreComponents> points;
    MetricsReport report;
    Threshold threshold;
};

// Scores a window sequence, classifies against the stored threshold, and
// evaluates against the target labels.
inline SeriesResult score_series(const GeneratorFn& gen, const DiscriminatorFn& disc,
                                 double loss_g, double loss_d,
                                 const std::vector<TimeWindow>& windows,
                                 const Threshold& threshold, ScoreMode mode) {
    if (windows.empty()) throw DetectError("score_series: empty test set");
    SeriesResult out;
    out.threshold = threshold;
    std::vector<bool> labels;
    double mse_total = 0.0;
    for (const auto& w : windows) {
        auto sc = score_point(gen, disc, loss_g, loss_d, w, mode);
        sc.flag = sc.s > threshold.value;
        mse_total += sc.mse;
        labels.push_back(w.target_label);
        out.points.push_back(sc);
    }
    std::vector<bool> flags(out.points.size());
    for (std::size_t i = 0; i < out.points.size(); ++i) flags[i] = out.points[i].flag;
    out.report = metrics(flags, labels, mse_total / static_cast<double>(windows.size()));
    return out;
}

// Benign-score thresholds recomputed per mode over the same windows.
struct ModeThresholds {
    Threshold combined, gen_only, disc_only;

    const Threshold& of(ScoreMode m) const {
        switch (m) {
        case ScoreMode::Combined:
            return combined;
        case ScoreMode::GenOnly:
            return gen_only;
        default:
            return disc_only;
        }
    }
};

inline ModeThresholds compute_mode_thresholds(const GeneratorFn& gen, const DiscriminatorFn& disc,
                                              double loss_g, double loss_d,
                                              const std::vector<TimeWindow>& benign_windows,
                                              double percentile = 99.99) {
    if (benign_windows.empty()) {
        throw DetectError("compute_mode_thresholds: no benign windows");
    }
    std::vector<double> s_combined, s_gen, s_disc;
    const Weights w = loss_weights(loss_g, loss_d);
    for (const auto& win : benign_windows) {
        const auto base = score_point(gen, disc, loss_g, loss_d, win, ScoreMode::Combined);
        s_combined.push_back(base.s);
        s_gen.push_back(make_score(base.mse, base.d, w, ScoreMode::GenOnly).s);
        s_disc.push_back(make_score(base.mse, base.d, w, ScoreMode::DiscOnly).s);
    }
    ModeThresholds out;
    out.combined = compute_threshold(std::move(s_combined), percentile);
    out.gen_only = compute_threshold(std::move(s_gen), percentile);
    out.disc_only = compute_threshold(std::move(s_disc), percentile);
    return out;
}

// Scores CSV, one row per point, full decimal precision.
inline void write_scores_csv(const std::string& path, const std::vector<ScoreComponents>& points,
                             const std::vector<bool>& labels, const Threshold& threshold,
                             const std::string& comment = {}) {
    if (points.size() != labels.size()) throw DetectError("write_scores_csv: length mismatch");
    std::ofstream out(path);
    if (!out) throw data::IoError("cannot write scores CSV: " + path);
    if (!comment.empty()) out << "# " << comment << "\n";
    out << "t,mse,d_score,w_g,w_d,s,threshold,flag,label\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        out << p.t << ',' << data::format_full(p.mse) << ',' << data::format_full(p.d) << ','
            << data::format_full(p.w_g) << ',' << data::format_full(p.w_d) << ','
            << data::format_full(p.s) << ',' << data::format_full(threshold.value) << ','
            << (p.flag ? 1 : 0) << ',' << (labels[i] ? 1 : 0) << '\n';
    }
}

} // namespace qgad::detect
