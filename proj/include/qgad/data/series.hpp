#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgad/data/csv.hpp"

namespace qgad::data {

// One 1-second traffic bucket: mean forward inter-arrival time (a), mean
// forward packet length (b), and how many attack-labeled records landed in it.
struct IntervalAggregate {
    long t = 0;
    double a = 0.0;
    double b = 0.0;
    long attack_count = 0;

    bool is_attack() const { return attack_count > 0; }
};

// Scaled observation of the two model features at one second.
struct TimePoint {
    double a = 0.0;
    double b = 0.0;
};

// tau consecutive scaled points plus the following target point.
struct TimeWindow {
    std::vector<TimePoint> points;
    TimePoint target;
    bool target_label = false;
    long t = 0; // time index of the target
};

inline std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_intervals_csv(const std::string& path,
                                const std::vector<IntervalAggregate>& intervals,
                                const std::string& comment = {}) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write intervals CSV: " + path);
    if (!comment.empty()) out << "# " << comment << "\n";
    out << "t,a,b,attack_count\n";
    for (const auto& iv : intervals) {
        out << iv.t << ',' << format_full(iv.a) << ',' << format_full(iv.b) << ','
            << iv.attack_count << '\n';
    }
}

inline std::vector<IntervalAggregate> read_intervals_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const int ct = table.column("t");
    const int ca = table.column("a");
    const int cb = table.column("b");
    const int cc = table.column("attack_count");
    if (ct < 0 || ca < 0 || cb < 0 || cc < 0) {
        throw IoError("intervals CSV missing required columns t,a,b,attack_count: " + path);
    }
    std::vector<IntervalAggregate> out;
    out.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        IntervalAggregate iv;
        double t = 0, cnt = 0;
        if (!parse_double(row[ct], t) || !parse_double(row[ca], iv.a) ||
            !parse_double(row[cb], iv.b) || !parse_double(row[cc], cnt)) {
            throw IoError("intervals CSV has a malformed row: " + path);
        }
        iv.t = static_cast<long>(t);
        iv.attack_count = static_cast<long>(cnt);
        out.push_back(iv);
    }
    return out;
}

// Per-feature min/max fitted on the training slice; maps to [-1, 1].
class Scaler {
  public:
    Scaler() = default;
    Scaler(double min_a, double max_a, double min_b, double max_b)
        : min_a_(min_a), max_a_(max_a), min_b_(min_b), max_b_(max_b) {
        if (!(max_a_ > min_a_) || !(max_b_ > min_b_)) {
            throw std::invalid_argument("Scaler: max must exceed min for both features");
        }
    }

    // Fits on benign intervals only when any benign interval exists.
    static Scaler fit(const std::vector<IntervalAggregate>& intervals) {
        bool seen = false;
        double min_a = 0, max_a = 0, min_b = 0, max_b = 0;
        for (const auto& iv : intervals) {
            if (iv.is_attack()) continue;
            if (!seen) {
                min_a = max_a = iv.a;
                min_b = max_b = iv.b;
                seen = true;
            } else {
                min_a = std::min(min_a, iv.a);
                max_a = std::max(max_a, iv.a);
                min_b = std::min(min_b, iv.b);
                max_b = std::max(max_b, iv.b);
            }
        }
        if (!seen) throw std::invalid_argument("Scaler::fit: no benign intervals to fit on");
        return Scaler(min_a, max_a, min_b, max_b);
    }

    double min_a() const { return min_a_; }
    double max_a() const { return max_a_; }
    double min_b() const { return min_b_; }
    double max_b() const { return max_b_; }

    // clamp=true is the test-time policy: out-of-range values saturate at
    // the boundary and the clamp is counted.
    TimePoint scale(double a, double b, bool clamp = true) const {
        TimePoint p;
        p.a = scale_one(a, min_a_, max_a_, clamp);
        p.b = scale_one(b, min_b_, max_b_, clamp);
        return p;
    }

    TimePoint scale(const IntervalAggregate& iv, bool clamp = true) const {
        return scale(iv.a, iv.b, clamp);
    }

    TimePoint unscale(const TimePoint& p) const {
        return {unscale_one(p.a, min_a_, max_a_), unscale_one(p.b, min_b_, max_b_)};
    }

    long clamp_count() const { return clamps_; }
    void reset_clamp_count() { clamps_ = 0; }

  private:
    double min_a_ = 0.0, max_a_ = 1.0, min_b_ = 0.0, max_b_ = 1.0;
    mutable long clamps_ = 0;

    double scale_one(double x, double lo, double hi, bool clamp) const {
        double v = 2.0 * (x - lo) / (hi - lo) - 1.0;
        if (v < -1.0 || v > 1.0) {
            if (!clamp) throw std::domain_error("Scaler: value outside fitted range");
            v = std::clamp(v, -1.0, 1.0);
            ++clamps_;
        }
        return v;
    }

    static double unscale_one(double v, double lo, double hi) {
        return lo + (v + 1.0) * (hi - lo) / 2.0;
    }
};

struct SplitResult {
    std::vector<IntervalAggregate> train;
    std::vector<IntervalAggregate> test;
    bool train_is_second_half = false;
    long train_attack_intervals = 0; // attacks left inside the training half
};

// Chronological split; the half with no (or fewest) attack intervals trains.
// Ties break toward training on the second half.
inline SplitResult split_benign_train(const std::vector<IntervalAggregate>& intervals,
                                      double ratio) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw std::invalid_argument("split_benign_train: ratio must lie in (0, 1)");
    }
    if (intervals.size() < 2) {
        throw std::invalid_argument("split_benign_train: need at least 2 intervals");
    }
    const auto n = intervals.size();
    auto cut = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratio));
    cut = std::clamp<std::size_t>(cut, 1, n - 1);

    std::vector<IntervalAggregate> first(intervals.begin(), intervals.begin() + cut);
    std::vector<IntervalAggregate> second(intervals.begin() + cut, intervals.end());

    const auto attacks = [](const std::vector<IntervalAggregate>& v) {
        long c = 0;
        for (const auto& iv : v) c += iv.is_attack() ? 1 : 0;
        return c;
    };
    const long a_first = attacks(first);
    const long a_second = attacks(second);

    SplitResult out;
    out.train_is_second_half = a_second <= a_first;
    if (out.train_is_second_half) {
        out.train = std::move(second);
        out.test = std::move(first);
        out.train_attack_intervals = a_second;
    } else {
        out.train = std::move(first);
        out.test = std::move(second);
        out.train_attack_intervals = a_first;
    }
    const bool any_benign =
        std::any_of(out.train.begin(), out.train.end(),
                    [](const IntervalAggregate& iv) { return !iv.is_attack(); });
    if (!any_benign) {
        throw std::invalid_argument("split_benign_train: both halves are fully attacked");
    }
    return out;
}

// Window k covers points k..k+tau-1 with point k+tau as target; the target
// label rides along. Yields n - tau windows.
inline std::vector<TimeWindow> make_windows(const std::vector<TimePoint>& points,
                                            const std::vector<bool>& labels, int tau = 3,
                                            long t0 = 0) {
    if (tau < 1) throw std::invalid_argument("make_windows: tau must be >= 1");
    if (points.size() != labels.size()) {
        throw std::invalid_argument("make_windows: points/labels length mismatch");
    }
    if (points.size() <= static_cast<std::size_t>(tau)) {
        throw std::invalid_argument("make_windows: series too short for tau");
    }
    std::vector<TimeWindow> out;
    out.reserve(points.size() - tau);
    for (std::size_t k = 0; k + tau < points.size(); ++k) {
        TimeWindow w;
        w.points.assign(points.begin() + k, points.begin() + k + tau);
        w.target = points[k + tau];
        w.target_label = labels[k + tau];
        w.t = t0 + static_cast<long>(k) + tau;
        out.push_back(std::move(w));
    }
    return out;
}

// Training windows must not touch attack intervals at all.
inline std::vector<TimeWindow> drop_attack_windows(const std::vector<TimeWindow>& windows,
                                                   const std::vector<bool>& labels, int tau,
                                                   long t0 = 0) {
    std::vector<TimeWindow> out;
    for (const auto& w : windows) {
        const auto target_idx = static_cast<std::size_t>(w.t - t0);
        bool touched = false;
        for (std::size_t i = target_idx - tau; i <= target_idx; ++i) {
            if (labels[i]) {
                touched = true;
                break;
            }
        }
        if (!touched) out.push_back(w);
    }
    return out;
}

} // namespace qgad::data
