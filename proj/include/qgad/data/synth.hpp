#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qgad/data/series.hpp"
#include "qgad/prng.hpp"

namespace qgad::data {

// Synthetic two-feature series: a random walk next to a modulated sinusoid.
// Constants are configurable; these defaults give a gentle, learnable shape.
struct SynthConfig {
    std::size_t length = 600;
    double walk_sigma = 0.05; // random-walk step stddev
    double wave_period = 50.0;
    double amp_base = 0.5;
    double amp_mod = 0.3;
    double amp_period = 400.0;
    double phase_mod = 2.0;
    double phase_period = 300.0;
};

struct AnomalySpan {
    std::size_t start = 0;
    std::size_t duration = 0;
    double shift_a = 0.0;
    double shift_b = 0.0;
};

namespace synth_detail {

// Rescales a series to [-1, 1] in place; a constant series maps to 0.
inline void rescale_unit(std::vector<double>& v) {
    double lo = v[0], hi = v[0];
    for (double t : v) {
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    if (hi > lo) {
        for (double& t : v) t = 2.0 * (t - lo) / (hi - lo) - 1.0;
    } else {
        for (double& t : v) t = 0.0;
    }
}

} // namespace synth_detail

// All-benign synthetic intervals: feature a is the random walk, feature b
// the amplitude/phase-modulated sinusoid, both rescaled to [-1, 1].
inline std::vector<IntervalAggregate> synth_series(const SynthConfig& cfg, std::uint64_t seed) {
    if (cfg.length < 16) throw std::invalid_argument("synth_series: length must be >= 16");
    constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

    Prng rng(seed);
    std::vector<double> a(cfg.length), b(cfg.length);
    double walk = 0.0;
    for (std::size_t t = 0; t < cfg.length; ++t) {
        a[t] = walk;
        walk += rng.normal(0.0, cfg.walk_sigma);
        const double td = static_cast<double>(t);
        const double amp = cfg.amp_base + cfg.amp_mod * std::sin(kTwoPi * td / cfg.amp_period);
        const double phase = cfg.phase_mod * std::sin(kTwoPi * td / cfg.phase_period);
        b[t] = amp * std::sin(kTwoPi * td / cfg.wave_period + phase);
    }
    synth_detail::rescale_unit(a);
    synth_detail::rescale_unit(b);

    std::vector<IntervalAggregate> out(cfg.length);
    for (std::size_t t = 0; t < cfg.length; ++t) {
        out[t].t = static_cast<long>(t);
        out[t].a = a[t];
        out[t].b = b[t];
        out[t].attack_count = 0;
    }
    return out;
}

// Additive level shifts on the listed spans; shifted seconds are labeled
// anomalous even when the shift magnitude is zero (hard-negative fixtures).
inline void inject_anomalies(std::vector<IntervalAggregate>& series,
                             const std::vector<AnomalySpan>& spans) {
    for (const auto& span : spans) {
        if (span.start + span.duration > series.size()) {
            throw std::invalid_argument("inject_anomalies: span exceeds series length");
        }
        for (std::size_t t = span.start; t < span.start + span.duration; ++t) {
            series[t].a += span.shift_a;
            series[t].b += span.shift_b;
            series[t].attack_count += 1;
        }
    }
}

} // namespace qgad::data
