#pragma once

#include <functional>

#include "qgad/data/series.hpp"

namespace qgad {

// Trained-model surface consumed by detection: predict the next point from
// a window, and score a (window, candidate) pair in [0, 1].
using GeneratorFn = std::function<data::TimePoint(const data::TimeWindow&)>;
using DiscriminatorFn = std::function<double(const data::TimeWindow&, const data::TimePoint&)>;

} // namespace qgad
