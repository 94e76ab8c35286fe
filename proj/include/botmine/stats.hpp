#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "botmine/types.hpp"

namespace botmine {

// Linear interpolation between order statistics; p in [0,1].
inline double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw PreconditionError("quantile of an empty list");
    std::sort(values.begin(), values.end());
    if (values.size() == 1) return values[0];
    double pos = p * static_cast<double>(values.size() - 1);
    size_t lo = static_cast<size_t>(std::floor(pos));
    size_t hi = static_cast<size_t>(std::ceil(pos));
    double frac = pos - static_cast<double>(lo);
    return values[lo] + (values[hi] - values[lo]) * frac;
}

struct FiveNumberSummary {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

inline FiveNumberSummary five_number_summary(const std::vector<double>& values) {
    FiveNumberSummary s;
    s.min = quantile(values, 0.0);
    s.q1 = quantile(values, 0.25);
    s.median = quantile(values, 0.5);
    s.q3 = quantile(values, 0.75);
    s.max = quantile(values, 1.0);
    return s;
}

}  // namespace botmine
