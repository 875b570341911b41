#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace sdde {

using Vector = std::vector<double>;

/// Euclidean norm. Falls back to a scaled sum when the plain sum of squares overflows.
inline double norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    if (std::isfinite(s)) return std::sqrt(s);
    double scale = 0.0;
    for (double v : x) {
        if (!std::isfinite(v)) return std::abs(v);
        scale = std::max(scale, std::abs(v));
    }
    s = 0.0;
    for (double v : x) s += (v / scale) * (v / scale);
    return scale * std::sqrt(s);
}

inline bool all_finite(std::span<const double> x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace sdde
