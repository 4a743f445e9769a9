#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace ixcomplex {

// Half-up rounding to `places` decimals. The nudge absorbs binary
// representation error so that e.g. 1.005 rounds to 1.01.
inline double round_half_up(double x, int places = 2) {
    const double scale = std::pow(10.0, places);
    const double scaled = std::fabs(x) * scale;
    const double r = std::floor(scaled + 0.5 + 1e-9 * std::max(1.0, scaled)) / scale;
    return x < 0 ? -r : r;
}

inline std::string fixed2(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", round_half_up(x, 2));
    return buf;
}

}  // namespace ixcomplex
