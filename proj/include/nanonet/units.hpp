#pragma once

#include <cmath>
#include <numbers>

namespace nanonet {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kLn10Over10 = std::numbers::ln10 / 10.0;

/// 10 log10 of a linear power ratio.
inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

/// Standard normal CDF.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace nanonet
