#pragma once

#include <numbers>

namespace polpair {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
// (2*pi)^3, the Fourier measure that recurs in every mode normalization.
inline constexpr double kTwoPiCubed = kTwoPi * kTwoPi * kTwoPi;

inline constexpr double kDefaultPoleGuard = 1e-9;
inline constexpr int kDefaultMaxIter = 200;

}  // namespace polpair
