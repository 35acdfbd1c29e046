#pragma once

#include <numbers>

namespace phaseest {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;
inline constexpr double kQuarterPi = std::numbers::pi / 4.0;

// Vacuum quadrature variance for x_ψ = ½(e^{-iψ}a + e^{iψ}a†).
inline constexpr double kVacuumVariance = 0.25;

}  // namespace phaseest
