#pragma once

#include <span>

namespace aerochunk {

/// Coefficient of variation of chunk volumes: population standard deviation over mean.
/// Zero for a single chunk or equal volumes.
double heuristic_cv(std::span<const double> volumes);

}  // namespace aerochunk
