#include "aerochunk/heuristic.hpp"

#include <cmath>

namespace aerochunk {

double heuristic_cv(std::span<const double> volumes) {
  if (volumes.empty()) return 0.0;
  const double n = static_cast<double>(volumes.size());
  double sum = 0.0;
  for (double v : volumes) sum += v;
  const double mean = sum / n;
  double sq = 0.0;
  for (double v : volumes) sq += (v - mean) * (v - mean);
  return std::sqrt(sq / n) / mean;
}

}  // namespace aerochunk
