#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace myopic {

/// Ordinary least squares y = slope * x + intercept.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> residuals;
  std::size_t points = 0;
};

/// Throws ValidationError for fewer than two points or constant x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace myopic
