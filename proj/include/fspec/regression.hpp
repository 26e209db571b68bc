#pragma once

#include <span>
#include <vector>

namespace fspec {

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double slope_stderr = 0;  // OLS standard error; 0 when the fit is exact or n == 2
  std::vector<double> residuals;
};

/// Ordinary least squares y = intercept + slope*x. Throws Error(degenerate)
/// with fewer than two points or constant x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace fspec
