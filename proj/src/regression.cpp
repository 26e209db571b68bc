#include "fspec/regression.hpp"

#include <cmath>

#include "fspec/error.hpp"

namespace fspec {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), ErrorCode::dimension_mismatch, "fit_line: x and y differ in length");
  const std::size_t n = x.size();
  require(n >= 2, ErrorCode::degenerate, "fit_line needs at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0, ErrorCode::degenerate, "fit_line: all x values coincide");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - (f.intercept + f.slope * x[i]);
    f.residuals.push_back(r);
    rss += r * r;
  }
  if (n > 2) f.slope_stderr = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  return f;
}

}  // namespace fspec
