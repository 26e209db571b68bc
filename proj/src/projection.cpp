#include "fspec/projection.hpp"

#include <algorithm>
#include <cmath>

#include "fspec/regression.hpp"

namespace fspec {

Measure project_measure(const Measure& measure, const Frame& frame) { return Measure::projected(measure, frame); }

AtomicMeasure project_points(const AtomicMeasure& atoms, const Frame& frame, double merge_tol) {
  require(atoms.dim == frame.ambient_dim(), ErrorCode::dimension_mismatch,
          "frame ambient dimension differs from the atom dimension");
  AtomicMeasure out;
  out.dim = frame.dim();
  out.coords.reserve(atoms.size() * static_cast<std::size_t>(out.dim));
  out.weights.reserve(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) out.add(frame.project(atoms.point(i)), atoms.weights[i]);
  return merge_coincident(out, merge_tol);
}

BoxDimension box_dimension(const AtomicMeasure& points, int j_min, int j_max) {
  require(j_max - j_min >= 2, ErrorCode::invalid_argument, "box counting needs at least three scales");
  require(j_min >= 0 && j_max <= 52, ErrorCode::invalid_argument, "scale exponents must lie in [0, 52]");
  const auto d = static_cast<std::size_t>(points.dim);
  {
    bool distinct = false;
    for (std::size_t i = 1; i < points.size() && !distinct; ++i)
      for (std::size_t c = 0; c < d; ++c)
        if (points.coords[i * d + c] != points.coords[c]) distinct = true;
    require(distinct, ErrorCode::degenerate, "box counting a single point");
  }
  BoxDimension out;
  std::vector<double> xs, ys;
  auto record = [&](int j, std::size_t count) {
    out.scales.push_back(j);
    out.counts.push_back(count);
    xs.push_back(j);
    ys.push_back(std::log2(static_cast<double>(count)));
  };
  if (d == 1) {
    // floor is monotone, so one sort serves every scale
    std::vector<double> x(points.coords);
    std::sort(x.begin(), x.end());
    for (int j = j_min; j <= j_max; ++j) {
      const double scale = std::ldexp(1.0, j);
      std::size_t count = 0;
      double prev = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        double b = std::floor(x[i] * scale);
        if (i == 0 || b != prev) ++count;
        prev = b;
      }
      record(j, count);
    }
  } else {
    std::vector<long long> keys(points.size() * d);
    std::vector<std::size_t> order(points.size());
    for (int j = j_min; j <= j_max; ++j) {
      const double scale = std::ldexp(1.0, j);
      for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t c = 0; c < d; ++c)
          keys[i * d + c] = static_cast<long long>(std::floor(points.coords[i * d + c] * scale));
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      auto less = [&](std::size_t a, std::size_t b) {
        auto pa = keys.begin() + static_cast<long>(a * d), pb = keys.begin() + static_cast<long>(b * d);
        return std::lexicographical_compare(pa, pa + static_cast<long>(d), pb, pb + static_cast<long>(d));
      };
      std::sort(order.begin(), order.end(), less);
      std::size_t count = 0;
      for (std::size_t i = 0; i < order.size(); ++i)
        if (i == 0 || less(order[i - 1], order[i])) ++count;
      record(j, count);
    }
  }
  LineFit f = fit_line(xs, ys);
  out.dimension = f.slope;
  out.stderr_ = f.slope_stderr;
  if (out.counts.back() * 2 > points.size())
    out.warning = "finest scale holds more than half as many boxes as points; too few points for this scale";
  return out;
}

}  // namespace fspec
