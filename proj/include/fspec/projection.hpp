#pragma once

#include <string>
#include <vector>

#include "fspec/frame.hpp"
#include "fspec/measure.hpp"

namespace fspec {

/// Push-forward of `measure` under P_V; ft(y) of the result is ft(lift(y)).
Measure project_measure(const Measure& measure, const Frame& frame);

/// Atoms mapped to frame coordinates; images closer than merge_tol in every
/// coordinate (after a lexicographic sort) are merged with summed weights.
AtomicMeasure project_points(const AtomicMeasure& atoms, const Frame& frame, double merge_tol = 1e-12);

struct BoxDimension {
  double dimension = 0;   // slope of log2 N(2^-j) against j
  double stderr_ = 0;
  std::vector<int> scales;
  std::vector<std::size_t> counts;
  std::string warning;    // set when the finest scale is close to saturating the point count
};

/// Box counting with half-open dyadic boxes [m 2^-j, (m+1) 2^-j) anchored at 0.
BoxDimension box_dimension(const AtomicMeasure& points, int j_min, int j_max);

}  // namespace fspec
