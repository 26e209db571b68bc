#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fspec/bounds.hpp"
#include "fspec/constructions.hpp"
#include "fspec/spectrum.hpp"

namespace fspec::report {

/// Shortest decimal that reads back to the same double.
std::string num(double v);

std::string spectrum_csv(const std::vector<SpectrumEstimate>& est);
std::string spectrum_json(const std::vector<SpectrumEstimate>& est);

struct BoundsSummary {
  BoundProfile profile;
  std::vector<BestBound> best;   // one per u
  Threshold emptiness;
};
std::string bounds_csv(const BoundsSummary& b);
std::string bounds_json(const BoundsSummary& b);

std::string curves_csv(const std::vector<CurvePoint>& pts);
std::string curves_json(const CantorTriple& ex, const std::vector<CurvePoint>& pts);

/// `spectrum` holds (theta, value) of the profile drawn with the regions.
std::string regions_csv(const std::vector<ImprovementRegion>& regions,
                        const std::vector<std::pair<double, double>>& spectrum);
std::string regions_json(const std::vector<ImprovementRegion>& regions,
                         const std::vector<std::pair<double, double>>& spectrum);

/// Containment reports for stages that could not be checked carry the reason
/// in first_counterexample with checked == -1.
std::string lattice_csv(const LatticeSets& sets);
std::string lattice_json(const LatticeSets& sets, const std::vector<ContainmentReport>& containment);

std::string marstrand_csv(const MarstrandSummary& s);
std::string marstrand_json(const MarstrandSummary& s);

std::string example_json(const CantorTriple& ex);

/// Renders any CSV produced above as an SVG chart. The chart type follows
/// from the header line; throws Error(parse) on anything else.
std::string svg_from_csv(std::string_view csv);

}  // namespace fspec::report
