// Tagged-tree JSON form of Measure.

#include <string>

#include "fspec/measure.hpp"
#include "fspec/numparse.hpp"
#include "json.hpp"
#include "measure_nodes.hpp"

namespace fspec {

using nlohmann::json;

namespace {

double real_of(const json& v, const char* what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_real(v.get<std::string>());
  fail(ErrorCode::parse, std::string("expected a number for '") + what + "'");
}

std::vector<double> reals_of(const json& v, const char* what) {
  if (!v.is_array()) fail(ErrorCode::parse, std::string("expected an array for '") + what + "'");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(real_of(x, what));
  return out;
}

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(ErrorCode::parse, std::string("missing field '") + key + "'");
  return *it;
}

json frame_to_json(const Frame& f) {
  json rows = json::array();
  for (const auto& v : f.basis()) rows.push_back(v);
  return rows;
}

json node_to_json(const Measure& m) {
  using namespace detail;
  const Node& n = m.node();
  switch (n.kind()) {
    case NodeKind::self_similar: {
      const auto& s = static_cast<const SelfSimilarNode&>(n);
      return {{"type", "selfsimilar1d"},
              {"ratio", s.ratio},
              {"translations", s.translations},
              {"weights", s.weights},
              {"osc", s.osc}};
    }
    case NodeKind::atomic: {
      const auto& a = static_cast<const AtomicNode&>(n).atoms;
      json pts = json::array();
      for (std::size_t i = 0; i < a.size(); ++i) {
        auto p = a.point(i);
        pts.push_back(std::vector<double>(p.begin(), p.end()));
      }
      return {{"type", "atomic"}, {"dim", a.dim}, {"points", pts}, {"weights", a.weights}};
    }
    case NodeKind::product: {
      json fs = json::array();
      for (const auto& f : static_cast<const ProductNode&>(n).factors) fs.push_back(node_to_json(f));
      return {{"type", "product"}, {"factors", fs}};
    }
    case NodeKind::conv_power: {
      const auto& c = static_cast<const ConvPowerNode&>(n);
      return {{"type", "convpower"}, {"n", c.n}, {"base", node_to_json(c.base)}};
    }
    case NodeKind::mixture: {
      const auto& x = static_cast<const MixtureNode&>(n);
      json ps = json::array();
      for (const auto& p : x.parts) ps.push_back(node_to_json(p));
      return {{"type", "mixture"}, {"weights", x.coefficients}, {"components", ps}};
    }
    case NodeKind::affine: {
      const auto& a = static_cast<const AffineNode&>(n);
      return {{"type", "affine"}, {"scale", a.scale}, {"shift", a.shift}, {"base", node_to_json(a.base)}};
    }
    case NodeKind::projected: {
      const auto& p = static_cast<const ProjectedNode&>(n);
      return {{"type", "projected"}, {"frame", frame_to_json(p.frame)}, {"base", node_to_json(p.base)}};
    }
  }
  fail(ErrorCode::numerical, "unknown node kind");
}

Measure node_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorCode::parse, "measure node must be a JSON object");
  const std::string type = field(j, "type").get<std::string>();
  if (type == "selfsimilar1d") {
    bool osc = j.value("osc", true);
    return Measure::self_similar(real_of(field(j, "ratio"), "ratio"), reals_of(field(j, "translations"), "translations"),
                                 reals_of(field(j, "weights"), "weights"), osc);
  }
  if (type == "cantor") return cantor_measure(real_of(field(j, "alpha"), "alpha"));
  if (type == "lebesgue") return lebesgue_unit_interval();
  if (type == "atomic") {
    AtomicMeasure a;
    a.dim = field(j, "dim").get<int>();
    if (a.dim < 1) fail(ErrorCode::parse, "atomic 'dim' must be positive");
    const auto& pts = field(j, "points");
    auto ws = reals_of(field(j, "weights"), "weights");
    if (!pts.is_array() || pts.size() != ws.size()) fail(ErrorCode::parse, "atomic points/weights length mismatch");
    for (std::size_t i = 0; i < ws.size(); ++i) {
      auto p = reals_of(pts[i], "points");
      if (static_cast<int>(p.size()) != a.dim) fail(ErrorCode::parse, "atomic point has wrong dimension");
      a.add(p, ws[i]);
    }
    return Measure::atomic(std::move(a));
  }
  if (type == "product") {
    std::vector<Measure> fs;
    for (const auto& f : field(j, "factors")) fs.push_back(node_from_json(f));
    return Measure::product(std::move(fs));
  }
  if (type == "convpower") return Measure::conv_power(node_from_json(field(j, "base")), field(j, "n").get<int>());
  if (type == "mixture") {
    std::vector<Measure> ps;
    for (const auto& p : field(j, "components")) ps.push_back(node_from_json(p));
    return Measure::mixture(reals_of(field(j, "weights"), "weights"), std::move(ps));
  }
  if (type == "affine")
    return Measure::affine(node_from_json(field(j, "base")), reals_of(field(j, "scale"), "scale"),
                           reals_of(field(j, "shift"), "shift"));
  if (type == "projected") {
    Measure base = node_from_json(field(j, "base"));
    std::vector<Point> rows;
    for (const auto& r : field(j, "frame")) rows.push_back(reals_of(r, "frame"));
    return Measure::projected(base, Frame(base.dim(), std::move(rows)));
  }
  fail(ErrorCode::parse, "unknown measure type '" + type + "'");
}

}  // namespace

std::string Measure::to_json() const { return node_to_json(*this).dump(); }

Measure Measure::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, std::string("invalid JSON: ") + e.what());
  }
  try {
    Measure m = node_from_json(j);
    const bool sub = j.value("subprobability", false);
    if (!sub)
      require(m.is_probability(1e-9), ErrorCode::invalid_argument,
              "root measure must have mass 1 (set \"subprobability\": true to allow less)");
    else
      require(m.mass() <= 1.0 + 1e-12, ErrorCode::invalid_argument, "mass exceeds 1");
    return m;
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, std::string("malformed measure description: ") + e.what());
  }
}

}  // namespace fspec
