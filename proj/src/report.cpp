#include "fspec/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <map>
#include <sstream>

#include "json.hpp"

namespace fspec::report {

using json = nlohmann::json;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0) return "0";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

namespace {

// nlohmann writes non-finite numbers as null; keep them as strings instead
json jnum(double v) { return std::isfinite(v) ? json(v) : json(num(v)); }

const char* truth_name(Truth t) {
  switch (t) {
    case Truth::holds: return "holds";
    case Truth::fails: return "fails";
    case Truth::uncertain: return "uncertain";
  }
  return "?";
}

std::string rational_str(const Rational& r) {
  return r.denominator() == 1 ? std::to_string(r.numerator())
                              : std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace

// ---- spectrum ---------------------------------------------------------------------

std::string spectrum_csv(const std::vector<SpectrumEstimate>& est) {
  std::ostringstream o;
  o << "theta,s_hat,stderr,slope,intercept,window_lo,window_hi,quality\n";
  for (const auto& e : est)
    o << num(e.theta) << ',' << num(e.s_hat) << ',' << num(e.stderr_) << ',' << num(e.slope) << ','
      << num(e.intercept) << ',' << e.window_lo << ',' << e.window_hi << ',' << to_string(e.quality) << '\n';
  return o.str();
}

std::string spectrum_json(const std::vector<SpectrumEstimate>& est) {
  json arr = json::array();
  for (const auto& e : est) {
    json shells = json::array();
    for (const auto& s : e.shells) {
      json js = {{"j", s.j},   {"value", jnum(s.value)}, {"n_samples", s.n_samples},
                 {"seed", s.seed}, {"dense", s.dense}};
      if (!s.argmax.empty()) js["argmax"] = s.argmax;
      shells.push_back(js);
    }
    json res = json::array();
    for (double r : e.residuals) res.push_back(jnum(r));
    arr.push_back({{"theta", e.theta},
                   {"s_hat", jnum(e.s_hat)},
                   {"stderr", jnum(e.stderr_)},
                   {"slope", jnum(e.slope)},
                   {"intercept", jnum(e.intercept)},
                   {"window", {e.window_lo, e.window_hi}},
                   {"quality", to_string(e.quality)},
                   {"residuals", res},
                   {"shells", shells}});
  }
  return json({{"estimates", arr}}).dump(2) + "\n";
}

// ---- bounds -------------------------------------------------------------------------

std::string bounds_csv(const BoundsSummary& b) {
  std::ostringstream o;
  o << "k,u,method,value,valid\n";
  const auto& p = b.profile;
  for (std::size_t i = 0; i < p.u.size(); ++i) {
    for (const auto& m : p.methods)
      o << p.k << ',' << num(p.u[i]) << ',' << m.name << ',' << num(m.values[i]) << ',' << (m.valid[i] ? 1 : 0)
        << '\n';
    o << p.k << ',' << num(p.u[i]) << ",envelope," << num(p.envelope[i]) << ",1\n";
    if (i < b.best.size()) o << p.k << ',' << num(p.u[i]) << ",best_spectrum," << num(b.best[i].value) << ",1\n";
  }
  return o.str();
}

std::string bounds_json(const BoundsSummary& b) {
  const auto& p = b.profile;
  json methods = json::object();
  for (const auto& m : p.methods) {
    json vals = json::array(), valid = json::array();
    for (std::size_t i = 0; i < m.values.size(); ++i) {
      vals.push_back(jnum(m.values[i]));
      valid.push_back(static_cast<bool>(m.valid[i]));
    }
    methods[m.name] = {{"values", vals}, {"valid", valid}};
  }
  json best = json::array();
  for (const auto& x : b.best)
    best.push_back({{"value", jnum(x.value)},
                    {"lower", jnum(x.lower)},
                    {"argmin_theta", x.argmin_theta},
                    {"argmin_n", x.argmin_n}});
  json j = {{"d", p.d},
            {"k", p.k},
            {"cap", p.cap},
            {"u", p.u},
            {"methods", methods},
            {"envelope", p.envelope},
            {"best_spectrum", best},
            {"emptiness_threshold",
             {{"value", jnum(b.emptiness.value)},
              {"upper", jnum(b.emptiness.upper)},
              {"argmax_theta", b.emptiness.argmax_theta}}}};
  return j.dump(2) + "\n";
}

// ---- curves -------------------------------------------------------------------------

std::string curves_csv(const std::vector<CurvePoint>& pts) {
  std::ostringstream o;
  o << "k,u,method,value\n";
  for (const auto& p : pts) o << p.k << ',' << num(p.u) << ',' << p.method << ',' << num(p.value) << '\n';
  return o.str();
}

std::string curves_json(const CantorTriple& ex, const std::vector<CurvePoint>& pts) {
  json curves = json::object();
  for (const auto& p : pts) {
    json& c = curves[std::to_string(p.k)][p.method];
    c["u"].push_back(p.u);
    c["value"].push_back(p.value);
  }
  json j = {{"alpha", ex.alpha}, {"beta", ex.beta},   {"gamma", ex.gamma},
            {"dim_H", ex.dim_H}, {"dim_S_conv2", ex.dim_S_conv2},
            {"zero_edge", (ex.dim_S_conv2 - 2) / 2}, {"curves", curves}};
  return j.dump(2) + "\n";
}

// ---- regions ------------------------------------------------------------------------

std::string regions_csv(const std::vector<ImprovementRegion>& regions,
                        const std::vector<std::pair<double, double>>& spectrum) {
  std::ostringstream o;
  o << "record,baseline,theta,u,value,improves\n";
  for (auto [t, v] : spectrum) o << "spectrum,," << num(t) << ",," << num(v) << ",\n";
  for (const auto& r : regions) {
    const std::string b = to_string(r.baseline);
    o << "ceiling," << b << ",,," << num(r.ceiling) << ",\n";
    for (auto [t, v] : r.boundary) o << "boundary," << b << ',' << num(t) << ",," << num(v) << ",\n";
    for (const auto& c : r.cells)
      o << "cell," << b << ',' << num(c.theta) << ',' << num(c.u) << ",," << truth_name(c.improves) << '\n';
  }
  return o.str();
}

std::string regions_json(const std::vector<ImprovementRegion>& regions,
                         const std::vector<std::pair<double, double>>& spectrum) {
  json arr = json::array();
  for (const auto& r : regions) {
    json cells = json::array(), boundary = json::array();
    std::map<std::string, int> tally;
    for (const auto& c : r.cells) {
      cells.push_back({{"theta", c.theta}, {"u", c.u}, {"improves", truth_name(c.improves)}});
      ++tally[truth_name(c.improves)];
    }
    for (auto [t, v] : r.boundary) boundary.push_back({t, v});
    arr.push_back({{"baseline", to_string(r.baseline)},
                   {"ceiling", r.ceiling},
                   {"boundary", boundary},
                   {"counts", tally},
                   {"cells", cells}});
  }
  json sp = json::array();
  for (auto [t, v] : spectrum) sp.push_back({t, v});
  return json({{"spectrum", sp}, {"regions", arr}}).dump(2) + "\n";
}

// ---- lattice sets -----------------------------------------------------------------------

std::string lattice_csv(const LatticeSets& sets) {
  std::ostringstream o;
  o << "set,eta,cell,lo,hi\n";
  const std::int64_t N = sets.params.eta[static_cast<std::size_t>(sets.params.stages) - 1];
  for (const GridSet* g : {&sets.A, &sets.B, &sets.C})
    for (std::int64_t c : g->cells)
      o << g->name << ',' << N << ',' << c << ',' << num(static_cast<double>(c) / static_cast<double>(N)) << ','
        << num(static_cast<double>(c + 1) / static_cast<double>(N)) << '\n';
  return o.str();
}

std::string lattice_json(const LatticeSets& sets, const std::vector<ContainmentReport>& containment) {
  json js = json::array();
  for (const GridSet* g : {&sets.A, &sets.B, &sets.C}) {
    json st = json::array();
    for (const auto& s : g->stages)
      st.push_back({{"m", s.m},
                    {"eta", s.eta},
                    {"count", s.count},
                    {"exact", s.exact},
                    {"certified", s.certified},
                    {"exponent", jnum(s.exponent)},
                    {"constant", jnum(s.constant)}});
    js.push_back({{"name", g->name},
                  {"exponent", rational_str(g->exponent)},
                  {"slope", jnum(g->slope)},
                  {"stages", st},
                  {"cells", g->cells.size()}});
  }
  json cont = json::array();
  for (const auto& c : containment) {
    if (c.checked < 0) {
      cont.push_back({{"m", c.m}, {"refused", c.first_counterexample}});
      continue;
    }
    json x = {{"m", c.m}, {"holds", c.holds}, {"checked", c.checked}, {"counterexamples", c.counterexamples}};
    if (!c.first_counterexample.empty()) x["first_counterexample"] = c.first_counterexample;
    cont.push_back(x);
  }
  json j = {{"s", rational_str(sets.params.s)},
            {"u", rational_str(sets.params.u)},
            {"eta", sets.params.eta},
            {"stages", sets.params.stages},
            {"warnings", sets.warnings},
            {"sets", js},
            {"containment", cont}};
  return j.dump(2) + "\n";
}

// ---- Marstrand --------------------------------------------------------------------

std::string marstrand_csv(const MarstrandSummary& s) {
  std::ostringstream o;
  o << "index,seed,dimension,stderr,target,basis\n";
  for (const auto& r : s.rows) {
    std::string basis;
    for (const auto& v : r.frame.basis())
      for (double x : v) basis += (basis.empty() ? "" : " ") + num(x);
    o << r.index << ',' << r.seed << ',' << num(r.box.dimension) << ',' << num(r.box.stderr_) << ','
      << num(s.target) << ',' << basis << '\n';
  }
  return o.str();
}

std::string marstrand_json(const MarstrandSummary& s) {
  json rows = json::array();
  for (const auto& r : s.rows) {
    json jr = {{"index", r.index},
               {"seed", r.seed},
               {"basis", r.frame.basis()},
               {"dimension", jnum(r.box.dimension)},
               {"stderr", jnum(r.box.stderr_)},
               {"scales", r.box.scales},
               {"counts", r.box.counts}};
    if (!r.box.warning.empty()) jr["warning"] = r.box.warning;
    rows.push_back(jr);
  }
  json j = {{"target", s.target},
            {"tolerance", s.tolerance},
            {"fraction_within", s.fraction_within},
            {"quantiles", {{"min", s.min}, {"q10", s.q10}, {"median", s.median}, {"q90", s.q90}, {"max", s.max}}},
            {"frames", rows}};
  return j.dump(2) + "\n";
}

std::string example_json(const CantorTriple& ex) {
  json j = {{"alpha", ex.alpha},
            {"beta", ex.beta},
            {"gamma", ex.gamma},
            {"dim_H", ex.dim_H},
            {"dim_S_conv2", ex.dim_S_conv2},
            {"spectrum_half", ex.dim_S_conv2 / 2},
            {"profile", json::parse(ex.profile.to_json())},
            {"measure", json::parse(ex.mu.to_json())},
            {"measure_conv2", json::parse(ex.mu_conv2.to_json())}};
  return j.dump(2) + "\n";
}

// ---- SVG ------------------------------------------------------------------------------

namespace {

using Row = std::vector<std::string>;

std::vector<Row> parse_csv(std::string_view text) {
  std::vector<Row> rows;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) {
      Row r;
      std::size_t a = 0;
      while (true) {
        const std::size_t c = line.find(',', a);
        r.emplace_back(line.substr(a, c == std::string_view::npos ? std::string_view::npos : c - a));
        if (c == std::string_view::npos) break;
        a = c + 1;
      }
      rows.push_back(std::move(r));
    }
    pos = nl + 1;
  }
  return rows;
}

double to_double(const std::string& s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) fail(ErrorCode::parse, "CSV field is not a number: '" + s + "'");
  return v;
}

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> pts;
  std::vector<double> err;  // symmetric error bars (optional)
  bool points = false;      // markers instead of a polyline
  std::string color;
};

struct RectShape {
  double x0, x1, y0, y1;
  std::string color;
};

struct Panel {
  std::string title, xlabel, ylabel;
  std::vector<Series> series;
  std::vector<std::vector<std::pair<double, double>>> shaded;
  std::vector<RectShape> rects;
  std::vector<std::pair<double, std::string>> hlines;  // dashed horizontal references
  std::vector<std::string> row_labels;                 // for strip charts (y = row index)
};

const char* palette(std::size_t i) {
  static const std::array<const char*, 8> p = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e",
                                               "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  return p[i % p.size()];
}

std::string color_for(const std::string& name, std::size_t& next) {
  if (name == "fourier_spectrum") return "#d62728";
  if (name == "peres_schlag") return "#1f77b4";
  if (name == "mattila") return "#2ca02c";
  return palette(3 + next++);
}

double nice_step(double range) {
  if (!(range > 0)) return 1;
  const double raw = range / 5;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f < 1.5 ? 1 : f < 3 ? 2 : f < 7 ? 5 : 10) * mag;
}

std::string fmt2(double v) {
  // coordinates rounded to 0.01 px for compact, stable output
  const double r = std::round(v * 100) / 100;
  return num(r == 0 ? 0.0 : r);
}

std::string tick_label(double t, double step) {
  const int decimals = std::max(0, static_cast<int>(-std::floor(std::log10(step) + 1e-9)));
  std::array<char, 64> buf{};
  if (std::abs(t) < 1e-9 * step) t = 0;
  std::snprintf(buf.data(), buf.size(), "%.*f", decimals, t);
  return buf.data();
}

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

std::string render(const std::vector<Panel>& panels) {
  constexpr double W = 480, H = 380, ml = 60, mr = 20, mt = 60, mb = 50;
  std::ostringstream o;
  const double total_w = W * static_cast<double>(panels.size());
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt2(total_w) << "\" height=\"" << fmt2(H)
    << "\" viewBox=\"0 0 " << fmt2(total_w) << ' ' << fmt2(H) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const Panel& P = panels[pi];
    double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
    auto grow = [&](double x, double y) {
      if (std::isfinite(x)) xlo = std::min(xlo, x), xhi = std::max(xhi, x);
      if (std::isfinite(y)) ylo = std::min(ylo, y), yhi = std::max(yhi, y);
    };
    for (const auto& s : P.series)
      for (std::size_t i = 0; i < s.pts.size(); ++i) {
        const double e = i < s.err.size() ? s.err[i] : 0;
        grow(s.pts[i].first, s.pts[i].second - e);
        grow(s.pts[i].first, s.pts[i].second + e);
      }
    for (const auto& poly : P.shaded)
      for (auto [x, y] : poly) grow(x, y);
    for (const auto& r : P.rects) grow(r.x0, r.y0), grow(r.x1, r.y1);
    for (const auto& h : P.hlines) grow(NAN, h.first);
    if (!std::isfinite(xlo)) xlo = 0, xhi = 1;
    if (!std::isfinite(ylo)) ylo = 0, yhi = 1;
    if (xhi - xlo < 1e-12) xlo -= 0.5, xhi += 0.5;
    if (yhi - ylo < 1e-12) ylo -= 0.5, yhi += 0.5;
    const double ypad = 0.05 * (yhi - ylo);
    ylo -= ypad;
    yhi += ypad;
    const double ox = W * static_cast<double>(pi);
    auto X = [&](double x) { return ox + ml + (x - xlo) / (xhi - xlo) * (W - ml - mr); };
    auto Y = [&](double y) { return mt + (yhi - y) / (yhi - ylo) * (H - mt - mb); };

    o << "<g>\n";
    o << "<text x=\"" << fmt2(ox + W / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << esc(P.title)
      << "</text>\n";
    for (const auto& poly : P.shaded) {
      o << "<polygon fill=\"#cccccc\" fill-opacity=\"0.6\" stroke=\"none\" points=\"";
      for (auto [x, y] : poly) o << fmt2(X(x)) << ',' << fmt2(Y(y)) << ' ';
      o << "\"/>\n";
    }
    for (const auto& r : P.rects)
      o << "<rect x=\"" << fmt2(X(r.x0)) << "\" y=\"" << fmt2(Y(r.y1)) << "\" width=\""
        << fmt2(std::max(0.5, X(r.x1) - X(r.x0))) << "\" height=\"" << fmt2(Y(r.y0) - Y(r.y1)) << "\" fill=\""
        << r.color << "\"/>\n";
    // axes and ticks
    o << "<line x1=\"" << fmt2(X(xlo)) << "\" y1=\"" << fmt2(Y(ylo)) << "\" x2=\"" << fmt2(X(xhi)) << "\" y2=\""
      << fmt2(Y(ylo)) << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << fmt2(X(xlo)) << "\" y1=\"" << fmt2(Y(ylo)) << "\" x2=\"" << fmt2(X(xlo)) << "\" y2=\""
      << fmt2(Y(yhi)) << "\" stroke=\"black\"/>\n";
    const double xs = nice_step(xhi - xlo);
    for (double t = std::ceil(xlo / xs - 1e-9) * xs; t <= xhi + 1e-9 * xs; t += xs) {
      o << "<line x1=\"" << fmt2(X(t)) << "\" y1=\"" << fmt2(Y(ylo)) << "\" x2=\"" << fmt2(X(t)) << "\" y2=\""
        << fmt2(Y(ylo) + 4) << "\" stroke=\"black\"/>";
      o << "<text x=\"" << fmt2(X(t)) << "\" y=\"" << fmt2(Y(ylo) + 16) << "\" text-anchor=\"middle\">"
        << tick_label(t, xs) << "</text>\n";
    }
    if (P.row_labels.empty()) {
      const double ys = nice_step(yhi - ylo);
      for (double t = std::ceil(ylo / ys - 1e-9) * ys; t <= yhi + 1e-9 * ys; t += ys) {
        o << "<line x1=\"" << fmt2(X(xlo) - 4) << "\" y1=\"" << fmt2(Y(t)) << "\" x2=\"" << fmt2(X(xlo))
          << "\" y2=\"" << fmt2(Y(t)) << "\" stroke=\"black\"/>";
        o << "<text x=\"" << fmt2(X(xlo) - 6) << "\" y=\"" << fmt2(Y(t) + 4) << "\" text-anchor=\"end\">"
          << tick_label(t, ys) << "</text>\n";
      }
    } else {
      for (std::size_t i = 0; i < P.row_labels.size(); ++i)
        o << "<text x=\"" << fmt2(X(xlo) - 6) << "\" y=\"" << fmt2(Y(static_cast<double>(i) + 0.5) + 4)
          << "\" text-anchor=\"end\">" << esc(P.row_labels[i]) << "</text>\n";
    }
    o << "<text x=\"" << fmt2(ox + ml + (W - ml - mr) / 2) << "\" y=\"" << fmt2(H - 12)
      << "\" text-anchor=\"middle\">" << esc(P.xlabel) << "</text>\n";
    o << "<text x=\"" << fmt2(ox + 14) << "\" y=\"" << fmt2(mt + (H - mt - mb) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 "
      << fmt2(ox + 14) << ' ' << fmt2(mt + (H - mt - mb) / 2) << ")\">" << esc(P.ylabel) << "</text>\n";
    for (const auto& h : P.hlines)
      o << "<line x1=\"" << fmt2(X(xlo)) << "\" y1=\"" << fmt2(Y(h.first)) << "\" x2=\"" << fmt2(X(xhi))
        << "\" y2=\"" << fmt2(Y(h.first)) << "\" stroke=\"#555555\" stroke-dasharray=\"4 3\"/>\n";
    // data
    std::size_t li = 0;
    for (const auto& s : P.series) {
      if (s.points) {
        for (std::size_t i = 0; i < s.pts.size(); ++i) {
          const auto [x, y] = s.pts[i];
          if (!std::isfinite(y)) continue;
          if (i < s.err.size() && s.err[i] > 0)
            o << "<line x1=\"" << fmt2(X(x)) << "\" y1=\"" << fmt2(Y(y - s.err[i])) << "\" x2=\"" << fmt2(X(x))
              << "\" y2=\"" << fmt2(Y(y + s.err[i])) << "\" stroke=\"" << s.color << "\"/>";
          o << "<circle cx=\"" << fmt2(X(x)) << "\" cy=\"" << fmt2(Y(y)) << "\" r=\"3\" fill=\"" << s.color
            << "\"/>\n";
        }
      } else {
        o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
        for (auto [x, y] : s.pts)
          if (std::isfinite(y)) o << fmt2(X(x)) << ',' << fmt2(Y(y)) << ' ';
        o << "\"/>\n";
      }
      if (!s.name.empty()) {
        // legend: two entries per row under the title
        const double lx = ox + ml + 200 * static_cast<double>(li % 2);
        const double ly = 34 + 14 * static_cast<double>(li / 2);
        ++li;
        o << "<line x1=\"" << fmt2(lx) << "\" y1=\"" << fmt2(ly) << "\" x2=\"" << fmt2(lx + 20) << "\" y2=\""
          << fmt2(ly) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/><text x=\"" << fmt2(lx + 25)
          << "\" y=\"" << fmt2(ly + 4) << "\">" << esc(s.name) << "</text>\n";
      }
    }
    o << "</g>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::size_t col(const Row& header, const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) fail(ErrorCode::parse, "CSV lacks column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

const std::string& field(const Row& r, std::size_t i) {
  if (i >= r.size()) fail(ErrorCode::parse, "short CSV row");
  return r[i];
}

// k,u,method,value[,valid]: one panel per k, one curve per method
std::vector<Panel> curve_panels(const std::vector<Row>& rows) {
  const Row& h = rows.front();
  const std::size_t ck = col(h, "k"), cu = col(h, "u"), cm = col(h, "method"), cv = col(h, "value");
  std::map<int, std::vector<std::string>> order;
  std::map<int, std::map<std::string, Series>> data;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const int k = static_cast<int>(to_double(field(rows[i], ck)));
    const std::string& m = field(rows[i], cm);
    auto& ser = data[k];
    if (!ser.count(m)) order[k].push_back(m);
    ser[m].name = m;
    ser[m].pts.emplace_back(to_double(field(rows[i], cu)), to_double(field(rows[i], cv)));
  }
  std::vector<Panel> panels;
  for (auto& [k, ser] : data) {
    Panel p;
    p.title = "k = " + std::to_string(k);
    p.xlabel = "u";
    p.ylabel = "exceptional set dimension bound";
    std::size_t next = 0;
    for (const auto& name : order[k]) {
      Series s = std::move(ser[name]);
      s.color = color_for(name, next);
      p.series.push_back(std::move(s));
    }
    panels.push_back(std::move(p));
  }
  return panels;
}

std::vector<Panel> spectrum_panels(const std::vector<Row>& rows) {
  const Row& h = rows.front();
  const std::size_t ct = col(h, "theta"), cs = col(h, "s_hat"), ce = col(h, "stderr");
  Series s;
  s.name = "estimate";
  s.points = true;
  s.color = palette(0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    s.pts.emplace_back(to_double(field(rows[i], ct)), to_double(field(rows[i], cs)));
    s.err.push_back(to_double(field(rows[i], ce)));
  }
  Panel p;
  p.title = "Fourier spectrum estimate";
  p.xlabel = "theta";
  p.ylabel = "dimension";
  Series line = s;
  line.name.clear();
  line.points = false;
  line.err.clear();
  p.series.push_back(std::move(line));
  p.series.push_back(std::move(s));
  return {p};
}

std::vector<Panel> region_panels(const std::vector<Row>& rows) {
  const Row& h = rows.front();
  const std::size_t cr = col(h, "record"), cb = col(h, "baseline"), ct = col(h, "theta"), cv = col(h, "value");
  Series spectrum;
  spectrum.name = "spectrum";
  spectrum.color = palette(0);
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<double, double>>> boundary;
  std::map<std::string, double> ceiling;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const Row& r = rows[i];
    const std::string& rec = field(r, cr);
    const std::string& b = field(r, cb);
    if (rec == "spectrum") {
      spectrum.pts.emplace_back(to_double(field(r, ct)), to_double(field(r, cv)));
    } else if (rec == "ceiling") {
      if (!ceiling.count(b)) order.push_back(b);
      ceiling[b] = to_double(field(r, cv));
    } else if (rec == "boundary") {
      boundary[b].emplace_back(to_double(field(r, ct)), to_double(field(r, cv)));
    }
  }
  std::vector<Panel> panels;
  for (const auto& b : order) {
    Panel p;
    p.title = "improvement over " + b;
    p.xlabel = "theta";
    p.ylabel = "spectrum value";
    const double top = ceiling[b];
    // shaded: above the boundary, below the ceiling
    std::vector<std::pair<double, double>> poly;
    for (auto [t, v] : boundary[b]) poly.emplace_back(t, std::min(v, top));
    for (auto it = boundary[b].rbegin(); it != boundary[b].rend(); ++it) poly.emplace_back(it->first, top);
    if (!poly.empty()) p.shaded.push_back(poly);
    Series edge;
    edge.name = "region boundary";
    edge.color = "#555555";
    edge.pts = boundary[b];
    p.series.push_back(edge);
    if (!spectrum.pts.empty()) p.series.push_back(spectrum);
    p.hlines.emplace_back(top, "dim_H");
    panels.push_back(std::move(p));
  }
  if (panels.empty()) fail(ErrorCode::parse, "region CSV has no baseline");
  return panels;
}

std::vector<Panel> lattice_panels(const std::vector<Row>& rows) {
  const Row& h = rows.front();
  const std::size_t cs = col(h, "set"), cl = col(h, "lo"), ch = col(h, "hi");
  Panel p;
  p.title = "grid cells of A, B, C";
  p.xlabel = "x";
  p.row_labels = {"A", "B", "C"};
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const std::string& s = field(rows[i], cs);
    const auto it = std::find(p.row_labels.begin(), p.row_labels.end(), s);
    if (it == p.row_labels.end()) fail(ErrorCode::parse, "unknown set '" + s + "'");
    const double y = static_cast<double>(it - p.row_labels.begin());
    p.rects.push_back({to_double(field(rows[i], cl)), to_double(field(rows[i], ch)), y + 0.15, y + 0.85,
                       palette(static_cast<std::size_t>(y))});
  }
  p.rects.push_back({0, 1, 0, 0, "none"});
  p.rects.push_back({0, 1, 3, 3, "none"});
  return {p};
}

std::vector<Panel> marstrand_panels(const std::vector<Row>& rows) {
  const Row& h = rows.front();
  const std::size_t ci = col(h, "index"), cd = col(h, "dimension"), ce = col(h, "stderr"), ct = col(h, "target");
  Series s;
  s.name = "box dimension";
  s.points = true;
  s.color = palette(1);
  double target = NAN;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    s.pts.emplace_back(to_double(field(rows[i], ci)), to_double(field(rows[i], cd)));
    s.err.push_back(to_double(field(rows[i], ce)));
    target = to_double(field(rows[i], ct));
  }
  Panel p;
  p.title = "projected box dimension per frame";
  p.xlabel = "frame";
  p.ylabel = "dimension";
  p.series.push_back(std::move(s));
  if (std::isfinite(target)) p.hlines.emplace_back(target, "target");
  return {p};
}

}  // namespace

std::string svg_from_csv(std::string_view csv) {
  const auto rows = parse_csv(csv);
  if (rows.empty()) fail(ErrorCode::parse, "empty CSV");
  const std::string& first = rows.front().front();
  std::vector<Panel> panels;
  if (first == "k") panels = curve_panels(rows);
  else if (first == "theta") panels = spectrum_panels(rows);
  else if (first == "record") panels = region_panels(rows);
  else if (first == "set") panels = lattice_panels(rows);
  else if (first == "index") panels = marstrand_panels(rows);
  else fail(ErrorCode::parse, "unrecognised CSV header starting with '" + first + "'");
  if (panels.empty()) fail(ErrorCode::parse, "CSV holds no data rows");
  return render(panels);
}

}  // namespace fspec::report
