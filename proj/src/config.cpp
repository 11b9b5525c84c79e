#include "lwire/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "lwire/errors.hpp"

namespace lwire {

namespace pt = boost::property_tree;

const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::Beta: return "beta";
    case SweepAxis::V0: return "v0";
    case SweepAxis::Alpha: return "alpha";
  }
  return "?";
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "beta") return SweepAxis::Beta;
  if (s == "v0") return SweepAxis::V0;
  if (s == "alpha") return SweepAxis::Alpha;
  throw ConfigError("unknown sweep axis '" + s + "' (expected beta, v0 or alpha)");
}

std::vector<GridRung> ExperimentConfig::effective_ladder() const {
  if (!ladder.empty()) return ladder;
  const double s = 1.0 / params.alpha;
  return {{0.1 * s, 12.0 * s}, {0.05 * s, 12.0 * s}, {0.05 * s, 24.0 * s}};
}

ScanOptions ExperimentConfig::scan_options() const {
  ScanOptions o;
  o.margin = margin;
  o.delta = delta;
  o.origin_offset = origin_offset;
  o.seed = seed;
  o.tol_resid = tol_resid;
  o.tol_R = tol_R;
  return o;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) {
    throw ConfigError(key + ": expected a real number, got '" + raw + "'");
  }
  return v;
}

long long parse_integer(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError(key + ": expected an integer, got '" + raw + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

const std::map<std::string, std::set<std::string>>& grammar() {
  static const std::map<std::string, std::set<std::string>> g{
      {"physics", {"alpha", "v0"}},
      {"curve", {"kind", "beta", "fillet_radius"}},
      {"operator", {"orientation", "delta_mode", "width_factor", "origin_x", "origin_y"}},
      {"ladder", {"rungs"}},
      {"solver", {"margin", "tol_R", "tol_resid", "seed"}},
      {"output", {"path"}},
      {"sweep", {"axis", "values"}},
      {"certify", {"family", "L_len", "modes"}},
  };
  return g;
}

}  // namespace

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const std::string& item : split(text, ',')) out.push_back(parse_real(item, "list"));
  return out;
}

std::vector<GridRung> parse_ladder(const std::string& text) {
  std::vector<GridRung> out;
  if (trim(text).empty()) return out;
  for (const std::string& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) throw ConfigError("ladder rung '" + item + "' is not of the form h:R");
    out.push_back({parse_real(parts[0], "ladder h"), parse_real(parts[1], "ladder R")});
  }
  return out;
}

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }

  for (const auto& [section, body] : tree) {
    const auto it = grammar().find(section);
    if (it == grammar().end() || body.empty()) {
      throw ConfigError("unknown section or key outside a section: '" + section + "'");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key '" + section + "." + key + "'");
      (void)value;
    }
  }

  auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return trim(*v);
    return std::nullopt;
  };

  ExperimentConfig c;
  if (auto v = get("physics.alpha")) c.params.alpha = parse_real(*v, "physics.alpha");
  if (auto v = get("physics.v0")) c.params.v0 = parse_real(*v, "physics.v0");

  if (auto v = get("curve.kind")) {
    try {
      c.curve.kind = curve_kind_from_string(*v);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  if (auto v = get("curve.beta")) c.curve.beta = parse_real(*v, "curve.beta");
  if (auto v = get("curve.fillet_radius")) c.curve.fillet_radius = parse_real(*v, "curve.fillet_radius");

  if (auto v = get("operator.orientation")) c.orientation = orientation_from_string(*v);
  if (auto v = get("operator.delta_mode")) c.delta.kind = delta_kind_from_string(*v);
  if (auto v = get("operator.width_factor")) c.delta.width_factor = parse_real(*v, "operator.width_factor");
  if (auto v = get("operator.origin_x")) c.origin_offset.x = parse_real(*v, "operator.origin_x");
  if (auto v = get("operator.origin_y")) c.origin_offset.y = parse_real(*v, "operator.origin_y");

  if (auto v = get("ladder.rungs")) c.ladder = parse_ladder(*v);

  if (auto v = get("solver.margin")) c.margin = parse_real(*v, "solver.margin");
  if (auto v = get("solver.tol_R")) c.tol_R = parse_real(*v, "solver.tol_R");
  if (auto v = get("solver.tol_resid")) c.tol_resid = parse_real(*v, "solver.tol_resid");
  if (auto v = get("solver.seed")) {
    const long long s = parse_integer(*v, "solver.seed");
    if (s < 0) throw ConfigError("solver.seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }

  if (auto v = get("output.path")) c.output = *v;

  if (auto v = get("sweep.axis")) c.sweep_axis = sweep_axis_from_string(*v);
  if (auto v = get("sweep.values")) c.sweep_values = parse_real_list(*v);

  if (auto v = get("certify.family")) c.certify_family = *v;
  if (auto v = get("certify.L_len")) c.product_length = parse_real(*v, "certify.L_len");
  if (auto v = get("certify.modes")) c.product_modes = static_cast<int>(parse_integer(*v, "certify.modes"));

  // Up-front precondition checks.
  try {
    if (!(c.params.alpha >= 0.0)) throw InvalidArgument("alpha must be >= 0");
    if (!(c.params.v0 >= 0.0)) throw InvalidArgument("v0 must be >= 0");
    c.curve.validate();
    c.delta.validate();
    for (const GridRung& r : c.ladder) {
      if (!(r.h > 0.0) || !(r.R > 0.0)) throw InvalidArgument("ladder rungs need h > 0 and R > 0");
    }
    if (c.margin && !(*c.margin > 0.0)) throw InvalidArgument("margin must be positive");
    if (c.tol_R && !(*c.tol_R > 0.0)) throw InvalidArgument("tol_R must be positive");
    if (!(c.tol_resid > 0.0 && c.tol_resid <= 1e-4)) throw InvalidArgument("tol_resid must lie in (0, 1e-4]");
    if (c.product_modes < 1) throw InvalidArgument("certify.modes must be >= 1");
    if (!(c.product_length > 0.0)) throw InvalidArgument("certify.L_len must be positive");
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in);
}

void write_config(const ExperimentConfig& c, std::ostream& out) {
  out << std::setprecision(17);
  out << "[physics]\nalpha = " << c.params.alpha << "\nv0 = " << c.params.v0 << "\n\n";
  out << "[curve]\nkind = " << to_string(c.curve.kind) << "\nbeta = " << c.curve.beta
      << "\nfillet_radius = " << c.curve.fillet_radius << "\n\n";
  out << "[operator]\norientation = " << to_string(c.orientation)
      << "\ndelta_mode = " << to_string(c.delta.kind) << "\nwidth_factor = " << c.delta.width_factor
      << "\norigin_x = " << c.origin_offset.x << "\norigin_y = " << c.origin_offset.y << "\n\n";
  if (!c.ladder.empty()) {
    out << "[ladder]\nrungs = ";
    for (std::size_t i = 0; i < c.ladder.size(); ++i) {
      out << (i ? ", " : "") << c.ladder[i].h << ':' << c.ladder[i].R;
    }
    out << "\n\n";
  }
  out << "[solver]\n";
  if (c.margin) out << "margin = " << *c.margin << '\n';
  if (c.tol_R) out << "tol_R = " << *c.tol_R << '\n';
  out << "tol_resid = " << c.tol_resid << "\nseed = " << c.seed << "\n\n";
  if (!c.output.empty()) out << "[output]\npath = " << c.output << "\n\n";
  if (c.sweep_axis || !c.sweep_values.empty()) {
    out << "[sweep]\n";
    if (c.sweep_axis) out << "axis = " << to_string(*c.sweep_axis) << '\n';
    out << "values = ";
    for (std::size_t i = 0; i < c.sweep_values.size(); ++i) out << (i ? ", " : "") << c.sweep_values[i];
    out << "\n\n";
  }
  out << "[certify]\nfamily = " << c.certify_family << "\nL_len = " << c.product_length
      << "\nmodes = " << c.product_modes << '\n';
}

}  // namespace lwire
