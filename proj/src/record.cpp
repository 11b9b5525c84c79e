#include "lwire/record.hpp"

#include <charconv>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lwire/errors.hpp"

namespace lwire {

using nlohmann::json;

// ADL hooks for nlohmann::json.

void to_json(json& j, const Point& p) { j = json{{"x", p.x}, {"y", p.y}}; }
void from_json(const json& j, Point& p) {
  j.at("x").get_to(p.x);
  j.at("y").get_to(p.y);
}

void to_json(json& j, const GridRung& r) { j = json{{"h", r.h}, {"R", r.R}}; }
void from_json(const json& j, GridRung& r) {
  j.at("h").get_to(r.h);
  j.at("R").get_to(r.R);
}

void to_json(json& j, const SolverStats& s) {
  j = json{{"lanczos_steps", s.lanczos_steps},
           {"cycles", s.cycles},
           {"factorizations", s.factorizations},
           {"shift", s.shift}};
}
void from_json(const json& j, SolverStats& s) {
  j.at("lanczos_steps").get_to(s.lanczos_steps);
  j.at("cycles").get_to(s.cycles);
  j.at("factorizations").get_to(s.factorizations);
  j.at("shift").get_to(s.shift);
}

void to_json(json& j, const GridSummary& g) {
  j = json{{"h", g.h},   {"R", g.R},     {"nx", g.nx},
           {"ny", g.ny}, {"dim", g.dim}, {"origin_offset", g.origin_offset}};
}
void from_json(const json& j, GridSummary& g) {
  j.at("h").get_to(g.h);
  j.at("R").get_to(g.R);
  j.at("nx").get_to(g.nx);
  j.at("ny").get_to(g.ny);
  j.at("dim").get_to(g.dim);
  j.at("origin_offset").get_to(g.origin_offset);
}

void to_json(json& j, const SpectralResult& s) {
  j = json{{"mu", s.mu},
           {"margin", s.margin},
           {"lambda1", s.lambda1},
           {"eigenvalues", s.eigenvalues},
           {"residuals", s.residuals},
           {"eigenvalues_below", s.eigenvalues_below},
           {"count_below_mu_margin", s.count_below_mu_margin},
           {"stats", s.stats},
           {"grid", s.grid},
           {"seed", s.seed}};
}
void from_json(const json& j, SpectralResult& s) {
  j.at("mu").get_to(s.mu);
  j.at("margin").get_to(s.margin);
  j.at("lambda1").get_to(s.lambda1);
  j.at("eigenvalues").get_to(s.eigenvalues);
  j.at("residuals").get_to(s.residuals);
  j.at("eigenvalues_below").get_to(s.eigenvalues_below);
  j.at("count_below_mu_margin").get_to(s.count_below_mu_margin);
  j.at("stats").get_to(s.stats);
  j.at("grid").get_to(s.grid);
  j.at("seed").get_to(s.seed);
}

void to_json(json& j, const TrialFunction& t) {
  j = json{{"family", trial_family(t)}};
  if (const auto* a = std::get_if<Theorem4Trial>(&t)) {
    j["a"] = a->a;
    j["b"] = a->b;
  } else if (const auto* p = std::get_if<WedgeProductTrial>(&t)) {
    j["L_len"] = p->L_len;
    j["j"] = p->j;
  }
}
void from_json(const json& j, TrialFunction& t) {
  const std::string f = j.at("family").get<std::string>();
  if (f == "logarithmic") {
    t = Theorem4Trial{j.at("a").get<double>(), j.at("b").get<double>()};
  } else if (f == "product") {
    t = WedgeProductTrial{j.at("L_len").get<double>(), j.at("j").get<int>()};
  } else if (f == "zero") {
    t = ZeroTrial{};
  } else {
    throw ConfigError("unknown trial family '" + f + "'");
  }
}

void to_json(json& j, const FormBreakdown& f) {
  j = json{{"kinetic", f.kinetic},
           {"potential", f.potential},
           {"line_term", f.line_term},
           {"norm_sq", f.norm_sq},
           {"total", f.total},
           {"parts", f.parts},
           {"refinement_change", f.refinement_change},
           {"error_estimate", f.error_estimate}};
}
void from_json(const json& j, FormBreakdown& f) {
  j.at("kinetic").get_to(f.kinetic);
  j.at("potential").get_to(f.potential);
  j.at("line_term").get_to(f.line_term);
  j.at("norm_sq").get_to(f.norm_sq);
  j.at("total").get_to(f.total);
  j.at("parts").get_to(f.parts);
  j.at("refinement_change").get_to(f.refinement_change);
  j.at("error_estimate").get_to(f.error_estimate);
}

void to_json(json& j, const Certificate& c) {
  j = json{{"family", c.family}, {"trial", c.trial}, {"form", c.form}, {"threshold", c.threshold}};
}
void from_json(const json& j, Certificate& c) {
  j.at("family").get_to(c.family);
  j.at("trial").get_to(c.trial);
  j.at("form").get_to(c.form);
  j.at("threshold").get_to(c.threshold);
}

// The config is embedded as its own text form so that the snapshot and a
// config file on disk share one grammar.
void to_json(json& j, const ExperimentConfig& c) {
  std::ostringstream os;
  write_config(c, os);
  j = os.str();
}
void from_json(const json& j, ExperimentConfig& c) {
  std::istringstream is(j.get<std::string>());
  c = parse_config(is);
}

std::string write_record(const ResultRecord& r) {
  json j{{"code_version", r.code_version},
         {"status", r.ok ? "ok" : "failed"},
         {"error", r.error},
         {"config", r.config},
         {"rungs", r.rungs},
         {"verdict", to_string(r.verdict.kind)},
         {"certificate_status", r.certificate_status},
         {"timings", r.timings}};
  j["lambda1"] = r.verdict.lambda1 ? json(*r.verdict.lambda1) : json(nullptr);
  j["certificate"] = r.certificate ? json(*r.certificate) : json(nullptr);
  return j.dump(2) + "\n";
}

ResultRecord read_record(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed record: ") + e.what());
  }
  try {
    ResultRecord r;
    j.at("code_version").get_to(r.code_version);
    const std::string status = j.at("status").get<std::string>();
    if (status != "ok" && status != "failed") throw ConfigError("record status must be ok or failed");
    r.ok = status == "ok";
    j.at("error").get_to(r.error);
    j.at("config").get_to(r.config);
    j.at("rungs").get_to(r.rungs);
    r.verdict.kind = verdict_from_string(j.at("verdict").get<std::string>());
    if (!j.at("lambda1").is_null()) r.verdict.lambda1 = j.at("lambda1").get<double>();
    j.at("certificate_status").get_to(r.certificate_status);
    if (!j.at("certificate").is_null()) r.certificate = j.at("certificate").get<Certificate>();
    j.at("timings").get_to(r.timings);
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed record: ") + e.what());
  }
}

bool verdict_consistent(const ResultRecord& r) {
  if (r.rungs.empty()) return r.verdict.kind == VerdictKind::Inconclusive;
  return decide_verdict(r.rungs, r.config.tol_R) == r.verdict;
}

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_header() {
  return "schema_version,alpha,v0,beta,fillet_r,orientation,h,R,delta_mode,mu,lambda1,count,verdict,"
         "cert,seed";
}

std::vector<std::string> csv_rows(const ResultRecord& r) {
  std::vector<std::string> rows;
  const ExperimentConfig& c = r.config;
  const std::string prefix = std::to_string(kCsvSchemaVersion) + ',' + format_real(c.params.alpha) + ',' +
                             format_real(c.params.v0) + ',' + format_real(c.curve.beta) + ',' +
                             format_real(c.curve.fillet_radius) + ',' + to_string(c.orientation) + ',';
  const std::string verdict = r.ok ? to_string(r.verdict.kind) : "failed";
  for (const SpectralResult& s : r.rungs) {
    rows.push_back(prefix + format_real(s.grid.h) + ',' + format_real(s.grid.R) + ',' +
                   to_string(c.delta.kind) + ',' + format_real(s.mu) + ',' + format_real(s.lambda1) + ',' +
                   std::to_string(s.count_below_mu_margin) + ',' + verdict + ',' + r.certificate_status +
                   ',' + std::to_string(s.seed));
  }
  return rows;
}

}  // namespace lwire
