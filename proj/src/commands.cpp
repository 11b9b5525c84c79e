#include "lwire/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "lwire/errors.hpp"
#include "lwire/transverse.hpp"
#include "lwire/variational.hpp"

namespace lwire {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ExperimentConfig load_with_overrides(const std::string& path, const CommonOptions& opts) {
  ExperimentConfig cfg = load_config(path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.out) cfg.output = *opts.out;
  return cfg;
}

std::string certificate_label(const std::optional<Certificate>& c) {
  return c ? "FOUND" : "NOT-FOUND";
}

void print_form(const FormBreakdown& f, std::ostream& out) {
  out << "  kinetic        " << f.kinetic << '\n'
      << "  potential      " << f.potential << '\n'
      << "  line term      " << f.line_term << '\n'
      << "  norm^2         " << f.norm_sq << '\n'
      << "  total          " << f.total << "  (+/- " << f.error_estimate << ")\n";
  for (const auto& [name, value] : f.parts) out << "  " << std::left << std::setw(20) << name << value << '\n';
  out << std::right;
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_transverse(double alpha, double v0, std::ostream& out, std::ostream& err) {
  const PhysicsParams p{alpha, v0};
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  out << std::setprecision(10);
  const Regime regime = classify_regime(p);
  const TransverseSpectrum ts = transverse_bound_state(p);
  out << "alpha      " << alpha << "\nv0         " << v0 << "\nregime     " << to_string(regime)
      << "\nmu         " << essential_threshold(p) << '\n';
  if (ts.bound_energy) {
    out << "bound      " << *ts.bound_energy << "\nkappa-     " << *ts.kappa_minus << "\nkappa+     "
        << *ts.kappa_plus << '\n';
  } else {
    out << "bound      none\n";
  }

  const double width = ts.bound_energy ? transverse_truncation_width(p) : 40.0 / alpha;
  const double ladder[] = {0.02, 0.01, 0.005};
  const TransverseExtrapolation fd = extrapolate_transverse_fd(p, width, ladder);
  out << "fd check   half-width " << width << '\n';
  for (std::size_t i = 0; i < fd.h.size(); ++i) out << "  h=" << fd.h[i] << "  lambda=" << fd.raw[i] << '\n';
  out << "  richardson " << fd.extrapolated << '\n';
  if (ts.bound_energy) {
    out << "  rel.err    " << std::abs(fd.extrapolated - *ts.bound_energy) / std::abs(*ts.bound_energy)
        << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------

ResultRecord run_solve(const ExperimentConfig& cfg, Exec exec) {
  ResultRecord rec;
  rec.config = cfg;
  const auto t_start = Clock::now();
  const std::vector<GridRung> ladder = cfg.effective_ladder();
  check_ladder(ladder);

  ScanOptions so = cfg.scan_options();
  so.exec = exec;
  const auto t_scan = Clock::now();
  try {
    for (const GridRung& r : ladder) rec.rungs.push_back(scan_rung(cfg.params, cfg.curve, cfg.orientation, r, so));
    rec.verdict = decide_verdict(rec.rungs, cfg.tol_R);
  } catch (const InvalidArgument&) {
    throw;
  } catch (const Error& e) {
    rec.ok = false;
    rec.error = e.what();
    rec.verdict = {};
  }
  rec.timings["scan"] = seconds_since(t_scan);

  if (rec.ok && essential_threshold(cfg.params) == 0.0) {
    const auto t_cert = Clock::now();
    try {
      if (cfg.curve.kind == CurveKind::Wedge) {
        rec.certificate = theorem4_certificate(cfg.params, cfg.curve, cfg.orientation);
      } else {
        rec.certificate = theorem6_certificate(cfg.params, cfg.curve, cfg.orientation);
      }
      rec.certificate_status = certificate_label(rec.certificate);
    } catch (const ResolutionError&) {
      rec.certificate_status = "unresolved";
    }
    rec.timings["certificate"] = seconds_since(t_cert);
  }
  rec.timings["total"] = seconds_since(t_start);
  return rec;
}

int cmd_solve(const std::string& config_path, const CommonOptions& opts, std::ostream& out,
              std::ostream& err) {
  ExperimentConfig cfg;
  ResultRecord rec;
  try {
    cfg = load_with_overrides(config_path, opts);
    rec = run_solve(cfg);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidRegime& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  const std::filesystem::path record_path = cfg.output.empty() ? "result.json" : cfg.output;
  std::filesystem::path csv_path = record_path;
  csv_path.replace_extension(".csv");
  {
    std::ofstream f(record_path);
    if (!f) {
      err << "error: cannot write " << record_path << '\n';
      return 1;
    }
    f << write_record(rec);
  }
  {
    const bool fresh = !std::filesystem::exists(csv_path) || std::filesystem::file_size(csv_path) == 0;
    std::ofstream f(csv_path, std::ios::app);
    if (!f) {
      err << "error: cannot write " << csv_path << '\n';
      return 1;
    }
    if (fresh) f << csv_header() << '\n';
    for (const std::string& row : csv_rows(rec)) f << row << '\n';
  }

  out << std::setprecision(10);
  for (const SpectralResult& s : rec.rungs) {
    out << "h=" << s.grid.h << " R=" << s.grid.R << " dim=" << s.grid.dim << " lambda1=" << s.lambda1
        << " count=" << s.count_below_mu_margin << '\n';
  }
  if (!rec.ok) {
    err << "error: " << rec.error << " (partial record written to " << record_path.string() << ")\n";
    return 1;
  }
  out << "mu=" << rec.rungs.front().mu << " margin=" << rec.rungs.front().margin << '\n'
      << "verdict " << to_string(rec.verdict.kind) << '\n'
      << "certificate " << rec.certificate_status << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

ExperimentConfig with_axis_value(ExperimentConfig cfg, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::Beta: cfg.curve.beta = value; break;
    case SweepAxis::V0: cfg.params.v0 = value; break;
    case SweepAxis::Alpha: cfg.params.alpha = value; break;
  }
  return cfg;
}

int cmd_sweep(const std::string& config_path, std::optional<std::string> axis_text,
              std::optional<std::string> values_text, const CommonOptions& opts, std::ostream& out,
              std::ostream& err) {
  ExperimentConfig cfg;
  SweepAxis axis{};
  std::vector<double> values;
  try {
    cfg = load_with_overrides(config_path, opts);
    if (axis_text) cfg.sweep_axis = sweep_axis_from_string(*axis_text);
    if (values_text) cfg.sweep_values = parse_real_list(*values_text);
    if (!cfg.sweep_axis) throw ConfigError("sweep needs an axis (beta, v0 or alpha)");
    if (cfg.sweep_values.empty()) throw ConfigError("sweep needs a non-empty values list");
    axis = *cfg.sweep_axis;
    values = cfg.sweep_values;
    // Up-front precondition checks for every point.
    for (double v : values) {
      const ExperimentConfig c = with_axis_value(cfg, axis, v);
      c.params.validate();
      c.curve.validate();
      check_ladder(c.effective_ladder());
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(values.size())));
  const Exec exec = jobs > 1 ? Exec::Serial : Exec::Parallel;
  std::vector<std::string> rows(values.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> any_failed{false};

  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      ResultRecord rec;
      try {
        rec = run_solve(with_axis_value(cfg, axis, values[i]), exec);
      } catch (const Error& e) {
        rec.config = with_axis_value(cfg, axis, values[i]);
        rec.ok = false;
        rec.error = e.what();
      }
      std::ostringstream row;
      row << format_real(values[i]) << ',';
      if (rec.rungs.empty()) {
        row << ",,,,failed,n/a,";
      } else {
        const SpectralResult& s = rec.rungs.back();
        row << format_real(s.mu) << ',' << format_real(s.lambda1) << ',' << s.count_below_mu_margin << ','
            << format_real(s.margin) << ',' << (rec.ok ? to_string(rec.verdict.kind) : "failed") << ','
            << rec.certificate_status << ',';
      }
      std::string msg = rec.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      row << msg;
      if (!rec.ok) any_failed = true;
      rows[i] = row.str();
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ofstream file;
  if (!cfg.output.empty()) {
    file.open(cfg.output);
    if (!file) {
      err << "error: cannot write " << cfg.output << '\n';
      return 1;
    }
  }
  std::ostream& sink = cfg.output.empty() ? out : file;
  sink << to_string(axis) << ",mu,lambda1,count,margin,verdict,cert,error\n";
  for (const std::string& r : rows) sink << r << '\n';
  if (any_failed) err << "warning: some sweep points failed; see the error column\n";
  return 0;
}

// ---------------------------------------------------------------------------

namespace {

// Lowest eigenvalue of the bare Dirichlet box (alpha = 0, v0 = 0).
double bare_box_lambda1(const GridRung& rung, Exec exec) {
  const Grid2D grid(rung.R, rung.h);
  const DiscreteOperator op =
      assemble_hamiltonian({0.0, 0.0}, CurveSpec::wedge(0.7853981633974483), BiasOrientation::InteriorBias,
                           grid, DeltaMode::lumping(), exec);
  EigenOptions eo;
  eo.exec = exec;
  return lowest_eigenvalues(op, 1, 1e-8, eo).values.front();
}

}  // namespace

ConvergenceReport run_converge(const ExperimentConfig& cfg, Exec exec) {
  const std::vector<GridRung>& ladder = cfg.ladder;
  std::map<double, std::set<double, std::greater<>>> h_by_R;  // R -> h descending
  std::map<double, std::set<double>, std::greater<>> R_by_h;  // h ascending -> R
  for (const GridRung& r : ladder) {
    h_by_R[r.R].insert(r.h);
    R_by_h[r.h].insert(r.R);
  }
  ConvergenceReport rep;
  for (const auto& [R, hs] : h_by_R) {
    if (hs.size() >= 3 && hs.size() >= rep.h.size()) {
      rep.R_fixed = R;
      rep.h.assign(hs.begin(), hs.end());
    }
  }
  if (rep.h.empty()) throw InvalidArgument("convergence study needs >= 3 distinct h at one R");
  double h_for_R = 0.0;
  for (const auto& [h, Rs] : R_by_h) {
    if (Rs.size() >= 2) {
      h_for_R = h;
      rep.R.assign(Rs.begin(), Rs.end());
    }
  }
  if (rep.R.empty()) throw InvalidArgument("convergence study needs >= 2 distinct R at one h");

  const bool bare = cfg.params.alpha == 0.0 && cfg.params.v0 == 0.0;
  ScanOptions so = cfg.scan_options();
  so.exec = exec;
  std::map<std::pair<double, double>, double> cache;
  auto lambda1 = [&](double h, double R) {
    const auto key = std::make_pair(h, R);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    const double v = bare ? bare_box_lambda1({h, R}, exec)
                          : scan_rung(cfg.params, cfg.curve, cfg.orientation, {h, R}, so).lambda1;
    cache[key] = v;
    return v;
  };

  for (double h : rep.h) rep.lambda1_h.push_back(lambda1(h, rep.R_fixed));
  for (double R : rep.R) rep.lambda1_R.push_back(lambda1(h_for_R, R));

  const std::size_t n = rep.h.size();
  const double h2 = rep.h[n - 2], h3 = rep.h[n - 1];
  const double l1 = rep.lambda1_h[n - 3], l2 = rep.lambda1_h[n - 2], l3 = rep.lambda1_h[n - 1];
  if (bare) {
    const double k = 3.141592653589793 / (2.0 * rep.R_fixed);
    rep.target = 2.0 * k * k;
    rep.observed_order = std::log(std::abs(l2 - *rep.target) / std::abs(l3 - *rep.target)) / std::log(h2 / h3);
  } else {
    rep.observed_order = std::log(std::abs(l1 - l2) / std::abs(l2 - l3)) / std::log(h2 / h3);
  }
  const bool usable = std::isfinite(rep.observed_order) && rep.observed_order > 0.0;
  rep.extrapolated = usable ? l3 + (l3 - l2) / (std::pow(h2 / h3, rep.observed_order) - 1.0) : l3;
  rep.inconclusive = !usable || rep.observed_order < 0.7;
  rep.R_gap = std::abs(rep.lambda1_R[rep.R.size() - 1] - rep.lambda1_R[rep.R.size() - 2]);
  return rep;
}

int cmd_converge(const std::string& config_path, const CommonOptions& opts, std::ostream& out,
                 std::ostream& err) {
  ConvergenceReport rep;
  try {
    const ExperimentConfig cfg = load_with_overrides(config_path, opts);
    rep = run_converge(cfg);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  out << std::setprecision(10);
  out << "h study at R=" << rep.R_fixed << '\n';
  for (std::size_t i = 0; i < rep.h.size(); ++i) {
    out << "  h=" << rep.h[i] << "  lambda1=" << rep.lambda1_h[i];
    if (rep.target) out << "  error=" << rep.lambda1_h[i] - *rep.target;
    out << '\n';
  }
  if (rep.target) out << "analytic   " << *rep.target << '\n';
  out << "order      " << rep.observed_order << '\n'
      << "richardson " << rep.extrapolated << '\n'
      << "R study\n";
  for (std::size_t i = 0; i < rep.R.size(); ++i) out << "  R=" << rep.R[i] << "  lambda1=" << rep.lambda1_R[i] << '\n';
  out << "R gap      " << rep.R_gap << '\n'
      << "status     " << (rep.inconclusive ? "Inconclusive" : "converged") << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_certify(const std::string& config_path, std::optional<std::string> family,
                const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const ExperimentConfig cfg = load_with_overrides(config_path, opts);
    std::string fam = family.value_or(cfg.certify_family);
    cfg.params.validate();
    const bool critical = essential_threshold(cfg.params) == 0.0;
    if (fam == "auto") {
      if (critical) {
        fam = cfg.curve.kind == CurveKind::Wedge ? "theorem4" : "theorem6";
      } else {
        fam = cfg.orientation == BiasOrientation::ExteriorBias ? "prop1" : "prop2";
      }
    }
    out << std::setprecision(10);
    if (fam == "theorem4" || fam == "theorem6") {
      const auto cert = fam == "theorem4" ? theorem4_certificate(cfg.params, cfg.curve, cfg.orientation)
                                          : theorem6_certificate(cfg.params, cfg.curve, cfg.orientation);
      out << fam << ' ' << certificate_label(cert) << '\n';
      if (cert) {
        const auto& t = std::get<Theorem4Trial>(cert->trial);
        out << "  trial          " << trial_family(cert->trial) << " a=" << t.a << " b=" << t.b << '\n';
        print_form(cert->form, out);
      }
      return 0;
    }
    if (fam == "prop1") {
      const GridRung rung = cfg.effective_ladder().front();
      const Prop1Result r = prop1_certificate(cfg.params, cfg.curve, rung, cfg.delta, cfg.seed);
      out << "prop1 " << (r.certified ? "FOUND" : "NOT-FOUND") << '\n'
          << "  lambda0        " << r.lambda0 << '\n'
          << "  quotient       " << r.quotient << '\n'
          << "  mu             " << r.mu << '\n'
          << "  Vc lower bound " << r.vc_lower_bound << '\n';
      return 0;
    }
    if (fam == "prop2") {
      if (cfg.curve.kind != CurveKind::Wedge) throw InvalidArgument("prop2 needs a wedge");
      const double mu = essential_threshold(cfg.params);
      for (int j = 1; j <= cfg.product_modes; ++j) {
        const Prop2Condition c =
            prop2_condition(cfg.params.alpha, cfg.params.v0, cfg.curve.beta, cfg.product_length, j);
        out << "  condition j=" << j << "  lhs=" << c.lhs << "  " << (c.holds ? "holds" : "fails") << '\n';
      }
      const std::vector<double> ritz = product_trial_ritz(cfg.params, cfg.curve.beta, cfg.product_length,
                                                          cfg.product_modes, cfg.orientation);
      long below = 0;
      out << "  ritz          ";
      for (double v : ritz) {
        out << ' ' << v;
        if (v < mu) ++below;
      }
      out << "\n  mu             " << mu << "\n  certified count " << below << '\n';
      out << "prop2 " << (below > 0 ? "FOUND" : "NOT-FOUND") << '\n';
      return 0;
    }
    throw ConfigError("unknown certificate family '" + fam + "'");
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidRegime& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const GeometryError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace lwire
