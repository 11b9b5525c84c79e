#pragma once

// Subcommands of the lwire CLI.  Each returns the process exit code:
// 0 success, 1 solver or assembly failure (partial output flagged),
// 2 invalid input.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "lwire/config.hpp"
#include "lwire/record.hpp"

namespace lwire {

struct CommonOptions {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

int cmd_transverse(double alpha, double v0, std::ostream& out, std::ostream& err);

/// Writes the JSON record to the output path (default result.json) and
/// appends CSV rows to the same path with extension .csv.
int cmd_solve(const std::string& config_path, const CommonOptions& opts, std::ostream& out,
              std::ostream& err);

/// axis and values override the config's [sweep] section when given.  The
/// CSV table goes to the output path when set, else to `out`.
int cmd_sweep(const std::string& config_path, std::optional<std::string> axis,
              std::optional<std::string> values, const CommonOptions& opts, std::ostream& out,
              std::ostream& err);

int cmd_converge(const std::string& config_path, const CommonOptions& opts, std::ostream& out,
                 std::ostream& err);

/// family: auto, theorem4, theorem6, prop1, prop2 (overrides [certify]).
int cmd_certify(const std::string& config_path, std::optional<std::string> family,
                const CommonOptions& opts, std::ostream& out, std::ostream& err);

/// Library-level pieces shared by the commands and the tests.

/// Scan plus, at critical or supercritical bias, the matching logarithmic
/// certificate search.  Never throws for solver failures: the record comes
/// back with ok = false and the error text.
ResultRecord run_solve(const ExperimentConfig& cfg, Exec exec = Exec::Parallel);

/// Sets the swept parameter of cfg.
ExperimentConfig with_axis_value(ExperimentConfig cfg, SweepAxis axis, double value);

struct ConvergenceReport {
  double R_fixed = 0.0;
  std::vector<double> h;           // descending, at R_fixed
  std::vector<double> lambda1_h;   // lambda1 at each h
  std::optional<double> target;    // analytic value when available
  double observed_order = 0.0;
  double extrapolated = 0.0;
  std::vector<double> R;           // ascending, at the finest h
  std::vector<double> lambda1_R;
  double R_gap = 0.0;              // |lambda1(R_max) - lambda1(R_prev)|
  bool inconclusive = false;       // order below 0.7
};

/// Needs >= 3 distinct h at one R and >= 2 distinct R at one h in
/// cfg.ladder; throws InvalidArgument otherwise.
ConvergenceReport run_converge(const ExperimentConfig& cfg, Exec exec = Exec::Parallel);

}  // namespace lwire
