#pragma once

// Experiment configuration: `[section]` headers and `key = value` lines.
// The grammar is documented in docs/config.md.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lwire/assembly.hpp"
#include "lwire/eigensolve.hpp"
#include "lwire/geometry.hpp"
#include "lwire/transverse.hpp"

namespace lwire {

enum class SweepAxis { Beta, V0, Alpha };

const char* to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(const std::string& s);

struct ExperimentConfig {
  PhysicsParams params{1.0, 1.0};
  CurveSpec curve = CurveSpec::wedge(0.7853981633974483);
  BiasOrientation orientation = BiasOrientation::InteriorBias;
  std::vector<GridRung> ladder;  // empty means the default ladder
  DeltaMode delta;
  Point origin_offset;
  std::optional<double> margin;
  std::optional<double> tol_R;
  double tol_resid = 1e-6;
  std::uint64_t seed = 20240601;
  std::string output;

  // [sweep]
  std::optional<SweepAxis> sweep_axis;
  std::vector<double> sweep_values;

  // [certify]
  std::string certify_family = "auto";
  double product_length = 10.0;
  int product_modes = 2;

  /// The configured ladder, or (0.1, 12), (0.05, 12), (0.05, 24) scaled by
  /// 1/alpha.
  std::vector<GridRung> effective_ladder() const;

  ScanOptions scan_options() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Throws ConfigError on unknown sections or keys, malformed numbers, and
/// values that violate a module precondition.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Writes a config that parse_config reads back to an equal value.
void write_config(const ExperimentConfig& cfg, std::ostream& out);

/// Comma-separated reals, e.g. "0.6, 0.3, 0.15".
std::vector<double> parse_real_list(const std::string& text);
/// Comma-separated h:R pairs, e.g. "0.1:12, 0.05:12, 0.05:24".
std::vector<GridRung> parse_ladder(const std::string& text);

}  // namespace lwire
