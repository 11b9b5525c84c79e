#pragma once

// Persisted results: a JSON document per solve and a fixed CSV row schema.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lwire/config.hpp"
#include "lwire/eigensolve.hpp"
#include "lwire/variational.hpp"

namespace lwire {

inline constexpr int kCsvSchemaVersion = 1;
inline constexpr const char* kCodeVersion = "lwire-1.0.0";

struct ResultRecord {
  ExperimentConfig config;
  std::vector<SpectralResult> rungs;
  Verdict verdict;
  std::optional<Certificate> certificate;
  /// "n/a" when no certificate search applies, else FOUND or NOT-FOUND.
  std::string certificate_status = "n/a";
  std::map<std::string, double> timings;  // wall-clock seconds per stage
  std::string code_version = kCodeVersion;
  bool ok = true;
  std::string error;  // set when ok is false; the record is then partial

  friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

/// Pretty-printed JSON.  read_record(write_record(r)) == r.
std::string write_record(const ResultRecord& r);
ResultRecord read_record(const std::string& text);

/// True when the stored verdict is what decide_verdict gives for the stored
/// rungs (with the configured tol_R).
bool verdict_consistent(const ResultRecord& r);

std::string csv_header();
/// One row per rung, all sharing the record's verdict and certificate flag.
std::vector<std::string> csv_rows(const ResultRecord& r);

/// Shortest decimal that reads back to the same double.
std::string format_real(double v);

}  // namespace lwire
