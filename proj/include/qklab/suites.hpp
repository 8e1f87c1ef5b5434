#pragma once

// Invariant suites over seeded random points. Every suite returns named
// checks (value vs. tolerance) plus the chart of the worst offending point.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qklab/model.hpp"
#include "qklab/parallel.hpp"
#include "qklab/twistqk.hpp"

namespace qklab::suites {

enum class Status { Pass, Fail, Skip };
std::string to_string(Status s);

struct Check {
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  bool upper = true;  ///< pass iff value < tol, else value > tol
  bool informational = false;
  int count = 0;
  std::vector<double> worst_point;
  std::string note;

  bool pass() const { return informational || (upper ? value < tol : value > tol); }
};

struct SuiteResult {
  std::string name;
  Status status = Status::Skip;
  std::vector<Check> checks;
  std::map<std::string, double> metrics;
  std::string diagnostic;

  /// Pass unless a check fails; Fail with a diagnostic on evaluation errors.
  void finalize();
  const Check* find(const std::string& check) const;
};

/// Default tolerances by name; --tol-<name> overrides one entry.
const std::map<std::string, double>& default_tolerances();

/// Sample counts by name; --samples name=count overrides one entry.
const std::map<std::string, int>& default_samples();

struct Options {
  std::uint64_t seed = 1;
  twistqk::Mode mode = twistqk::Mode::Circle;
  std::vector<double> c_values{0.0};
  std::map<std::string, double> tolerances = default_tolerances();
  std::map<std::string, int> samples = default_samples();
  parallel::Exec exec = parallel::Exec::Parallel;

  double tol(const std::string& name) const;
  int count(const std::string& name) const;
};

SuiteResult cask_suite(const CubicModel& model, const Options& opts);
SuiteResult cmap_suite(const CubicModel& model, const Options& opts);
SuiteResult moment_suite(const CubicModel& model, const Options& opts);
SuiteResult twist_suite(const CubicModel& model, const Options& opts);
SuiteResult group_suite(const CubicModel& model, const Options& opts);
SuiteResult killing_suite(const CubicModel& model, const Options& opts);
SuiteResult isometry_suite(const CubicModel& model, const Options& opts);

struct CurvatureRow {
  double c = 0.0;
  int point = 0;
  std::vector<double> chart;
  double scal = 0.0;
  double kretschmann = 0.0;
  double einstein = 0.0;  ///< |Ric - scal g / dim| / |g|, Frobenius
};

struct CurvatureResult {
  SuiteResult suite;
  std::vector<CurvatureRow> rows;
};

/// Same chart points for every c (sampled valid for the largest c).
CurvatureResult curvature_suite(const CubicModel& model, const Options& opts);

/// Names of the suites run by `check`, in order.
const std::vector<std::string>& check_suite_names();

/// Runs one `check` suite by name; evaluation errors become a failed suite
/// with a diagnostic, configuration errors propagate.
SuiteResult run_check_suite(const std::string& name, const CubicModel& model, const Options& opts);

}  // namespace qklab::suites
