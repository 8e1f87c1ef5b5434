#pragma once

// Machine-readable run reports: JSON document, curvature CSV table and a
// plain-text summary. Serialization is deterministic for identical inputs.

#include <map>
#include <string>
#include <vector>

#include "qklab/suites.hpp"

namespace qklab::report {

struct Report {
  std::string command;
  std::string model_name;
  int m = 0;
  suites::Options options;
  std::vector<suites::SuiteResult> suites;
  std::vector<suites::CurvatureRow> curvature;
  std::map<std::string, double> timing;  ///< seconds per suite; serialized only on request

  bool all_pass() const;
};

std::string to_json(const Report& r, bool include_timing = false);
std::string curvature_csv(const std::vector<suites::CurvatureRow>& rows);
std::string summary(const Report& r);

}  // namespace qklab::report
