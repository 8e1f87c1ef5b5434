#include "qklab/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace qklab::report {

using nlohmann::ordered_json;

namespace {

// JSON has no infinities; non-finite values are written as strings.
ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

ordered_json check_json(const suites::Check& c) {
  ordered_json j;
  j["name"] = c.name;
  j["status"] = c.informational ? "INFO" : (c.pass() ? "PASS" : "FAIL");
  j["value"] = number(c.value);
  j["tolerance"] = number(c.tol);
  j["comparison"] = c.upper ? "<" : ">";
  j["count"] = c.count;
  if (!c.pass() || c.informational) j["worst_point"] = c.worst_point;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

}  // namespace

bool Report::all_pass() const {
  for (const auto& s : suites)
    if (s.status == suites::Status::Fail) return false;
  return true;
}

std::string to_json(const Report& r, bool include_timing) {
  ordered_json j;
  j["command"] = r.command;
  j["status"] = r.all_pass() ? "PASS" : "FAIL";
  j["model"] = {{"name", r.model_name}, {"m", r.m}, {"n", r.m + 1}, {"dim_Nbar", 4 * (r.m + 1)}};
  ordered_json cfg;
  cfg["seed"] = r.options.seed;
  cfg["mode"] = r.options.mode == twistqk::Mode::Circle ? "circle" : "cover";
  cfg["c"] = r.options.c_values;
  cfg["samples"] = r.options.samples;
  ordered_json tols;
  for (const auto& [k, v] : r.options.tolerances) tols[k] = number(v);
  cfg["tolerances"] = tols;
  j["config"] = cfg;
  j["suites"] = ordered_json::array();
  for (const auto& s : r.suites) {
    ordered_json sj;
    sj["name"] = s.name;
    sj["status"] = suites::to_string(s.status);
    if (!s.diagnostic.empty()) sj["diagnostic"] = s.diagnostic;
    sj["checks"] = ordered_json::array();
    for (const auto& c : s.checks) sj["checks"].push_back(check_json(c));
    ordered_json m = ordered_json::object();
    for (const auto& [k, v] : s.metrics) m[k] = number(v);
    sj["metrics"] = m;
    j["suites"].push_back(sj);
  }
  if (!r.curvature.empty()) {
    j["curvature"] = ordered_json::array();
    for (const auto& row : r.curvature)
      j["curvature"].push_back({{"c", row.c},
                                {"point", row.point},
                                {"chart", row.chart},
                                {"scal", number(row.scal)},
                                {"kretschmann", number(row.kretschmann)},
                                {"einstein_residual", number(row.einstein)}});
  }
  if (include_timing) {
    ordered_json t = ordered_json::object();
    for (const auto& [k, v] : r.timing) t[k] = v;
    j["timing_seconds"] = t;
  }
  return j.dump(2) + "\n";
}

std::string curvature_csv(const std::vector<suites::CurvatureRow>& rows) {
  std::ostringstream os;
  os << "c,point,scal,kretschmann,einstein_residual\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g,%.17g\n", r.c, r.point, r.scal, r.kretschmann, r.einstein);
    os << buf;
  }
  return os.str();
}

std::string summary(const Report& r) {
  std::ostringstream os;
  os << r.command << " " << r.model_name << ": " << (r.all_pass() ? "PASS" : "FAIL") << "\n";
  for (const auto& s : r.suites) {
    os << "  [" << suites::to_string(s.status) << "] " << s.name;
    auto t = r.timing.find(s.name);
    if (t != r.timing.end()) os << " (" << fmt(t->second) << " s)";
    os << "\n";
    if (!s.diagnostic.empty()) os << "      " << s.diagnostic << "\n";
    for (const auto& c : s.checks) {
      const char* tag = c.informational ? "info" : (c.pass() ? "ok  " : "FAIL");
      os << "      " << tag << " " << c.name << " = " << fmt(c.value) << (c.upper ? " < " : " > ") << fmt(c.tol) << "  (n="
         << c.count << ")";
      if (!c.note.empty()) os << "  " << c.note;
      os << "\n";
      if (!c.pass() && !c.worst_point.empty()) {
        os << "           worst point:";
        for (double x : c.worst_point) os << " " << fmt(x);
        os << "\n";
      }
    }
    for (const auto& [k, v] : s.metrics) os << "      " << k << " = " << fmt(v) << "\n";
  }
  return os.str();
}

}  // namespace qklab::report
