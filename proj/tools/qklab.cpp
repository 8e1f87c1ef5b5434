// qklab command-line front end.
//
//   qklab describe  --model E1
//   qklab check     --model models/e2.json --c 0.3
//   qklab curvature --model E1 --c 0,0.3,1 --out curv.json
//   qklab isometry  --model E1 --c 0.3 --mode cover
//
// Exit codes: 0 all suites pass, 1 some suite fails, 2 configuration error.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qklab/report.hpp"
#include "qklab/special_geometry.hpp"
#include "qklab/suites.hpp"

namespace {

using namespace qklab;

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr const char* kThreadsEnv = "QKLAB_THREADS";

struct Cli {
  std::string model = "E1";
  std::vector<double> c{0.0};
  std::string mode = "circle";
  std::uint64_t seed = 1;
  std::vector<std::string> samples;
  std::map<std::string, double> tol = suites::default_tolerances();
  std::string out;
  std::string csv;
  std::vector<std::string> only;
  bool serial = false;
  bool timing = false;
};

CubicModel resolve_model(const std::string& arg) {
  if (std::filesystem::exists(arg)) return load_model(arg);
  if (arg == "E1" || arg == "E2") return builtin_model(arg);
  throw Error(ErrorKind::Config, "cannot read model file " + arg);
}

suites::Options make_options(const Cli& cli) {
  suites::Options o;
  o.seed = cli.seed;
  if (cli.mode == "circle")
    o.mode = twistqk::Mode::Circle;
  else if (cli.mode == "cover")
    o.mode = twistqk::Mode::Cover;
  else
    throw Error(ErrorKind::Config, "mode must be circle or cover");
  if (cli.c.empty()) throw Error(ErrorKind::Config, "at least one c value");
  for (double c : cli.c)
    if (!(c >= 0.0)) throw Error(ErrorKind::Config, "c must be >= 0");
  o.c_values = cli.c;
  o.tolerances = cli.tol;
  for (const auto& s : cli.samples) {
    const auto eq = s.find('=');
    const std::string key = eq == std::string::npos ? "points" : s.substr(0, eq);
    const std::string val = eq == std::string::npos ? s : s.substr(eq + 1);
    if (!o.samples.count(key)) throw Error(ErrorKind::Config, "unknown sample count '" + key + "'");
    int n = 0;
    try {
      n = std::stoi(val);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Config, "sample count '" + s + "' is not an integer");
    }
    if (n < 1) throw Error(ErrorKind::Config, "sample counts must be >= 1");
    o.samples[key] = n;
  }
  o.exec = cli.serial ? parallel::Exec::Serial : parallel::Exec::Parallel;
  return o;
}

void add_common(CLI::App* sub, Cli& cli) {
  sub->add_option("--model", cli.model, "model JSON file, or builtin E1 / E2")->required();
  sub->add_option("--c", cli.c, "one-loop parameter(s), comma separated")->delimiter(',');
  sub->add_option("--mode", cli.mode, "circle or cover")->check(CLI::IsMember({"circle", "cover"}));
  sub->add_option("--seed", cli.seed, "random seed");
  sub->add_option("--samples", cli.samples, "sample counts: N or name=N (points, triples, elements, ...)");
  for (auto& [name, value] : cli.tol)
    sub->add_option("--tol-" + name, value, "tolerance override")->check(CLI::PositiveNumber);
  sub->add_option("--out", cli.out, "JSON report path");
  sub->add_flag("--serial", cli.serial, "evaluate points serially");
  sub->add_flag("--timing", cli.timing, "include wall-clock timing in the JSON report");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Config, "cannot write " + path);
  f << text;
}

template <class Fn>
suites::SuiteResult timed(report::Report& rep, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  suites::SuiteResult r = fn();
  rep.timing[r.name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

int finish(const Cli& cli, report::Report& rep) {
  std::cout << report::summary(rep);
  if (!cli.out.empty()) write_file(cli.out, report::to_json(rep, cli.timing));
  return rep.all_pass() ? 0 : kExitFail;
}

void run_check_suite_guard(const std::string& name) {
  const auto& names = suites::check_suite_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) throw Error(ErrorKind::Config, "unknown suite '" + name + "'");
}

int cmd_describe(const Cli& cli) {
  const CubicModel model = resolve_model(cli.model);
  const int n = model.n();
  std::cout << "model " << model.name << "\n";
  std::cout << "m=" << model.m << ", n=" << n << ", dim N̄=" << 4 * n << "\n";
  std::cout << "h(t) =";
  for (const auto& t : model.terms)
    std::cout << " + (" << t.k * t.multiplicity / 6.0 << ") t" << t.a + 1 << " t" << t.b + 1 << " t" << t.c + 1;
  std::cout << "\n";
  std::cout << "kappa = " << sg::measure_kappa(model) << "  (omega = kappa dx^i ^ dy_i)\n";
  std::cout << "signs: Im tau signature (n-1,1), f = Im tau_ij X^i conj X^j < 0, f_Z = -f - c/2, f_H = f - c/2\n";
  std::cout << "validity domain: " << (model.domain_id == "positive_orthant" ? "t^a > 0 for all a" : "h(t) > 0")
            << ", one-loop domain f_Z > 0\n";
  std::cout << "Aut(H) generators: " << model.aut_generators.size() << ", aut(H) basis: " << model.aut_algebra.size() << "\n";
  return 0;
}

int cmd_check(const Cli& cli) {
  const CubicModel model = resolve_model(cli.model);
  const suites::Options opts = make_options(cli);
  report::Report rep{"check", model.name, model.m, opts, {}, {}, {}};
  for (const auto& o : cli.only) run_check_suite_guard(o);
  for (const auto& name : suites::check_suite_names()) {
    if (!cli.only.empty() && std::find(cli.only.begin(), cli.only.end(), name) == cli.only.end()) continue;
    rep.suites.push_back(timed(rep, [&] { return suites::run_check_suite(name, model, opts); }));
  }
  return finish(cli, rep);
}

int cmd_curvature(const Cli& cli) {
  const CubicModel model = resolve_model(cli.model);
  const suites::Options opts = make_options(cli);
  report::Report rep{"curvature", model.name, model.m, opts, {}, {}, {}};
  suites::CurvatureResult cr;
  rep.suites.push_back(timed(rep, [&] {
    cr = suites::curvature_suite(model, opts);
    return cr.suite;
  }));
  rep.curvature = cr.rows;
  std::string csv = cli.csv;
  if (csv.empty() && !cli.out.empty()) csv = std::filesystem::path(cli.out).replace_extension(".csv").string();
  if (!csv.empty()) write_file(csv, report::curvature_csv(cr.rows));
  else std::cout << report::curvature_csv(cr.rows);
  return finish(cli, rep);
}

int cmd_isometry(const Cli& cli) {
  const CubicModel model = resolve_model(cli.model);
  const suites::Options opts = make_options(cli);
  report::Report rep{"isometry", model.name, model.m, opts, {}, {}, {}};
  rep.suites.push_back(timed(rep, [&] { return suites::isometry_suite(model, opts); }));
  return finish(cli, rep);
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv(kThreadsEnv)) {
    try {
      parallel::set_threads(std::stoi(env));
    } catch (const std::exception&) {
      std::cerr << "error: " << kThreadsEnv << " must be an integer\n";
      return kExitConfig;
    }
  }

  CLI::App app{"qklab: one-loop deformed q-map metrics from cubic PSR models"};
  app.require_subcommand(1);
  Cli cli;
  auto* describe = app.add_subcommand("describe", "print model dimensions, conventions and the validity domain");
  describe->add_option("--model", cli.model, "model JSON file, or builtin E1 / E2")->required();
  auto* check = app.add_subcommand("check", "run the invariant suites");
  add_common(check, cli);
  check->add_option("--only", cli.only, "run only these suites (cask, rigid_cmap, moment_map, twist, group, killing)")
      ->delimiter(',');
  auto* curvature = app.add_subcommand("curvature", "scalar curvature, Kretschmann scalar and Einstein residual");
  add_common(curvature, cli);
  curvature->add_option("--csv", cli.csv, "CSV table path (default: --out with .csv extension, else stdout)");
  auto* isometry = app.add_subcommand("isometry", "isometry and effectiveness campaign");
  add_common(isometry, cli);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*describe) return cmd_describe(cli);
    if (*check) return cmd_check(cli);
    if (*curvature) return cmd_curvature(cli);
    if (*isometry) return cmd_isometry(cli);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
