#include "qklab/suites.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "qklab/cmap.hpp"
#include "qklab/sampling.hpp"
#include "qklab/symmetry.hpp"

namespace qklab::suites {

namespace tl = qklab::tensorlab;
namespace tw = qklab::twistqk;
namespace sy = qklab::symmetry;
using parallel::map_indices;

std::string to_string(Status s) {
  switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    case Status::Skip: return "SKIP";
  }
  return "SKIP";
}

void SuiteResult::finalize() {
  if (!diagnostic.empty()) {
    status = Status::Fail;
    return;
  }
  if (checks.empty()) {
    status = Status::Skip;
    return;
  }
  status = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); }) ? Status::Pass
                                                                                               : Status::Fail;
}

const Check* SuiteResult::find(const std::string& check) const {
  for (const Check& c : checks)
    if (c.name == check) return &c;
  return nullptr;
}

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> tols{
      {"cask", 1e-9},         {"spot", 1e-12},        {"cmap", 1e-8},          {"omega-h", 1e-9},
      {"i-h", 1e-10},         {"rotating", 1e-8},     {"moment", 1e-9},        {"homogeneity", 1e-12},
      {"obstruction", 1e-12}, {"group", 1e-12},       {"homomorphism", 1e-11}, {"isometry", 1e-8},
      {"effective", 1e-9},    {"sensitivity", 1e-4},  {"killing", 1e-7},       {"bracket", 1e-7},
      {"einstein", 1e-6},     {"scal", 1e-6},         {"kretschmann", 1e-6},   {"twist", 1e-8},
      {"kernel", 1e-9},
  };
  return tols;
}

const std::map<std::string, int>& default_samples() {
  static const std::map<std::string, int> counts{
      {"points", 20},   {"triples", 1000},         {"elements", 50},    {"isometry-points", 20},
      {"pairs", 10},    {"killing-points", 2},     {"curvature-points", 10},
  };
  return counts;
}

double Options::tol(const std::string& name) const {
  auto it = tolerances.find(name);
  if (it == tolerances.end()) throw Error(ErrorKind::Config, "unknown tolerance '" + name + "'");
  return it->second;
}

int Options::count(const std::string& name) const {
  auto it = samples.find(name);
  if (it == samples.end()) throw Error(ErrorKind::Config, "unknown sample count '" + name + "'");
  return it->second;
}

namespace {

// Independent stream per suite, so suites can run in any selection.
sampling::Rng suite_rng(const Options& opts, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32), tag};
  return sampling::Rng(seq);
}

double max_c(const Options& opts) { return *std::max_element(opts.c_values.begin(), opts.c_values.end()); }

double rel_spread(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  return (*hi - *lo) / std::abs(mean);
}

double tensor_diff(const tl::TensorSample& a, const std::vector<double>& b, double sign = 1.0) {
  double r = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) r = std::max(r, std::abs(a.components[k] - sign * b[k]));
  return r;
}

/// Per-point residual vectors reduced by max, keeping the worst chart.
struct PointTable {
  std::vector<std::string> names;
  std::vector<std::string> tols;

  template <class Eval>
  void run(SuiteResult& out, const std::vector<std::vector<double>>& points, Eval&& eval, const Options& opts) const {
    struct Row {
      std::vector<double> res;
      std::string error;
    };
    const auto rows = map_indices(
        points.size(),
        [&](std::size_t i) {
          Row row;
          try {
            row.res = eval(points[i], i);
          } catch (const Error& e) {
            row.error = e.what();
          }
          return row;
        },
        opts.exec);
    std::vector<Check> checks(names.size());
    int errors = 0;
    std::vector<double> error_point;
    std::string first_error;
    for (std::size_t k = 0; k < names.size(); ++k) {
      checks[k].name = names[k];
      checks[k].tol = opts.tol(tols[k]);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!rows[i].error.empty()) {
        if (errors++ == 0) {
          error_point = points[i];
          first_error = rows[i].error;
        }
        continue;
      }
      for (std::size_t k = 0; k < names.size(); ++k) {
        Check& c = checks[k];
        ++c.count;
        const double v = rows[i].res[k];
        if (c.worst_point.empty() || v > c.value || std::isnan(v)) {
          c.value = std::isnan(v) ? INFINITY : v;
          c.worst_point = points[i];
        }
      }
    }
    for (auto& c : checks) out.checks.push_back(std::move(c));
    Check ec;
    ec.name = "evaluation_errors";
    ec.value = errors;
    ec.tol = 1.0;
    ec.count = static_cast<int>(points.size());
    ec.worst_point = error_point;
    ec.note = first_error;
    out.checks.push_back(std::move(ec));
  }
};

Check scalar_check(std::string name, double value, double tol, int count, bool upper = true) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.tol = tol;
  c.count = count;
  c.upper = upper;
  return c;
}

template <class Sampler>
std::vector<std::vector<double>> draw(int count, sampling::Rng& rng, Sampler&& s) {
  std::vector<std::vector<double>> out;
  for (int i = 0; i < count; ++i) out.push_back(s(rng));
  return out;
}

// N-chart fields built from the affine-frame HK state.
template <class Fn>
auto n_field(const CubicModel& model, tl::Valence val, Fn fn) {
  return tl::make_field(cmap::kChartFrame, val, 4 * model.n(), [&model, fn](const auto& x) {
    using V = std::decay_t<decltype(x[0])>;
    return fn(cmap::hk_state<V>(model, std::span<const V>(x)));
  });
}
auto gN_field(const CubicModel& model) {
  return n_field(model, tl::kCovariant2, [](const auto& st) { return cmap::form2_to_chart(st, st.gN); });
}
auto omega_field(const CubicModel& model, int a) {
  return n_field(model, tl::kCovariant2, [a](const auto& st) { return cmap::form2_to_chart(st, st.omega(a)); });
}
auto Z_field(const CubicModel& model) {
  return n_field(model, tl::kVector, [](const auto& st) { return cmap::vector_to_chart(st, st.Z); });
}
auto lift_field(const CubicModel& model, const Matrix<double>& C) {
  return n_field(model, tl::kVector, [C](const auto& st) { return cmap::vector_to_chart(st, cmap::canonical_lift_of(st, C)); });
}
auto fiber_vec_field(const CubicModel& model, const std::vector<double>& v) {
  return n_field(model, tl::kVector, [v](const auto& st) { return cmap::vector_to_chart(st, cmap::fiber_field_of(st, v)); });
}

Matrix<double> omega_H_chart(const CubicModel& model, const std::vector<double>& x) {
  const auto st = cmap::hk_state<double>(model, std::span<const double>(x));
  return transpose(st.Jc) * cmap::omega_H_block<double>(model.n()) * st.Jc;
}

std::vector<Matrix<double>> generator_matrices(const CubicModel& model) {
  std::vector<Matrix<double>> out;
  for (const auto& g : model.affine_generators()) out.push_back(sg::generator_matrix(model, g));
  return out;
}

std::vector<double> unit(int d, int i) {
  std::vector<double> e(static_cast<std::size_t>(d), 0.0);
  e[static_cast<std::size_t>(i)] = 1.0;
  return e;
}

double heis_diff(const sy::HeisElement& a, const sy::HeisElement& b, tw::Mode mode) {
  double dt = std::abs(a.tau - b.tau);
  if (mode == tw::Mode::Circle) dt = std::min(dt, 2.0 * sg::kPi - dt);
  double r = dt;
  for (std::size_t k = 0; k < a.alpha.size(); ++k) r = std::max(r, std::abs(a.alpha[k] - b.alpha[k]));
  return r;
}

/// Relative distance of two group elements, tau compared on the circle in circle mode.
double element_diff(const sy::GroupElement& a, const sy::GroupElement& b) {
  const double scale = std::max({1.0, max_abs(a.aff.S), max_abs(b.aff.S)});
  double r = std::abs(a.aff.lambda - b.aff.lambda);
  r = std::max(r, max_abs_diff(a.aff.A, b.aff.A));
  r = std::max(r, max_abs_diff(a.aff.L, b.aff.L));
  r = std::max(r, max_abs_diff(a.aff.S, b.aff.S));
  for (std::size_t k = 0; k < a.aff.v.size(); ++k) r = std::max(r, std::abs(a.aff.v[k] - b.aff.v[k]));
  return std::max(r / scale, heis_diff(a.heis, b.heis, a.mode) / (scale * scale));
}

double ppoint_diff(const tw::PPoint& a, const tw::PPoint& b, tw::Mode mode) {
  const auto x = a.chart(), y = b.chart();
  double r = 0.0;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) r = std::max(r, std::abs(x[k] - y[k]) / std::max(1.0, std::abs(y[k])));
  double ds = std::abs(a.s - b.s);
  if (mode == tw::Mode::Circle) ds = std::min(ds, 2.0 * sg::kPi - ds);
  return std::max(r, ds / std::max(1.0, std::abs(b.s)));
}

}  // namespace

SuiteResult cask_suite(const CubicModel& model, const Options& opts) {
  SuiteResult out;
  out.name = "cask";
  auto rng = suite_rng(opts, 1);
  const auto points = draw(opts.count("points"), rng, [&](sampling::Rng& r) { return sampling::cask_chart(model, r); });
  const int d = 2 * model.n();
  auto g = tl::make_field("cask-chart", tl::kCovariant2, d, [&model](const auto& u) {
    using V = std::decay_t<decltype(u[0])>;
    return sg::chart_metric<V>(model, u);
  });
  auto xi = tl::make_field("cask-chart", tl::kVector, d, [&model](const auto& u) {
    using V = std::decay_t<decltype(u[0])>;
    return sg::chart_xi<V>(model, u);
  });
  auto jxi = tl::make_field("cask-chart", tl::kVector, d, [&model](const auto& u) {
    using V = std::decay_t<decltype(u[0])>;
    return sg::chart_Jxi<V>(model, u);
  });
  PointTable table{{"tau_signature_and_negativity", "lie_xi_g_minus_2g", "lie_Jxi_g", "df_plus_omega_Jxi"},
                   {"cask", "cask", "cask", "cask"}};
  table.run(
      out, points,
      [&](const std::vector<double>& u, std::size_t) {
        const auto pt = sg::make_cask_point(model, u);
        const auto info = sg::tau_and_validity(model, pt.X);
        const auto gu = tl::evaluate(g, u);
        const double scale = std::max(1.0, gu.max_abs());
        const auto Lxi = tl::lie_derivative(xi, g, u);
        double r_xi = 0.0;
        for (std::size_t k = 0; k < gu.components.size(); ++k)
          r_xi = std::max(r_xi, std::abs(Lxi.components[k] - 2.0 * gu.components[k]));
        const double r_jxi = tl::lie_derivative(jxi, g, u).max_abs();
        const auto fjet = tl::derive_scalar(
            [&model](const auto& v) {
              using V = std::decay_t<decltype(v[0])>;
              return sg::cask_state<V>(model, v).f;
            },
            u);
        const auto om = tl::TensorSample::from_vector("cask-chart", tl::kCovariant2, sg::chart_omega<double>(model, u));
        const auto contraction = tl::interior(tl::evaluate(jxi, u), om);
        double r_df = 0.0;
        for (int k = 0; k < d; ++k) r_df = std::max(r_df, std::abs(fjet.gradient[static_cast<std::size_t>(k)] + contraction(k)));
        return std::vector<double>{info.valid() ? 0.0 : 1.0, r_xi / scale, r_jxi / scale, r_df};
      },
      opts);
  // Spot points X = (1, i t0) with h(t0) = 1: Im tau = diag(2, -k_abc t0^c).
  if (!model.h_samples.empty()) {
    double worst = 0.0;
    std::vector<double> where;
    for (const auto& t0 : model.h_samples) {
      std::vector<std::complex<double>> X{1.0};
      for (double t : t0) X.emplace_back(0.0, t);
      const auto info = sg::tau_and_validity(model, X);
      const int n = model.n();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double want = 0.0;
          if (i == 0 && j == 0) want = 2.0;
          if (i > 0 && j > 0)
            for (int c = 0; c < model.m; ++c) want -= model.k(i - 1, j - 1, c) * t0[static_cast<std::size_t>(c)];
          const double r = std::abs(info.tau(i, j).imag() - want);
          if (r > worst || where.empty()) {
            worst = std::max(worst, r);
            where = t0;
          }
        }
      if (!info.valid()) worst = INFINITY;
    }
    Check c = scalar_check("spot_im_tau", worst, opts.tol("spot"), static_cast<int>(model.h_samples.size()));
    c.worst_point = where;
    out.checks.push_back(std::move(c));
  }
  out.metrics["kappa"] = sg::measure_kappa(model);
  out.finalize();
  return out;
}

SuiteResult cmap_suite(const CubicModel& model, const Options& opts) {
  SuiteResult out;
  out.name = "rigid_cmap";
  auto rng = suite_rng(opts, 2);
  const auto points = draw(opts.count("points"), rng, [&](sampling::Rng& r) { return sampling::n_chart(model, r); });
  const int n = model.n();
  const auto g = gN_field(model);
  const auto w1 = omega_field(model, 1), w2 = omega_field(model, 2), w3 = omega_field(model, 3);
  const auto Z = Z_field(model);
  PointTable table{{"quaternion_relations", "d_omega", "omega_H_two_ways", "I_H_almost_kaehler", "rotating_Z"},
                   {"cmap", "cmap", "omega-h", "i-h", "rotating"}};
  table.run(
      out, points,
      [&](const std::vector<double>& x, std::size_t) {
        const auto pt = cmap::make_npoint(model, x);
        const auto hk = cmap::hk_sample(model, pt);
        double dw = 0.0;
        for (const auto* w : {&w1, &w2, &w3}) dw = std::max(dw, tl::exterior_derivative(*w, x).max_abs());
        const double wH = max_abs_diff(cmap::omega_H_derived(model, pt), cmap::omega_H_block<double>(n));
        const Matrix<double> I = cmap::I_H(model, pt).matrix();
        const double s = std::max(1.0, max_abs(hk.gN));
        double ih = max_abs(I * I + Matrix<double>::identity(4 * n));
        for (const Matrix<double>* Ia : {&hk.I1, &hk.I2, &hk.I3}) ih = std::max(ih, max_abs_diff(I * *Ia, *Ia * I));
        ih = std::max(ih, max_abs(hk.gN * I + transpose(I) * hk.gN) / s);
        ih = std::max(ih, max_abs_diff(hk.gN * I, transpose(cmap::omega_H_block<double>(n))) / s);
        const double sg_ = std::max(1.0, tl::evaluate(g, x).max_abs());
        double rot = tl::lie_derivative(Z, g, x).max_abs();
        rot = std::max(rot, tl::lie_derivative(Z, w1, x).max_abs());
        rot = std::max(rot, tensor_diff(tl::lie_derivative(Z, w2, x), tl::evaluate(w3, x).components));
        rot = std::max(rot, tensor_diff(tl::lie_derivative(Z, w3, x), tl::evaluate(w2, x).components, -1.0));
        return std::vector<double>{hk.invariant_residual(), dw, wH, ih, rot / sg_};
      },
      opts);
  out.finalize();
  return out;
}

SuiteResult moment_suite(const CubicModel& model, const Options& opts) {
  SuiteResult out;
  out.name = "moment_map";
  auto rng = suite_rng(opts, 3);
  const int n = model.n();
  const int count = opts.count("points");
  std::vector<std::vector<double>> points, fibers_v, fibers_w;
  for (int i = 0; i < count; ++i) {
    points.push_back(sampling::n_chart(model, rng));
    fibers_v.push_back(sampling::fiber(n, rng));
    fibers_w.push_back(sampling::fiber(n, rng));
  }
  const auto Cs = generator_matrices(model);
  const Matrix<double> OmInv = cmap::flat_omega_inv<double>(n);
  PointTable table{{"hamiltonian_lifts", "hamiltonian_fiber", "homogeneity", "equivariance_lifts", "fiber_obstruction"},
                   {"moment", "moment", "homogeneity", "moment", "obstruction"}};
  table.run(
      out, points,
      [&](const std::vector<double>& x, std::size_t i) {
        const auto pt = cmap::make_npoint(model, x);
        const auto wH = tl::TensorSample::from_matrix(cmap::kChartFrame, tl::kCovariant2, omega_H_chart(model, x));
        auto x2 = x;
        x2[0] *= 2.0;
        for (std::size_t k = static_cast<std::size_t>(2 * n); k < x.size(); ++k) x2[k] *= 2.0;
        const auto pt2 = cmap::make_npoint(model, x2);

        double ham = 0.0, hom = 0.0, eq = 0.0;
        for (const auto& C : Cs) {
          const auto dmu = tl::derive_scalar(
              [&model, &C](const auto& v) {
                using V = std::decay_t<decltype(v[0])>;
                return cmap::moment_lift_of(cmap::hk_state<V>(model, std::span<const V>(v)), C);
              },
              x);
          const auto iy = tl::interior(tl::evaluate(lift_field(model, C), x), wH);
          for (std::size_t k = 0; k < x.size(); ++k) ham = std::max(ham, std::abs(iy(static_cast<int>(k)) + dmu.gradient[k]));
          const double mu1 = cmap::moment_lift(C, model, pt);
          hom = std::max(hom, std::abs(cmap::moment_lift(C, model, pt2) - 4.0 * mu1) / std::max(1.0, std::abs(mu1)));
        }
        for (std::size_t a = 0; a < Cs.size(); ++a)
          for (std::size_t b = a + 1; b < Cs.size(); ++b) {
            const Matrix<double> K = Cs[b] * Cs[a] - Cs[a] * Cs[b];
            const auto br = tl::bracket(lift_field(model, Cs[a]), lift_field(model, Cs[b]), x);
            const auto want = tl::evaluate(lift_field(model, K), x);
            eq = std::max(eq, tensor_diff(br, want.components) / std::max(1.0, want.max_abs()));
            const auto Y1 = cmap::canonical_lift(Cs[a], model, pt), Y2 = cmap::canonical_lift(Cs[b], model, pt);
            const double w = bilinear(Y1, cmap::omega_H_block<double>(n), Y2);
            eq = std::max(eq, std::abs(w - cmap::moment_lift(K, model, pt)) / std::max(1.0, std::abs(w)));
          }

        const auto& v = fibers_v[i];
        const auto& w = fibers_w[i];
        const auto dmv = tl::derive_scalar(
            [&model, &v](const auto& u) {
              using T = std::decay_t<decltype(u[0])>;
              return cmap::moment_fiber_of(cmap::hk_state<T>(model, std::span<const T>(u)), v);
            },
            x);
        const auto iv = tl::interior(tl::evaluate(fiber_vec_field(model, v), x), wH);
        double hamv = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) hamv = std::max(hamv, std::abs(iv(static_cast<int>(k)) + dmv.gradient[k]));
        const double mv = cmap::moment_fiber(v, pt);
        hom = std::max(hom, std::abs(cmap::moment_fiber(v, pt2) - 2.0 * mv) / std::max(1.0, std::abs(mv)));

        const auto st = cmap::hk_state<double>(model, std::span<const double>(x));
        const double wvw = bilinear(cmap::fiber_field_of(st, v), cmap::omega_H_block<double>(n), cmap::fiber_field_of(st, w));
        const double obstruction = std::abs(wvw - bilinear(v, OmInv, w));
        return std::vector<double>{ham, hamv, hom, eq, obstruction};
      },
      opts);
  out.finalize();
  return out;
}

SuiteResult twist_suite(const CubicModel& model, const Options& opts) {
  SuiteResult out;
  out.name = "twist";
  auto rng = suite_rng(opts, 4);
  const int n = model.n();
  const int count = opts.count("points");
  const int pairs = opts.count("pairs");
  struct Job {
    double c;
    std::vector<double> x;
    std::vector<std::vector<double>> a, b;
  };
  std::vector<Job> jobs;
  std::vector<std::vector<double>> charts;
  for (double c : opts.c_values)
    for (int i = 0; i < count; ++i) {
      Job j{c, sampling::qk_chart(model, rng, c), {}, {}};
      for (int k = 0; k < pairs; ++k) {
        j.a.push_back(sampling::fiber(2 * n, rng));
        j.b.push_back(sampling::fiber(2 * n, rng));
      }
      charts.push_back(j.x);
      jobs.push_back(std::move(j));
    }
  std::vector<std::vector<double>> ratios(jobs.size());
  PointTable table{{"kernel_Z_P", "eta_Z_P_minus_fH"}, {"kernel", "kernel"}};
  table.run(
      out, charts,
      [&](const std::vector<double>& x, std::size_t i) {
        const Job& j = jobs[i];
        const auto qk = tw::make_qkpoint(model, x, j.c);
        (void)tw::qk_metric(model, qk, j.c);
        const auto w = tw::nbar_to_p<double>(std::span<const double>(x));
        const auto st = tw::twist_state<double>(model, std::span<const double>(w), j.c);
        const double kernel = max_abs(st.gtilde * st.ZP) / std::max(1.0, max_abs(st.gtilde));
        const double etaZ = std::abs(dot(st.eta, st.ZP) - st.fH) / std::max(1.0, std::abs(st.fH));
        for (int k = 0; k < pairs; ++k)
          ratios[i].push_back(tw::twist_ratio(model, qk, j.c, j.a[static_cast<std::size_t>(k)], j.b[static_cast<std::size_t>(k)]));
        return std::vector<double>{kernel, etaZ};
      },
      opts);
  std::vector<double> all;
  for (const auto& r : ratios) all.insert(all.end(), r.begin(), r.end());
  if (!all.empty()) {
    const double mean = std::accumulate(all.begin(), all.end(), 0.0) / static_cast<double>(all.size());
    double var = 0.0;
    for (double r : all) var += (r - mean) * (r - mean);
    const double sd = std::sqrt(var / static_cast<double>(all.size()));
    out.checks.push_back(scalar_check("twist_ratio_std_over_mean", sd / std::abs(mean), opts.tol("twist"),
                                      static_cast<int>(all.size())));
    out.metrics["twist_constant"] = mean;
  }
  out.finalize();
  return out;
}

SuiteResult group_suite(const CubicModel& model, const Options& opts) {
  SuiteResult out;
  out.name = "group";
  auto rng = suite_rng(opts, 5);
  const int n = model.n();
  const auto mode = opts.mode;
  const double tol = opts.tol("group");

  // Heisenberg triples in the cover, where the law is exact in floating point.
  const int triples = opts.count("triples");
  double comm = 0.0, assoc = 0.0, self = 0.0;
  for (int i = 0; i < triples; ++i) {
    const auto a = sampling::fiber(n, rng), b = sampling::fiber(n, rng), c = sampling::fiber(n, rng);
    const sy::HeisElement A{a, 0.0}, B{b, 0.0}, C{c, 0.0};
    const auto cov = tw::Mode::Cover;
    const auto Ai = sy::heis_inverse(A, cov), Bi = sy::heis_inverse(B, cov);
    const auto k = sy::heis_compose(sy::heis_compose(A, B, cov), sy::heis_compose(Ai, Bi, cov), cov);
    comm = std::max(comm, heis_diff(k, sy::HeisElement{std::vector<double>(a.size(), 0.0), sy::heis_pairing(a, b)}, cov));
    const auto l = sy::heis_compose(sy::heis_compose(A, B, cov), C, cov);
    const auto r = sy::heis_compose(A, sy::heis_compose(B, C, cov), cov);
    assoc = std::max(assoc, heis_diff(l, r, cov));
    const auto e = sy::heis_compose(sy::heis_compose(A, A, cov), sy::heis_compose(Ai, Ai, cov), cov);
    self = std::max(self, heis_diff(e, sy::HeisElement{std::vector<double>(a.size(), 0.0), 0.0}, cov));
  }
  out.checks.push_back(scalar_check("heisenberg_commutator", comm, tol, triples));
  out.checks.push_back(scalar_check("heisenberg_associativity", assoc, tol, triples));
  out.checks.push_back(scalar_check("commutator_alpha_eq_beta", self, tol, triples));

  // Full group: associativity and inverses on triples drawn from a pool.
  std::vector<sy::GroupElement> pool;
  for (int i = 0; i < 10; ++i) pool.push_back(sy::random_element(model, rng, mode));
  const auto id = sy::identity_element(model, mode);
  double gassoc = 0.0, ginv = 0.0;
  int ntriples = 0;
  for (const auto& a : pool) {
    ginv = std::max(ginv, element_diff(sy::compose(a, sy::inverse(a)), id));
    ginv = std::max(ginv, element_diff(sy::compose(sy::inverse(a), a), id));
    for (const auto& b : pool)
      for (const auto& c : pool) {
        gassoc = std::max(gassoc, element_diff(sy::compose(sy::compose(a, b), c), sy::compose(a, sy::compose(b, c))));
        ++ntriples;
      }
  }
  out.checks.push_back(scalar_check("group_associativity", gassoc, tol, ntriples));
  out.checks.push_back(scalar_check("group_inverse", ginv, tol, static_cast<int>(2 * pool.size())));

  // act_P homomorphism and conjugation h k h^{-1} = (S^{-T} alpha, tau).
  const int count = opts.count("points");
  struct Job {
    sy::GroupElement g1, g2;
    std::vector<double> x;
  };
  std::vector<Job> jobs;
  std::vector<std::vector<double>> charts;
  for (int i = 0; i < count; ++i) {
    Job j{sy::random_element(model, rng, mode), sy::random_element(model, rng, mode), sampling::p_chart(model, rng, 0.0)};
    charts.push_back(j.x);
    jobs.push_back(std::move(j));
  }
  PointTable table{{"act_P_homomorphism", "conjugation"}, {"homomorphism", "homomorphism"}};
  table.run(
      out, charts,
      [&](const std::vector<double>& x, std::size_t i) {
        const Job& j = jobs[i];
        const auto pp = tw::make_ppoint(model, x, mode);
        const auto a = sy::act_P(model, j.g1, sy::act_P(model, j.g2, pp));
        const auto b = sy::act_P(model, sy::compose(j.g1, j.g2), pp);
        sy::GroupElement h = j.g1;
        h.heis.alpha.assign(h.heis.alpha.size(), 0.0);
        h.heis.tau = 0.0;
        const auto k = sy::heis_element(model, j.g2.heis.alpha, j.g2.heis.tau, mode);
        const auto conj = sy::compose(sy::compose(h, k), sy::inverse(h));
        const auto want = sy::heis_element(model, transpose(inverse(h.aff.S)) * j.g2.heis.alpha, j.g2.heis.tau, mode);
        return std::vector<double>{ppoint_diff(a, b, mode),
                                   ppoint_diff(sy::act_P(model, conj, pp), sy::act_P(model, want, pp), mode)};
      },
      opts);

  // The F generator tau = 2 pi, in both modes.
  const std::vector<double> zero(static_cast<std::size_t>(2 * n), 0.0);
  double f_circle = 0.0, f_cover = INFINITY;
  for (const auto& x : charts) {
    for (auto m : {tw::Mode::Circle, tw::Mode::Cover}) {
      const auto pp = tw::make_ppoint(model, x, m);
      const auto img = sy::act_P(model, sy::heis_element(model, zero, 2.0 * sg::kPi, m), pp);
      if (m == tw::Mode::Circle)
        f_circle = std::max(f_circle, ppoint_diff(img, pp, m));
      else
        f_cover = std::min(f_cover, std::abs(img.s - pp.s));
    }
  }
  out.checks.push_back(scalar_check("F_element_circle_identity", f_circle, tol, count));
  out.checks.push_back(scalar_check("F_element_cover_moves", f_cover, opts.tol("effective"), count, false));
  out.finalize();
  return out;
}

SuiteResult killing_suite(const CubicModel& model, const Options& opts) {
  SuiteResult out;
  out.name = "killing";
  auto rng = suite_rng(opts, 6);
  const int n = model.n();
  std::vector<double> cs;
  std::vector<std::vector<double>> charts;
  for (double c : opts.c_values)
    for (int i = 0; i < opts.count("killing-points"); ++i) {
      cs.push_back(c);
      charts.push_back(sampling::qk_chart(model, rng, c));
    }
  std::vector<sy::AlgebraElement> gens;
  for (const auto& gen : model.affine_generators()) gens.push_back(sy::algebra_from_generator(model, gen));
  const std::size_t na = gens.size();
  for (int i = 0; i < 2 * n; ++i) gens.push_back(sy::algebra_fiber(unit(2 * n, i)));
  gens.push_back(sy::algebra_central());
  const Matrix<double> OmInv = cmap::flat_omega_inv<double>(n);

  PointTable table{{"killing", "bracket_fiber_fiber", "bracket_lift_fiber", "bracket_lift_lift", "bracket_central"},
                   {"killing", "bracket", "bracket", "bracket", "bracket"}};
  table.run(
      out, charts,
      [&](const std::vector<double>& x, std::size_t i) {
        const double c = cs[i];
        const auto g = tw::qk_metric_field(model, c);
        const double scale = tl::evaluate(g, x).max_abs();
        double kill = 0.0;
        for (const auto& a : gens) kill = std::max(kill, tl::lie_derivative(sy::induced_field(model, a, c), g, x).max_abs() / scale);
        const auto Z = tl::evaluate(sy::induced_field(model, sy::algebra_central(), c), x);
        std::vector<tl::TensorSample> fib;
        for (int k = 0; k < 2 * n; ++k) fib.push_back(tl::evaluate(sy::induced_field(model, gens[na + static_cast<std::size_t>(k)], c), x));
        double ff = 0.0, lf = 0.0, ll = 0.0, cz = 0.0;
        for (int a = 0; a < 2 * n; ++a)
          for (int b = 0; b < 2 * n; ++b) {
            const auto br = tl::bracket(sy::induced_field(model, gens[na + static_cast<std::size_t>(a)], c),
                                        sy::induced_field(model, gens[na + static_cast<std::size_t>(b)], c), x);
            ff = std::max(ff, tensor_diff(br, OmInv(a, b) * Z.components));
          }
        for (std::size_t a = 0; a < na; ++a) {
          const Matrix<double>& C = gens[a].C;
          for (int k = 0; k < 2 * n; ++k) {
            const auto br = tl::bracket(sy::induced_field(model, gens[a], c), sy::induced_field(model, gens[na + static_cast<std::size_t>(k)], c), x);
            std::vector<double> want(br.components.size(), 0.0);
            for (int j = 0; j < 2 * n; ++j) want = want + C(k, j) * fib[static_cast<std::size_t>(j)].components;
            lf = std::max(lf, tensor_diff(br, want));
          }
          for (std::size_t b = a + 1; b < na; ++b) {
            const Matrix<double>& D = gens[b].C;
            const auto br = tl::bracket(sy::induced_field(model, gens[a], c), sy::induced_field(model, gens[b], c), x);
            const auto want = tl::evaluate(sy::induced_field(model, sy::AlgebraElement{D * C - C * D, {}, 0.0}, c), x);
            ll = std::max(ll, tensor_diff(br, want.components));
          }
          cz = std::max(cz, tl::bracket(sy::induced_field(model, gens[a], c), sy::induced_field(model, sy::algebra_central(), c), x).max_abs());
        }
        return std::vector<double>{kill, ff, lf, ll, cz};
      },
      opts);
  out.metrics["generators"] = static_cast<double>(gens.size());
  out.finalize();
  return out;
}

SuiteResult isometry_suite(const CubicModel& model, const Options& opts) {
  SuiteResult out;
  out.name = "isometry";
  auto rng = suite_rng(opts, 7);
  const int nel = opts.count("elements");
  const int npt = opts.count("isometry-points");
  for (double c : opts.c_values) {
    std::vector<tw::QKPoint> sample;
    for (int i = 0; i < npt; ++i) sample.push_back(tw::make_qkpoint(model, sampling::qk_chart(model, rng, c), c, opts.mode));
    std::vector<sy::GroupElement> elements;
    for (int i = 0; i < nel; ++i) elements.push_back(sy::random_element(model, rng, opts.mode));
    // Central elements off 2 pi Z are non-identity too.
    const std::vector<double> zero(static_cast<std::size_t>(2 * model.n()), 0.0);
    elements.push_back(sy::heis_element(model, zero, 1.0, opts.mode));
    elements.push_back(sy::heis_element(model, zero, sg::kPi, opts.mode));

    struct Row {
      sy::IsometryReport rep;
      double moved = 0.0;
    };
    const auto rows = map_indices(
        elements.size(),
        [&](std::size_t i) {
          Row r;
          r.rep = sy::isometry_report(model, elements[i], c, sample);
          for (const auto& qk : sample) {
            try {
              r.moved = std::max(r.moved, sy::displacement(sy::act_Nbar(model, elements[i], qk), qk, opts.mode));
            } catch (const Error& e) {
              if (e.kind() != ErrorKind::LeftDomain) throw;
            }
          }
          return r;
        },
        opts.exec);
    const std::string tag = "_c=" + [&] {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%g", c);
      return std::string(buf);
    }();
    Check iso = scalar_check("pullback_residual" + tag, 0.0, opts.tol("isometry"), 0);
    Check eff = scalar_check("min_max_displacement" + tag, INFINITY, opts.tol("effective"), 0, false);
    int skipped = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      iso.count += r.rep.checked;
      skipped += r.rep.skipped;
      if (r.rep.worst_point >= 0 && (iso.worst_point.empty() || r.rep.max_residual > iso.value)) {
        iso.value = std::max(iso.value, r.rep.max_residual);
        iso.worst_point = sample[static_cast<std::size_t>(r.rep.worst_point)].chart();
      }
      ++eff.count;
      eff.value = std::min(eff.value, r.moved);
    }
    if (iso.count == 0) iso.value = INFINITY;
    out.checks.push_back(std::move(iso));
    out.checks.push_back(std::move(eff));
    out.metrics["skipped_points" + tag] = skipped;

    // Harness sensitivity: a corrupted S must be detected.
    sy::GroupElement bad = elements.front();
    bad.aff.S(0, 1) += 1e-3;
    out.checks.push_back(scalar_check("corrupted_element_detected" + tag, sy::isometry_report(model, bad, c, sample).max_residual,
                                      opts.tol("sensitivity"), npt, false));

    // F element in both modes.
    double f_circle = 0.0, f_cover = INFINITY;
    for (const auto& qk : sample) {
      f_circle = std::max(f_circle, sy::displacement(sy::act_Nbar(model, sy::heis_element(model, zero, 2.0 * sg::kPi, tw::Mode::Circle), qk), qk, tw::Mode::Circle));
      auto qc = qk;
      const auto img = sy::act_Nbar(model, sy::heis_element(model, zero, 2.0 * sg::kPi, tw::Mode::Cover), qc);
      f_cover = std::min(f_cover, sy::displacement(img, qc, tw::Mode::Cover));
    }
    out.metrics["F_displacement_circle" + tag] = f_circle;
    out.metrics["F_displacement_cover" + tag] = f_cover;
    out.checks.push_back(scalar_check("F_element_circle_identity" + tag, f_circle, opts.tol("group"), npt));
    out.checks.push_back(scalar_check("F_element_cover_moves" + tag, f_cover, opts.tol("effective"), npt, false));
  }
  out.finalize();
  return out;
}

CurvatureResult curvature_suite(const CubicModel& model, const Options& opts) {
  CurvatureResult res;
  SuiteResult& out = res.suite;
  out.name = "curvature";
  auto rng = suite_rng(opts, 8);
  const double cmax = max_c(opts);
  std::vector<std::vector<double>> points;
  try {
    for (int i = 0; i < opts.count("curvature-points"); ++i) points.push_back(sampling::qk_chart(model, rng, cmax));
  } catch (const Error& e) {
    out.diagnostic = std::string("domain exhaustion: ") + e.what();
    out.finalize();
    return res;
  }
  struct Job {
    double c;
    int point;
  };
  std::vector<Job> jobs;
  for (double c : opts.c_values)
    for (int i = 0; i < static_cast<int>(points.size()); ++i) jobs.push_back({c, i});
  const int dim = 4 * model.n();
  res.rows = map_indices(
      jobs.size(),
      [&](std::size_t k) {
        const Job& j = jobs[k];
        const auto& x = points[static_cast<std::size_t>(j.point)];
        const auto g = tw::qk_metric_field(model, j.c);
        const auto cs = tl::curvature(g, x);
        const auto gm = tl::evaluate(g, x).matrix();
        CurvatureRow row;
        row.c = j.c;
        row.point = j.point;
        row.chart = x;
        row.scal = cs.scal;
        row.kretschmann = cs.kretschmann;
        row.einstein = frobenius(cs.ricci - (cs.scal / dim) * gm) / frobenius(gm);
        return row;
      },
      opts.exec);

  Check ein = scalar_check("einstein_residual", 0.0, opts.tol("einstein"), 0);
  Check neg = scalar_check("max_scal", -INFINITY, 0.0, 0);
  Check cst = scalar_check("scal_spread_across_points", 0.0, opts.tol("scal"), 0);
  std::vector<double> all_scal;
  for (double c : opts.c_values) {
    std::vector<double> sc, kr;
    for (const auto& r : res.rows) {
      if (r.c != c) continue;
      ++ein.count;
      ++neg.count;
      if (r.einstein > ein.value || ein.worst_point.empty()) {
        ein.value = std::max(ein.value, r.einstein);
        ein.worst_point = r.chart;
      }
      if (r.scal > neg.value) {
        neg.value = r.scal;
        neg.worst_point = r.chart;
      }
      sc.push_back(r.scal);
      kr.push_back(r.kretschmann);
      all_scal.push_back(r.scal);
    }
    cst.value = std::max(cst.value, rel_spread(sc));
    cst.count += static_cast<int>(sc.size());
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", c);
    const std::string tag = std::string("_c=") + buf;
    out.metrics["scal_mean" + tag] = std::accumulate(sc.begin(), sc.end(), 0.0) / static_cast<double>(sc.size());
    const double kspread = rel_spread(kr);
    out.metrics["kretschmann_spread" + tag] = kspread;
    Check kc = scalar_check("kretschmann_spread" + tag, kspread, opts.tol("kretschmann"), static_cast<int>(kr.size()));
    // Only the undeformed space is homogeneous.
    if (c != 0.0) {
      kc.informational = true;
      kc.note = "variation reported, not gated";
    }
    out.checks.push_back(std::move(kc));
  }
  out.checks.insert(out.checks.begin(), {ein, neg, cst});
  if (opts.c_values.size() > 1)
    out.checks.push_back(scalar_check("scal_spread_across_c", rel_spread(all_scal), opts.tol("scal"), static_cast<int>(all_scal.size())));
  out.finalize();
  return res;
}

const std::vector<std::string>& check_suite_names() {
  static const std::vector<std::string> names{"cask", "rigid_cmap", "moment_map", "twist", "group", "killing"};
  return names;
}

SuiteResult run_check_suite(const std::string& name, const CubicModel& model, const Options& opts) {
  using Fn = SuiteResult (*)(const CubicModel&, const Options&);
  static const std::map<std::string, Fn> table{{"cask", cask_suite},   {"rigid_cmap", cmap_suite},
                                               {"moment_map", moment_suite}, {"twist", twist_suite},
                                               {"group", group_suite}, {"killing", killing_suite}};
  auto it = table.find(name);
  if (it == table.end()) throw Error(ErrorKind::Config, "unknown suite '" + name + "'");
  try {
    return it->second(model, opts);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    SuiteResult r;
    r.name = name;
    r.diagnostic = e.what();
    r.finalize();
    return r;
  }
}

}  // namespace qklab::suites
