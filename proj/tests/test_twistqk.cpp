#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "qklab/sampling.hpp"
#include "qklab/twistqk.hpp"

using namespace qklab;
namespace tl = qklab::tensorlab;
namespace tw = qklab::twistqk;
using tw::TwistState;

namespace {

const CubicModel& e1() {
  static const CubicModel m = builtin_model("E1");
  return m;
}
const CubicModel& e2() {
  static const CubicModel m = builtin_model("E2");
  return m;
}

template <class Fn>
auto p_field(const CubicModel& model, double c, tl::Valence val, Fn fn) {
  return tl::make_field(tw::kPChartFrame, val, 4 * model.n() + 1, [&model, c, fn](const auto& x) {
    using V = std::decay_t<decltype(x[0])>;
    TwistState<V> st = tw::twist_state<V>(model, std::span<const V>(x), c);
    return fn(st);
  });
}

auto eta_field(const CubicModel& model) {
  return p_field(model, 0.0, tl::kOneForm, [](const auto& st) { return tw::p_form1_to_chart(st, st.eta); });
}
auto ZP_field(const CubicModel& model, double c) {
  return p_field(model, c, tl::kVector, [](const auto& st) { return tw::p_vector_to_chart(st, st.ZP); });
}
auto gtilde_field(const CubicModel& model, double c) {
  return p_field(model, c, tl::kCovariant2, [](const auto& st) { return tw::p_form2_to_chart(st, st.gtilde); });
}
auto theta_field(const CubicModel& model, double c, int j) {
  return p_field(model, c, tl::kOneForm,
                 [j](const auto& st) { return tw::p_form1_to_chart(st, st.theta[static_cast<std::size_t>(j)]); });
}
auto lift_hat_field(const CubicModel& model, const Matrix<double>& C, const std::vector<double>& v) {
  return p_field(model, 0.0, tl::kVector, [C, v](const auto& st) {
    using V = std::decay_t<decltype(st.s)>;
    std::vector<V> field = cmap::canonical_lift_of(st.hk, C) + cmap::fiber_field_of(st.hk, v);
    V mu = cmap::moment_lift_of(st.hk, C) + cmap::moment_fiber_of(st.hk, v);
    return tw::p_vector_to_chart(st, tw::lift_hat_of(st, field, mu));
  });
}

Matrix<double> zeros(int n) { return Matrix<double>(2 * n, 2 * n); }

Matrix<double> omega_H_p_chart(const CubicModel& model, const std::vector<double>& w) {
  TwistState<double> st = tw::twist_state<double>(model, std::span<const double>(w), 0.0);
  Matrix<double> wp(st.dim(), st.dim());
  wp.set_block(0, 0, cmap::omega_H_block<double>(st.n));
  const Matrix<double> J = tw::p_jacobian(st);
  return transpose(J) * wp * J;
}

std::vector<double> random_p(const CubicModel& model, sampling::Rng& rng, double c = 0.0) {
  return sampling::p_chart(model, rng, c);
}

}  // namespace

TEST_CASE("connection one-form") {
  sampling::Rng rng(1);
  for (const CubicModel* model : {&e1(), &e2()}) {
    const int n = model->n();
    auto eta = eta_field(*model);
    for (int i = 0; i < 20; ++i) {
      auto w = random_p(*model, rng);
      auto pp = tw::make_ppoint(*model, w);
      auto e = tw::eta(*model, pp);
      CHECK(e.back() == 1.0);
      auto d = tl::exterior_derivative(eta, w).matrix();
      CHECK(max_abs_diff(d, omega_H_p_chart(*model, w)) < 1e-10);

      // eta(Y) = mu_Y and eta(v) = mu_v / 2
      auto st = tw::twist_state<double>(*model, std::span<const double>(w), 0.0);
      for (const auto& gen : model->affine_generators()) {
        const Matrix<double> C = sg::generator_matrix(*model, gen);
        const double mu = cmap::moment_lift_of(st.hk, C);
        CHECK(std::abs(tw::eta_of(st, cmap::canonical_lift_of(st.hk, C)) - mu) < 1e-12 * std::max(1.0, std::abs(mu)));
      }
      auto v = sampling::fiber(n, rng);
      CHECK(std::abs(tw::eta_of(st, cmap::fiber_field_of(st.hk, v)) - 0.5 * cmap::moment_fiber_of(st.hk, v)) < 1e-13);
    }
  }
}

TEST_CASE("Z_P lift") {
  std::vector<std::complex<double>> X{1.0, {0.0, 1.0}};
  auto base = sg::cask_point_from_X(e1(), X);
  tw::PPoint pp{cmap::make_npoint(base, {0.2, 0.1, -0.4, 0.3}), 1.0};
  auto zp = tw::lift_ZP(e1(), pp, 0.0);
  auto e = tw::eta(e1(), pp);
  CHECK(std::inner_product(e.begin(), e.end(), zp.begin(), 0.0) == doctest::Approx(-4.0).epsilon(1e-12));
  auto rd = cmap::rotation_data(e1(), pp.n_point, 0.0);
  for (std::size_t i = 0; i < rd.Z.size(); ++i) CHECK(zp[i] == rd.Z[i]);

  sampling::Rng rng(2);
  for (const CubicModel* model : {&e1(), &e2()}) {
    for (double c : {0.0, 0.3}) {
      auto ZP = ZP_field(*model, c);
      auto eta = eta_field(*model);
      for (int i = 0; i < 10; ++i) {
        auto w = random_p(*model, rng, c);
        auto st = tw::twist_state<double>(*model, std::span<const double>(w), c);
        double ez = 0.0;
        for (std::size_t k = 0; k < st.ZP.size(); ++k) ez += st.eta[k] * st.ZP[k];
        CHECK(std::abs(ez - st.fH) < 1e-12 * std::max(1.0, std::abs(st.fH)));
        CHECK(tl::lie_derivative(ZP, eta, w).max_abs() < 1e-9);
      }
    }
  }
}

TEST_CASE("hat lifts preserve eta; canonical lifts need no correction") {
  sampling::Rng rng(3);
  for (const CubicModel* model : {&e1(), &e2()}) {
    const int n = model->n();
    auto eta = eta_field(*model);
    const auto gens = model->affine_generators();
    for (int i = 0; i < 5; ++i) {
      auto w = random_p(*model, rng);
      auto st = tw::twist_state<double>(*model, std::span<const double>(w), 0.0);
      const Matrix<double> C = sg::generator_matrix(*model, gens[static_cast<std::size_t>(i) % gens.size()]);
      std::vector<double> zero(static_cast<std::size_t>(2 * n), 0.0);
      auto Yh = tw::lift_hat_of(st, cmap::canonical_lift_of(st.hk, C), cmap::moment_lift_of(st.hk, C));
      CHECK(std::abs(Yh.back()) < 1e-12 * std::max(1.0, max_abs(Yh)));
      CHECK(tl::lie_derivative(lift_hat_field(*model, C, zero), eta, w).max_abs() < 1e-9);

      auto v = sampling::fiber(n, rng), u = sampling::fiber(n, rng);
      auto vh = tw::lift_hat_of(st, cmap::fiber_field_of(st.hk, v), cmap::moment_fiber_of(st.hk, v));
      CHECK(std::abs(vh.back() - 0.5 * cmap::moment_fiber_of(st.hk, v)) < 1e-13);
      auto vf = lift_hat_field(*model, zeros(n), v);
      auto uf = lift_hat_field(*model, zeros(n), u);
      CHECK(tl::lie_derivative(vf, eta, w).max_abs() < 1e-9);

      // [v^, u^] = omega_H(v, u) X_P
      auto br = tl::bracket(vf, uf, w);
      const double wvu = bilinear(v, cmap::flat_omega_inv<double>(n), u);
      for (int k = 0; k < 4 * n; ++k) CHECK(std::abs(br(k)) < 1e-10);
      CHECK(std::abs(br(4 * n) - wvu) < 1e-10);

      // commutes with X_P: components independent of s
      auto w2 = w;
      w2.back() += 1.3;
      CHECK(tl::evaluate(vf, w).components == tl::evaluate(vf, w2).components);
    }
  }
}

TEST_CASE("theta forms and the Z_P kernel of g~_P") {
  sampling::Rng rng(4);
  for (const CubicModel* model : {&e1(), &e2()}) {
    const int n = model->n();
    for (double c : {0.0, 0.3}) {
      auto gt = gtilde_field(*model, c);
      auto ZP = ZP_field(*model, c);
      auto th0 = theta_field(*model, c, 0);
      for (int i = 0; i < 5; ++i) {
        auto w = random_p(*model, rng, c);
        auto pp = tw::make_ppoint(*model, w);
        auto ts = tw::theta_and_gP(*model, pp, c);
        for (int j : {2, 3}) {
          const auto& th = ts.theta[static_cast<std::size_t>(j)];
          // Z is horizontal and omega_2, omega_3 pair dq with dp: only dp-components survive.
          CHECK(th(4 * n) == 0.0);
          for (int k = 0; k < 2 * n; ++k) CHECK(th(k) == 0.0);
        }
        CHECK(tl::exterior_derivative(th0, w).max_abs() < 1e-10);
        const double scale = std::max(1.0, tl::evaluate(gt, w).max_abs());
        CHECK(tl::lie_derivative(ZP, gt, w).max_abs() / scale < 1e-8);
        auto kernel = tl::interior(tl::evaluate(ZP, w), tl::evaluate(gt, w));
        CHECK(kernel.max_abs() / scale < 1e-8);
        CHECK(max_abs_diff(ts.gP.matrix(), transpose(ts.gP.matrix())) < 1e-14 * ts.gP.max_abs());
      }
    }
  }
  std::vector<std::complex<double>> X{1.0, {0.0, 1.0}};
  tw::PPoint pp{cmap::make_npoint(sg::cask_point_from_X(e1(), X), {0.0, 0.0, 0.0, 0.0}), 0.0};
  try {
    tw::theta_and_gP(e1(), pp, 8.0);  // f_Z = -f - c/2 = 0
    FAIL("expected singular deformation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DeformationSingular);
  }
}

TEST_CASE("qk metric dimension, symmetry, positivity and continuity in c") {
  sampling::Rng rng(5);
  for (const CubicModel* model : {&e1(), &e2()}) {
    const int d = 4 * model->n();
    for (double c : {0.0, 0.3}) {
      for (int i = 0; i < 50; ++i) {
        auto qk = tw::make_qkpoint(*model, sampling::qk_chart(*model, rng, c), c);
        auto s = tw::qk_metric(*model, qk, c);
        CHECK(s.gQK.dim == d);
        auto g = s.gQK.matrix();
        CHECK(max_abs_diff(g, transpose(g)) < 1e-13 * max_abs(g));
        CHECK(symmetric_eigenvalues(g).front() > 0.0);
        CHECK(s.aux.fZ > 0.0);
      }
    }
  }
  auto qk = tw::make_qkpoint(e1(), sampling::qk_chart(e1(), rng, 0.3), 0.3);
  auto g0 = tw::qk_metric(e1(), qk, 0.3).gQK.matrix();
  double prev = 1e300;
  for (double dc : {1e-2, 1e-4, 1e-6}) {
    const double diff = max_abs_diff(tw::qk_metric(e1(), qk, 0.3 + dc).gQK.matrix(), g0);
    CHECK(diff < prev);
    prev = diff;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("outside the one-loop domain") {
  // E1 at r = 0.5, t = 0.5: f = -4 r^2 h(t) = -0.125.
  std::vector<double> v{0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0};
  CHECK_NOTHROW(tw::make_qkpoint(e1(), v, 0.2));
  try {
    tw::make_qkpoint(e1(), v, 0.3);
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OutsideOneLoopDomain);
  }
  tw::QKPoint qk;
  qk.r = 0.5;
  qk.b = {0.0};
  qk.t = {0.5};
  qk.p = {0.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(tw::qk_metric(e1(), qk, 0.3), Error);
}

TEST_CASE("elementary deformation") {
  sampling::Rng rng(6);
  for (const CubicModel* model : {&e1(), &e2()}) {
    const int n = model->n();
    for (double c : {0.0, 0.3}) {
      for (int i = 0; i < 5; ++i) {
        auto x = sampling::n_chart(*model, rng);
        auto pt = cmap::make_npoint(*model, x);
        auto gH = tw::elementary_deformation(*model, pt, c);
        auto st = cmap::hk_state<double>(*model, std::span<const double>(x));
        const double fZ = st.fZ(c), fH = st.fH(c);
        const double gzz = bilinear(st.Z, st.gN, st.Z);
        CHECK(bilinear(st.Z, gH, st.Z) == doctest::Approx(fH / (fZ * fZ) * gzz).epsilon(1e-11));
        auto I2Z = st.I2 * st.Z;
        CHECK(bilinear(I2Z, gH, I2Z) == doctest::Approx(fH / (fZ * fZ) * gzz).epsilon(1e-11));
        // A vector g_N-orthogonal to HZ.
        auto w = sampling::fiber(2 * n, rng);
        const std::vector<double> basis[4] = {st.Z, st.I1 * st.Z, st.I2 * st.Z, st.I3 * st.Z};
        for (const auto& bvec : basis) {
          const double coef = bilinear(w, st.gN, bvec) / bilinear(bvec, st.gN, bvec);
          w = w - coef * bvec;
        }
        CHECK(bilinear(w, gH, w) == doctest::Approx(bilinear(w, st.gN, w) / fZ).epsilon(1e-10));
        CHECK(std::abs(bilinear(w, gH, st.Z)) < 1e-10 * std::max(1.0, max_abs(gH)));
      }
    }
  }
}

TEST_CASE("projection to Nbar") {
  sampling::Rng rng(7);
  for (const CubicModel* model : {&e1(), &e2()}) {
    const int n = model->n();
    const double c = 0.3;
    auto qk = tw::make_qkpoint(*model, sampling::qk_chart(*model, rng, c), c);
    auto pp = tw::to_ppoint(*model, qk);
    auto w = pp.chart();
    auto st = tw::twist_state<double>(*model, std::span<const double>(w), c);
    // A chart vector with zero phi-component, mapped to the P-affine frame.
    std::vector<double> tang_chart = sampling::fiber(2 * n, rng);
    tang_chart.push_back(0.7);
    tang_chart[1] = 0.0;
    std::vector<double> head(tang_chart.begin(), tang_chart.end() - 1);
    auto aff = st.hk.Jc * head;
    aff.push_back(tang_chart.back());
    auto out = tw::project_to_Nbar(*model, qk, aff, c);
    std::vector<double> want = tang_chart;
    want.erase(want.begin() + 1);
    for (std::size_t k = 0; k < want.size(); ++k) CHECK(std::abs(out[k] - want[k]) < 1e-12 * std::max(1.0, std::abs(want[k])));
    for (double y : tw::project_to_Nbar(*model, qk, st.ZP, c)) CHECK(std::abs(y) < 1e-12);

    // d pi (V~_H) = d pi (V^) for V a lift plus a fiber translation.
    const Matrix<double> C = sg::generator_matrix(*model, model->affine_generators()[0]);
    auto v = sampling::fiber(n, rng);
    auto V = cmap::canonical_lift_of(st.hk, C) + cmap::fiber_field_of(st.hk, v);
    const double mu = cmap::moment_lift_of(st.hk, C) + cmap::moment_fiber_of(st.hk, v);
    auto VH = V - (mu / st.fH) * st.hk.Z;
    auto a = tw::project_to_Nbar(*model, qk, tw::horizontal_lift_of(st, VH), c);
    auto b = tw::project_to_Nbar(*model, qk, tw::lift_hat_of(st, V, mu), c);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) < 1e-10 * std::max(1.0, std::abs(b[k])));
  }
}

TEST_CASE("twist ratio is a single constant") {
  sampling::Rng rng(8);
  for (const CubicModel* model : {&e1(), &e2()}) {
    const int n = model->n();
    std::vector<double> ratios;
    for (double c : {0.0, 0.3}) {
      for (int i = 0; i < 5; ++i) {
        auto qk = tw::make_qkpoint(*model, sampling::qk_chart(*model, rng, c), c);
        for (int j = 0; j < 4; ++j) {
          auto a = sampling::fiber(2 * n, rng), b = sampling::fiber(2 * n, rng);
          ratios.push_back(tw::twist_ratio(*model, qk, c, a, b));
        }
      }
    }
    const double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / static_cast<double>(ratios.size());
    double var = 0.0;
    for (double r : ratios) var += (r - mean) * (r - mean);
    const double sd = std::sqrt(var / static_cast<double>(ratios.size()));
    CHECK(sd / std::abs(mean) < 1e-8);
    MESSAGE("twist ratio " << mean);
  }
}

TEST_CASE("Einstein condition and scalar curvature of g^c on E1") {
  sampling::Rng rng(9);
  std::vector<double> scal;
  for (double c : {0.0, 0.3}) {
    auto g = tw::qk_metric_field(e1(), c);
    for (int i = 0; i < 2; ++i) {
      auto x = sampling::qk_chart(e1(), rng, c);
      auto cs = tl::curvature(g, x);
      auto gm = tl::evaluate(g, x).matrix();
      const double res = frobenius(cs.ricci - (cs.scal / 8.0) * gm) / frobenius(gm);
      CHECK(res < 1e-6);
      CHECK(cs.scal < 0.0);
      scal.push_back(cs.scal);
    }
  }
  for (double s : scal) CHECK(s == doctest::Approx(scal.front()).epsilon(1e-6));
}
