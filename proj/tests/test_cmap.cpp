#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "qklab/cmap.hpp"
#include "qklab/sampling.hpp"

using namespace qklab;
namespace tl = qklab::tensorlab;
using cmap::HKState;

namespace {

const CubicModel& e1() {
  static const CubicModel m = builtin_model("E1");
  return m;
}
const CubicModel& e2() {
  static const CubicModel m = builtin_model("E2");
  return m;
}

// Chart-frame fields on N built from the affine-frame state.
template <class Fn>
auto chart_field(const CubicModel& model, tl::Valence val, Fn fn) {
  return tl::make_field(cmap::kChartFrame, val, 4 * model.n(), [&model, fn](const auto& x) {
    using V = std::decay_t<decltype(x[0])>;
    HKState<V> st = cmap::hk_state<V>(model, std::span<const V>(x));
    return fn(st);
  });
}

auto gN_field(const CubicModel& model) {
  return chart_field(model, tl::kCovariant2, [](const auto& st) { return cmap::form2_to_chart(st, st.gN); });
}
auto omega_field(const CubicModel& model, int a) {
  return chart_field(model, tl::kCovariant2, [a](const auto& st) { return cmap::form2_to_chart(st, st.omega(a)); });
}
auto Z_field(const CubicModel& model) {
  return chart_field(model, tl::kVector, [](const auto& st) { return cmap::vector_to_chart(st, st.Z); });
}
auto lift_field(const CubicModel& model, const Matrix<double>& C) {
  return chart_field(model, tl::kVector, [C](const auto& st) { return cmap::vector_to_chart(st, cmap::canonical_lift_of(st, C)); });
}
auto fiber_vec_field(const CubicModel& model, const std::vector<double>& v) {
  return chart_field(model, tl::kVector, [v](const auto& st) { return cmap::vector_to_chart(st, cmap::fiber_field_of(st, v)); });
}

Matrix<double> omega_H_chart(const CubicModel& model, const std::vector<double>& x) {
  HKState<double> st = cmap::hk_state<double>(model, std::span<const double>(x));
  return transpose(st.Jc) * cmap::omega_H_block<double>(model.n()) * st.Jc;
}

double tensor_diff(const tl::TensorSample& a, const tl::TensorSample& b, double sign = 1.0) {
  double r = 0.0;
  for (std::size_t k = 0; k < a.components.size(); ++k) r = std::max(r, std::abs(a.components[k] - sign * b.components[k]));
  return r;
}

Matrix<double> gen_C(const CubicModel& model, int idx) { return sg::generator_matrix(model, model.affine_generators()[static_cast<std::size_t>(idx)]); }

}  // namespace

TEST_CASE("hk sample blocks and quaternion relations") {
  sampling::Rng rng(1);
  for (const CubicModel* model : {&e1(), &e2()}) {
    const int n = model->n();
    for (int i = 0; i < 20; ++i) {
      auto pt = cmap::make_npoint(*model, sampling::n_chart(*model, rng));
      auto hk = cmap::hk_sample(*model, pt);
      auto ct = sg::cask_tensors(*model, pt.base);
      CHECK(max_abs_diff(hk.gN.block(0, 0, 2 * n, 2 * n), ct.g) == 0.0);
      CHECK(max_abs_diff(hk.gN.block(2 * n, 2 * n, 2 * n, 2 * n), inverse(ct.g)) < 1e-12 * max_abs(inverse(ct.g)));
      CHECK(max_abs(hk.gN.block(0, 2 * n, 2 * n, 2 * n)) == 0.0);
      CHECK(hk.invariant_residual() < 1e-10);
      // omega_1 is the constant form diag(omega, omega^{-1}).
      CHECK(max_abs_diff(hk.omega1, block_diag(ct.omega, ct.omega_inv)) < 1e-10);
    }
  }
}

TEST_CASE("omega_a are closed") {
  sampling::Rng rng(2);
  for (const CubicModel* model : {&e1(), &e2()}) {
    for (int a = 1; a <= 3; ++a) {
      auto w = omega_field(*model, a);
      for (int i = 0; i < 3; ++i) {
        auto x = sampling::n_chart(*model, rng);
        auto dw = tl::exterior_derivative(w, x);
        CHECK(dw.max_abs() < 1e-8);
      }
    }
  }
}

TEST_CASE("rotation data at the E1 spot point") {
  std::vector<std::complex<double>> X{1.0, {0.0, 1.0}};
  auto base = sg::cask_point_from_X(e1(), X);
  auto pt = cmap::make_npoint(base, {0.3, -0.2, 0.9, 0.1});
  auto rd = cmap::rotation_data(e1(), pt, 0.0);
  CHECK(rd.gZZ == doctest::Approx(-8.0).epsilon(1e-13));
  CHECK(rd.fZ == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(rd.fH == doctest::Approx(-4.0).epsilon(1e-13));
  CHECK(std::abs(rd.fH - rd.fZ - rd.gZZ) < 1e-12);
  for (int i = 4; i < 8; ++i) CHECK(rd.Z[static_cast<std::size_t>(i)] == 0.0);

  auto rd1 = cmap::rotation_data(e1(), pt, 1.0);
  auto rd2 = cmap::rotation_data(e1(), pt, 3.0);
  CHECK((rd2.fZ - rd1.fZ) / 2.0 == doctest::Approx(-0.5).epsilon(1e-14));

  auto other = cmap::make_npoint(base, {-1.0, 0.5, 0.0, 0.7});
  CHECK(cmap::rotation_data(e1(), other, 0.0).Z == rd.Z);
  CHECK_THROWS_AS(cmap::rotation_data(e1(), pt, -0.1), Error);
}

TEST_CASE("omega_H two ways, its p-block and nondegeneracy") {
  sampling::Rng rng(3);
  for (const CubicModel* model : {&e1(), &e2()}) {
    const int n = model->n();
    const Matrix<double> Om = sg::flat_omega(*model);
    const Matrix<double> OmInv = inverse(Om);
    for (int i = 0; i < 5; ++i) {
      auto pt = cmap::make_npoint(*model, sampling::n_chart(*model, rng));
      auto wH = cmap::omega_H(*model, pt).matrix();
      for (int a = 0; a < 2 * n; ++a)
        for (int b = 0; b < 2 * n; ++b) CHECK(wH(2 * n + a, 2 * n + b) == doctest::Approx(OmInv(a, b)));
      CHECK(std::abs(determinant(wH)) > 1e-6);
      // d iota_Z g_N = -2 pi^* omega
      auto dZ = cmap::omega_H_derived(*model, pt) - cmap::hk_sample(*model, pt).omega1;
      Matrix<double> want(4 * n, 4 * n);
      want.set_block(0, 0, -2.0 * Om);
      CHECK(max_abs_diff(dZ, want) < 1e-9);
    }
  }
}

TEST_CASE("I_H is an almost complex structure commuting with I_a") {
  sampling::Rng rng(4);
  for (const CubicModel* model : {&e1(), &e2()}) {
    const int n = model->n();
    for (int i = 0; i < 10; ++i) {
      auto pt = cmap::make_npoint(*model, sampling::n_chart(*model, rng));
      auto I = cmap::I_H(*model, pt).matrix();
      auto hk = cmap::hk_sample(*model, pt);
      auto ct = sg::cask_tensors(*model, pt.base);
      const double s = std::max(1.0, max_abs(hk.gN));
      CHECK(max_abs(I * I + Matrix<double>::identity(4 * n)) < 1e-10);
      CHECK(max_abs_diff(I, block_diag(Matrix<double>(-ct.J), transpose(ct.J))) < 1e-10);
      for (const Matrix<double>* Ia : {&hk.I1, &hk.I2, &hk.I3}) CHECK(max_abs_diff(I * *Ia, *Ia * I) < 1e-10);
      CHECK(max_abs(hk.gN * I + transpose(I) * hk.gN) / s < 1e-10);
    }
  }
}

TEST_CASE("rotating Killing field") {
  sampling::Rng rng(5);
  for (const CubicModel* model : {&e1(), &e2()}) {
    auto Z = Z_field(*model);
    auto g = gN_field(*model);
    auto w1 = omega_field(*model, 1), w2 = omega_field(*model, 2), w3 = omega_field(*model, 3);
    for (int i = 0; i < 20; ++i) {
      auto x = sampling::n_chart(*model, rng);
      const double s = std::max(1.0, tl::evaluate(g, x).max_abs());
      CHECK(tl::lie_derivative(Z, g, x).max_abs() / s < 1e-8);
      CHECK(tl::lie_derivative(Z, w1, x).max_abs() / s < 1e-8);
      CHECK(tensor_diff(tl::lie_derivative(Z, w2, x), tl::evaluate(w3, x)) / s < 1e-8);
      CHECK(tensor_diff(tl::lie_derivative(Z, w3, x), tl::evaluate(w2, x), -1.0) / s < 1e-8);

      // iota_Z omega_1 + d f_Z = 0
      auto df = tl::derive_scalar(
          [model](const auto& v) {
            using V = std::decay_t<decltype(v[0])>;
            return cmap::hk_state<V>(*model, std::span<const V>(v)).fZ(0.7);
          },
          x);
      auto iz = tl::interior(tl::evaluate(Z, x), tl::evaluate(w1, x));
      for (std::size_t k = 0; k < x.size(); ++k) CHECK(std::abs(iz(static_cast<int>(k)) + df.gradient[k]) < 1e-9);
      // Chart components of Z: -d/dphi.
      auto zc = tl::evaluate(Z, x);
      CHECK(std::abs(zc(1) + 1.0) < 1e-12);
    }
  }
}

TEST_CASE("canonical lift of the E1 scaling generator") {
  auto pt = cmap::make_npoint(e1(), std::vector<double>{1.2, 0.4, 0.3, 0.9, 0.5, -0.6, 0.2, 0.8});
  Matrix<double> zero(4, 4);
  for (double y : cmap::canonical_lift(zero, e1(), pt)) CHECK(y == 0.0);
  CHECK(cmap::moment_lift(zero, e1(), pt) == 0.0);

  Matrix<double> C = gen_C(e1(), 0);
  auto Y = cmap::canonical_lift(C, e1(), pt);
  const double diag[] = {3.0, 1.0, -3.0, -1.0};
  std::vector<double> q = pt.base.x;
  q.insert(q.end(), pt.base.y.begin(), pt.base.y.end());
  for (int i = 0; i < 4; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    CHECK(Y[ui] == doctest::Approx(diag[i] * q[ui]));
    CHECK(Y[4 + ui] == doctest::Approx(-diag[i] * pt.p[ui]));
  }
}

TEST_CASE("canonical lift matches the flow of the embedded group") {
  sampling::Rng rng(6);
  for (const CubicModel* model : {&e1(), &e2()}) {
    const int n = model->n();
    for (const auto& gen : model->affine_generators()) {
      auto pt = cmap::make_npoint(*model, sampling::n_chart(*model, rng));
      const Matrix<double> C = sg::generator_matrix(*model, gen);
      auto Y = cmap::canonical_lift(C, *model, pt);
      const double eps = 1e-5;
      auto point_at = [&](double e) {
        // Diagonal aut(H) generators exponentiate entrywise.
        Matrix<double> A = Matrix<double>::identity(model->m);
        if (gen.a.rows() > 0)
          for (int k = 0; k < model->m; ++k) A(k, k) = std::exp(e * gen.a(k, k));
        std::vector<double> v;
        for (double r : gen.v_rate) v.push_back(e * r);
        if (v.empty()) v.assign(static_cast<std::size_t>(model->m), 0.0);
        auto sym = sg::embed_affine_symmetry(*model, 1.0 + e * gen.lambda_rate, A, v);
        std::vector<double> q = pt.base.x;
        q.insert(q.end(), pt.base.y.begin(), pt.base.y.end());
        std::vector<double> out = sym.S * q;
        std::vector<double> pp = transpose(inverse(sym.S)) * pt.p;
        out.insert(out.end(), pp.begin(), pp.end());
        return out;
      };
      if (gen.a.rows() > 0) {
        bool diagonal = true;
        for (int i = 0; i < gen.a.rows(); ++i)
          for (int j = 0; j < gen.a.cols(); ++j)
            if (i != j && gen.a(i, j) != 0.0) diagonal = false;
        if (!diagonal) continue;
      }
      auto plus = point_at(eps), minus = point_at(-eps);
      double worst = 0.0;
      for (int k = 0; k < 4 * n; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        worst = std::max(worst, std::abs((plus[uk] - minus[uk]) / (2 * eps) - Y[uk]));
      }
      CHECK(worst < 1e-4);
    }
  }
}

TEST_CASE("moment map of canonical lifts") {
  sampling::Rng rng(7);
  for (const CubicModel* model : {&e1(), &e2()}) {
    for (std::size_t gi = 0; gi < model->affine_generators().size(); ++gi) {
      const Matrix<double> C = gen_C(*model, static_cast<int>(gi));
      auto Y = lift_field(*model, C);
      for (int i = 0; i < (model == &e1() ? 20 : 4); ++i) {
        auto x = sampling::n_chart(*model, rng);
        auto dmu = tl::derive_scalar(
            [model, &C](const auto& v) {
              using V = std::decay_t<decltype(v[0])>;
              return cmap::moment_lift_of(cmap::hk_state<V>(*model, std::span<const V>(v)), C);
            },
            x);
        auto wH = tl::TensorSample::from_matrix(cmap::kChartFrame, tl::kCovariant2, omega_H_chart(*model, x));
        auto iy = tl::interior(tl::evaluate(Y, x), wH);
        double res = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) res = std::max(res, std::abs(iy(static_cast<int>(k)) + dmu.gradient[k]));
        CHECK(res < 1e-9);

        // Homogeneity: (q, p) -> (2q, 2p) is r -> 2r, p -> 2p.
        auto x2 = x;
        x2[0] *= 2.0;
        for (std::size_t k = static_cast<std::size_t>(2 * model->n()); k < x.size(); ++k) x2[k] *= 2.0;
        auto p1 = cmap::make_npoint(*model, x), p2 = cmap::make_npoint(*model, x2);
        const double mu1 = cmap::moment_lift(C, *model, p1);
        CHECK(std::abs(cmap::moment_lift(C, *model, p2) - 4.0 * mu1) < 1e-12 * std::max(1.0, std::abs(mu1)));
      }
    }
  }
}

TEST_CASE("moment map of fiber translations") {
  sampling::Rng rng(8);
  for (const CubicModel* model : {&e1(), &e2()}) {
    const int n = model->n();
    for (int i = 0; i < 10; ++i) {
      auto x = sampling::n_chart(*model, rng);
      auto pt = cmap::make_npoint(*model, x);
      auto v = sampling::fiber(n, rng), w = sampling::fiber(n, rng);
      auto zero_p = cmap::make_npoint(pt.base, std::vector<double>(static_cast<std::size_t>(2 * n), 0.0));
      CHECK(cmap::moment_fiber(v, zero_p) == 0.0);
      std::vector<double> vw;
      for (std::size_t k = 0; k < v.size(); ++k) vw.push_back(2.0 * v[k] - 3.0 * w[k]);
      CHECK(std::abs(cmap::moment_fiber(vw, pt) - 2.0 * cmap::moment_fiber(v, pt) + 3.0 * cmap::moment_fiber(w, pt)) < 1e-14);
      auto pt2 = cmap::make_npoint(pt.base, std::vector<double>(pt.p.begin(), pt.p.end()));
      for (auto& y : pt2.p) y *= -2.5;
      CHECK(std::abs(cmap::moment_fiber(v, pt2) + 2.5 * cmap::moment_fiber(v, pt)) < 1e-14);

      auto V = fiber_vec_field(*model, v);
      auto dmu = tl::derive_scalar(
          [model, &v](const auto& u) {
            using T = std::decay_t<decltype(u[0])>;
            return cmap::moment_fiber_of(cmap::hk_state<T>(*model, std::span<const T>(u)), v);
          },
          x);
      auto wH = tl::TensorSample::from_matrix(cmap::kChartFrame, tl::kCovariant2, omega_H_chart(*model, x));
      auto iv = tl::interior(tl::evaluate(V, x), wH);
      for (std::size_t k = 0; k < x.size(); ++k) CHECK(std::abs(iv(static_cast<int>(k)) + dmu.gradient[k]) < 1e-11);
    }
  }
}

TEST_CASE("fiber translations") {
  sampling::Rng rng(9);
  auto pt = cmap::make_npoint(e2(), sampling::n_chart(e2(), rng));
  auto v = sampling::fiber(4, rng), w = sampling::fiber(4, rng);
  std::vector<double> zero(8, 0.0);
  CHECK(cmap::translate_fiber(zero, pt).p == pt.p);
  std::vector<double> vw;
  for (std::size_t k = 0; k < 8; ++k) vw.push_back(v[k] + w[k]);
  auto a = cmap::translate_fiber(v, cmap::translate_fiber(w, pt));
  auto b = cmap::translate_fiber(vw, pt);
  for (std::size_t k = 0; k < 8; ++k) CHECK(std::abs(a.p[k] - b.p[k]) < 1e-15);
  CHECK(a.base.chart() == pt.base.chart());
  CHECK(cmap::rotation_data(e2(), a, 0.3).fZ == cmap::rotation_data(e2(), pt, 0.3).fZ);
  auto h0 = cmap::hk_sample(e2(), pt), h1 = cmap::hk_sample(e2(), a);
  CHECK(max_abs_diff(h0.gN, h1.gN) == 0.0);
  CHECK(max_abs_diff(h0.omega2, h1.omega2) == 0.0);
}

TEST_CASE("equivariance of lift moment maps and the fiber obstruction") {
  sampling::Rng rng(10);
  for (const CubicModel* model : {&e1(), &e2()}) {
    const int n = model->n();
    const auto gens = model->affine_generators();
    const Matrix<double> OmInv = cmap::flat_omega_inv<double>(n);
    for (std::size_t i = 0; i < gens.size(); ++i)
      for (std::size_t j = i + 1; j < gens.size(); ++j) {
        const Matrix<double> A = gen_C(*model, static_cast<int>(i)), B = gen_C(*model, static_cast<int>(j));
        auto x = sampling::n_chart(*model, rng);
        auto pt = cmap::make_npoint(*model, x);
        auto br = tl::bracket(lift_field(*model, A), lift_field(*model, B), x);
        // [Y_A, Y_B] = Y_{BA - AB}
        const Matrix<double> K = B * A - A * B;
        auto want = tl::evaluate(lift_field(*model, K), x);
        CHECK(tensor_diff(br, want) < 1e-9 * std::max(1.0, want.max_abs()));
        auto Y1 = cmap::canonical_lift(A, *model, pt), Y2 = cmap::canonical_lift(B, *model, pt);
        const double wH = bilinear(Y1, cmap::omega_H_block<double>(n), Y2);
        CHECK(std::abs(wH - cmap::moment_lift(K, *model, pt)) < 1e-9 * std::max(1.0, std::abs(wH)));
      }
    auto x = sampling::n_chart(*model, rng);
    auto pt = cmap::make_npoint(*model, x);
    auto v = sampling::fiber(n, rng), w = sampling::fiber(n, rng);
    auto V = cmap::fiber_field_of(cmap::hk_state<double>(*model, std::span<const double>(x)), v);
    auto W = cmap::fiber_field_of(cmap::hk_state<double>(*model, std::span<const double>(x)), w);
    const double wvw = bilinear(V, cmap::omega_H_block<double>(n), W);
    CHECK(wvw == doctest::Approx(bilinear(v, OmInv, w)).epsilon(1e-15));
    CHECK(std::abs(wvw) > 1e-3);
  }
}

TEST_CASE("semidirect structure constants [Y_C, v] = (0, C^T v)") {
  sampling::Rng rng(11);
  for (const CubicModel* model : {&e1(), &e2()}) {
    const int n = model->n();
    for (std::size_t gi = 0; gi < model->affine_generators().size(); ++gi) {
      const Matrix<double> C = gen_C(*model, static_cast<int>(gi));
      auto x = sampling::n_chart(*model, rng);
      auto v = sampling::fiber(n, rng);
      auto br = tl::bracket(lift_field(*model, C), fiber_vec_field(*model, v), x);
      auto want = tl::evaluate(fiber_vec_field(*model, transpose(C) * v), x);
      CHECK(tensor_diff(br, want) < 1e-10);
    }
  }
}
