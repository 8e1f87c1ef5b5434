#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "qklab/special_geometry.hpp"

using namespace qklab;
using cd = std::complex<double>;
namespace tl = qklab::tensorlab;

namespace {

const CubicModel& e1() {
  static const CubicModel m = builtin_model("E1");
  return m;
}
const CubicModel& e2() {
  static const CubicModel m = builtin_model("E2");
  return m;
}

// Second derivatives of F = -C/X0 with C = (1/6) k X X X written out by hand.
Matrix<cd> tau_closed_form(const CubicModel& model, const std::vector<cd>& X) {
  const int m = model.m;
  const int n = m + 1;
  cd C = 0.0;
  std::vector<cd> Ca(static_cast<std::size_t>(m), 0.0);
  Matrix<cd> Cab(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        const double k = model.k(a, b, c);
        const cd xa = X[static_cast<std::size_t>(a + 1)], xb = X[static_cast<std::size_t>(b + 1)],
                 xc = X[static_cast<std::size_t>(c + 1)];
        C += k * xa * xb * xc / 6.0;
        Ca[static_cast<std::size_t>(a)] += 0.5 * k * xb * xc;
        Cab(a, b) += k * xc;
      }
  const cd X0 = X[0];
  Matrix<cd> tau(n, n);
  tau(0, 0) = -2.0 * C / (X0 * X0 * X0);
  for (int a = 0; a < m; ++a) {
    tau(0, a + 1) = tau(a + 1, 0) = Ca[static_cast<std::size_t>(a)] / (X0 * X0);
    for (int b = 0; b < m; ++b) tau(a + 1, b + 1) = -Cab(a, b) / X0;
  }
  return tau;
}

std::vector<double> random_chart(const CubicModel& model, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> r(0.5, 2.0), phi(-3.0, 3.0), b(-1.0, 1.0);
  std::vector<double> u{r(rng), phi(rng)};
  for (int a = 0; a < model.m; ++a) u.push_back(b(rng));
  for (int a = 0; a < model.m; ++a) {
    std::uniform_real_distribution<double> t(model.t_lo[static_cast<std::size_t>(a)], model.t_hi[static_cast<std::size_t>(a)]);
    u.push_back(t(rng));
  }
  return u;
}

auto chart_metric_field(const CubicModel& model) {
  return tl::make_field("cask-chart", tl::kCovariant2, 2 * model.n(), [&model](const auto& u) {
    using V = std::decay_t<decltype(u[0])>;
    return sg::chart_metric<V>(model, u);
  });
}

}  // namespace

TEST_CASE("eval_h") {
  std::vector<double> one{1.0}, two{2.0}, ones{1.0, 1.0, 1.0};
  CHECK(sg::eval_h(e1(), one) == 1.0);
  CHECK(sg::eval_h(e1(), two) == 8.0);
  CHECK(sg::eval_h(e2(), ones) == 1.0);
}

TEST_CASE("psk metric of h = t^3") {
  std::vector<double> b{0.0}, t1{1.0}, t2{2.0}, b2{0.6};
  auto g1 = sg::psk_metric(e1(), b, t1);
  CHECK(g1(0, 0) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(g1(1, 1) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(g1(0, 1) == 0.0);
  auto g2 = sg::psk_metric(e1(), b, t2);
  CHECK(g2(0, 0) == doctest::Approx(3.0 / 16.0).epsilon(1e-14));
  CHECK(tl::max_abs_diff(sg::psk_metric(e1(), b2, t2), g2) == 0.0);
  std::vector<double> bad{-1.0};
  CHECK_THROWS_AS(sg::psk_metric(e1(), b, bad), Error);
}

TEST_CASE("psk metric is positive definite on U") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    auto u = random_chart(e2(), rng);
    std::vector<double> b(u.begin() + 2, u.begin() + 5), t(u.begin() + 5, u.end());
    auto ev = symmetric_eigenvalues(sg::psk_metric(e2(), b, t).matrix());
    CHECK(*std::min_element(ev.begin(), ev.end()) > 0.0);
  }
}

TEST_CASE("psr automorphisms") {
  CHECK(sg::check_psr_automorphism(e2(), Matrix<double>::identity(3)).ok);
  CHECK(sg::check_psr_automorphism(e2(), e2().aut_generators[0]).ok);
  Matrix<double> two(1, 1);
  two(0, 0) = 2.0;
  auto r = sg::check_psr_automorphism(e1(), two);
  CHECK_FALSE(r.ok);
  CHECK(r.residual == doctest::Approx(7.0 * e1().k(0, 0, 0) / 6.0));
  Matrix<double> zero(1, 1);
  CHECK_THROWS_AS(sg::check_psr_automorphism(e1(), zero), Error);
}

TEST_CASE("prepotential values and homogeneity") {
  std::vector<cd> X{1.0, cd(0.0, 1.0)};
  cd F = sg::prepotential(e1(), X);
  CHECK(F.real() == doctest::Approx(0.0));
  CHECK(F.imag() == doctest::Approx(1.0));
  std::vector<cd> X0{1.0, 0.0};
  CHECK(std::abs(sg::prepotential(e1(), X0)) == 0.0);
  std::vector<cd> Y{cd(0.7, -0.3), cd(0.2, 1.1), cd(-0.4, 0.9), cd(1.3, 0.5)};
  std::vector<cd> Y2;
  for (auto z : Y) Y2.push_back(2.0 * z);
  CHECK(std::abs(sg::prepotential(e2(), Y2) - 4.0 * sg::prepotential(e2(), Y)) < 1e-13);
  std::vector<cd> pole{0.0, 1.0};
  try {
    sg::prepotential(e1(), pole);
    FAIL("expected pole");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PoleOfPrepotential);
  }
}

TEST_CASE("tau at the E1 spot point") {
  std::vector<cd> X{1.0, cd(0.0, 1.0)};
  auto info = sg::tau_and_validity(e1(), X);
  CHECK(std::abs(info.tau(0, 0).imag() - 2.0) < 1e-12);
  CHECK(std::abs(info.tau(1, 1).imag() + 6.0) < 1e-12);
  CHECK(std::abs(info.tau(0, 1).imag()) < 1e-12);
  CHECK(info.positive == 1);
  CHECK(info.negative == 1);
  CHECK(info.hermitian == doctest::Approx(-4.0));
  CHECK(info.valid());
}

TEST_CASE("tau agrees with closed-form second derivatives, is symmetric and degree 0") {
  std::mt19937_64 rng(11);
  for (const CubicModel* model : {&e1(), &e2()}) {
    for (int i = 0; i < 10; ++i) {
      auto u = random_chart(*model, rng);
      auto pt = sg::make_cask_point(*model, u);
      auto info = sg::tau_and_validity(*model, pt.X);
      auto oracle = tau_closed_form(*model, pt.X);
      std::vector<cd> X2;
      for (auto z : pt.X) X2.push_back(2.0 * z);
      auto info2 = sg::tau_and_validity(*model, X2);
      for (int a = 0; a < model->n(); ++a)
        for (int b = 0; b < model->n(); ++b) {
          CHECK(std::abs(info.tau(a, b) - oracle(a, b)) < 1e-12 * std::max(1.0, std::abs(oracle(a, b))));
          CHECK(info.tau(a, b) == info.tau(b, a));
          CHECK(std::abs(info2.tau(a, b) - info.tau(a, b)) < 1e-12 * std::max(1.0, std::abs(info.tau(a, b))));
        }
      CHECK(info.valid());
    }
  }
}

TEST_CASE("sign-flipped cubic violates the negativity condition") {
  CubicModel bad = builtin_model("E1");
  bad.terms[0].k = -6.0;
  std::vector<cd> X{1.0, cd(0.0, 1.0)};
  auto info = sg::tau_and_validity(bad, X);
  CHECK_FALSE(info.negativity_ok);
  CHECK_FALSE(info.valid());
}

TEST_CASE("Kaehler potential and the affine frame") {
  std::vector<cd> X{1.0, cd(0.0, 1.0)};
  auto pt = sg::cask_point_from_X(e1(), X);
  auto ct = sg::cask_tensors(e1(), pt);
  CHECK(ct.f == doctest::Approx(-4.0).epsilon(1e-14));
  // f = g(xi, xi) / 2
  CHECK(0.5 * bilinear(ct.xi, ct.g, ct.xi) == doctest::Approx(ct.f).epsilon(1e-13));

  auto ac = sg::affine_coords(e1(), X);
  CHECK(ac.x[0] == doctest::Approx(1.0));
  CHECK(std::abs(ac.x[1]) < 1e-15);
  CHECK(std::abs(ac.y[0]) < 1e-15);
  CHECK(ac.y[1] == doctest::Approx(-3.0));
  std::vector<cd> Xr{1.0, 0.0};
  auto a0 = sg::affine_coords(e1(), Xr);
  CHECK(a0.y[0] == 0.0);
  CHECK(a0.y[1] == 0.0);

  std::vector<cd> Xm{1.7, cd(0.0, 1.7)};
  auto ptm = sg::cask_point_from_X(e1(), Xm);
  CHECK(sg::cask_tensors(e1(), ptm).f == doctest::Approx(1.7 * 1.7 * -4.0).epsilon(1e-13));
}

TEST_CASE("CASK tensor invariants and flat omega") {
  std::mt19937_64 rng(3);
  for (const CubicModel* model : {&e1(), &e2()}) {
    const int n = model->n();
    const Matrix<double> om0 = sg::flat_omega(*model);
    CHECK(sg::measure_kappa(*model) == doctest::Approx(2.0).epsilon(1e-12));
    for (int i = 0; i < 20; ++i) {
      auto pt = sg::make_cask_point(*model, random_chart(*model, rng));
      auto ct = sg::cask_tensors(*model, pt);
      const auto I = Matrix<double>::identity(2 * n);
      CHECK(max_abs_diff(ct.J * ct.J, -I) < 1e-11);
      CHECK(max_abs_diff(transpose(ct.J) * ct.g * ct.J, ct.g) < 1e-11 * max_abs(ct.g));
      CHECK(max_abs_diff(ct.omega, om0) < 1e-10);
      CHECK(ct.f < 0.0);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          CHECK(std::abs(ct.omega(a, b)) < 1e-10);
          CHECK(std::abs(ct.omega(n + a, n + b)) < 1e-10);
        }
      CHECK(condition_number(pt.J_chart_to_affine) < 1e12);
    }
  }
}

TEST_CASE("conical identities: L_xi g = 2g, L_Jxi g = 0, df = -omega(Jxi, .)") {
  std::mt19937_64 rng(23);
  for (const CubicModel* model : {&e1(), &e2()}) {
    const int d = 2 * model->n();
    auto g = chart_metric_field(*model);
    auto xi = tl::make_field("cask-chart", tl::kVector, d, [model](const auto& u) {
      using V = std::decay_t<decltype(u[0])>;
      return sg::chart_xi<V>(*model, u);
    });
    auto jxi = tl::make_field("cask-chart", tl::kVector, d, [model](const auto& u) {
      using V = std::decay_t<decltype(u[0])>;
      return sg::chart_Jxi<V>(*model, u);
    });
    for (int i = 0; i < 5; ++i) {
      auto u = random_chart(*model, rng);
      auto gu = tl::evaluate(g, u);
      auto Lxi = tl::lie_derivative(xi, g, u);
      double res = 0.0;
      for (std::size_t k = 0; k < gu.components.size(); ++k)
        res = std::max(res, std::abs(Lxi.components[k] - 2.0 * gu.components[k]));
      CHECK(res < 1e-9 * std::max(1.0, gu.max_abs()));
      CHECK(tl::lie_derivative(jxi, g, u).max_abs() < 1e-9 * std::max(1.0, gu.max_abs()));

      auto fjet = tl::derive_scalar(
          [model](const auto& v) {
            using V = std::decay_t<decltype(v[0])>;
            return sg::cask_state<V>(*model, v).f;
          },
          u);
      auto om = tl::TensorSample::from_vector("cask-chart", tl::kCovariant2, sg::chart_omega<double>(*model, u));
      CHECK(om.dim == d);
      auto jx = tl::evaluate(jxi, u);
      auto contraction = tl::interior(jx, om);
      for (int k = 0; k < d; ++k)
        CHECK(std::abs(fjet.gradient[static_cast<std::size_t>(k)] + contraction(k)) < 1e-9);
    }
  }
}

TEST_CASE("affine symmetry embedding: identity and E1 scaling") {
  auto id = sg::identity_symmetry(e1());
  CHECK(max_abs_diff(id.L, Matrix<double>::identity(2)) == 0.0);
  CHECK(max_abs_diff(id.S, Matrix<double>::identity(4)) == 0.0);

  Matrix<double> A1 = Matrix<double>::identity(1);
  auto sc = sg::embed_affine_symmetry(e1(), 2.0, A1, {0.0});
  CHECK(sc.L(0, 0) == 8.0);
  CHECK(sc.L(1, 1) == 2.0);
  const double diag[] = {8.0, 2.0, 1.0 / 8.0, 0.5};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(sc.S(i, j) == (i == j ? diag[i] : 0.0));
}

TEST_CASE("E1 translation embeds as a symplectic unipotent matrix") {
  auto tr = sg::embed_affine_symmetry(e1(), 1.0, Matrix<double>::identity(1), {1.0});
  const Matrix<double> om = sg::flat_omega(e1());
  CHECK(max_abs_diff(transpose(tr.S) * om * tr.S, om) < 1e-11);
  // (S - I)^4 = 0 certifies unipotence exactly.
  Matrix<double> N = tr.S - Matrix<double>::identity(4);
  CHECK(max_abs(N * N * N * N) < 1e-12);
}

TEST_CASE("affine coordinates transform linearly under L") {
  std::mt19937_64 rng(8);
  auto sym = sg::embed_affine_symmetry(e2(), 1.3, e2().aut_generators[0], {0.2, -0.5, 0.4});
  for (int i = 0; i < 2; ++i) {
    auto pt = sg::make_cask_point(e2(), random_chart(e2(), rng));
    std::vector<cd> LX(4, 0.0);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) LX[static_cast<std::size_t>(a)] += sym.L(a, b) * pt.X[static_cast<std::size_t>(b)];
    auto img = sg::affine_coords(e2(), LX);
    std::vector<double> q = pt.x;
    q.insert(q.end(), pt.y.begin(), pt.y.end());
    auto Sq = sym.S * q;
    for (int a = 0; a < 4; ++a) {
      CHECK(std::abs(img.x[static_cast<std::size_t>(a)] - Sq[static_cast<std::size_t>(a)]) < 1e-11);
      CHECK(std::abs(img.y[static_cast<std::size_t>(a)] - Sq[static_cast<std::size_t>(4 + a)]) < 1e-11);
    }
  }
}

TEST_CASE("embedding rejects non-automorphisms") {
  Matrix<double> A(1, 1);
  A(0, 0) = 2.0;
  try {
    sg::embed_affine_symmetry(e1(), 1.0, A, {0.0});
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotAutomorphism);
  }
  CHECK_THROWS_AS(sg::embed_affine_symmetry(e1(), -1.0, Matrix<double>::identity(1), {0.0}), Error);
}

TEST_CASE("CASK automorphism checks") {
  std::mt19937_64 rng(99);
  std::vector<sg::CaskPoint> pts;
  for (int i = 0; i < 10; ++i) pts.push_back(sg::make_cask_point(e1(), random_chart(e1(), rng)));
  CHECK(sg::check_cask_automorphism(e1(), sg::identity_symmetry(e1()), pts).worst() < 1e-13);
  auto sc = sg::embed_affine_symmetry(e1(), 2.0, Matrix<double>::identity(1), {0.0});
  auto tr = sg::embed_affine_symmetry(e1(), 1.0, Matrix<double>::identity(1), {0.7});
  auto rs = sg::check_cask_automorphism(e1(), sc, pts);
  auto rt = sg::check_cask_automorphism(e1(), tr, pts);
  CHECK(rs.worst() < 1e-10);
  CHECK(rt.worst() < 1e-10);
  CHECK(rs.points == 10);

  std::vector<sg::CaskPoint> pts2;
  for (int i = 0; i < 5; ++i) pts2.push_back(sg::make_cask_point(e2(), random_chart(e2(), rng)));
  auto perm = sg::embed_affine_symmetry(e2(), 0.8, e2().aut_generators[1], {0.3, 0.1, -0.2});
  CHECK(sg::check_cask_automorphism(e2(), perm, pts2).worst() < 1e-10);
}

TEST_CASE("infinitesimal generators") {
  auto gens = e1().affine_generators();
  Matrix<double> C = sg::generator_matrix(e1(), gens[0]);
  const double diag[] = {3.0, 1.0, -3.0, -1.0};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(C(i, j) == (i == j ? diag[i] : 0.0));
  // Every generator is infinitesimally symplectic: C^T om + om C = 0.
  for (const CubicModel* model : {&e1(), &e2()}) {
    const Matrix<double> om = sg::flat_omega(*model);
    for (const auto& g : model->affine_generators()) {
      Matrix<double> Cg = sg::generator_matrix(*model, g);
      CHECK(max_abs(transpose(Cg) * om + om * Cg) < 1e-11);
    }
  }
}

TEST_CASE("generator matches a finite difference of the embedding") {
  auto g = e1().affine_generators()[1];  // translation
  Matrix<double> C = sg::generator_matrix(e1(), g);
  const double h = 1e-6;
  auto plus = sg::embed_affine_symmetry(e1(), 1.0, Matrix<double>::identity(1), {h});
  auto minus = sg::embed_affine_symmetry(e1(), 1.0, Matrix<double>::identity(1), {-h});
  Matrix<double> fd = (1.0 / (2 * h)) * (plus.S - minus.S);
  CHECK(max_abs_diff(C, fd) < 1e-6);
}

TEST_CASE("model files round-trip through JSON") {
  std::string text = model_to_json_text(e2());
  CubicModel back = model_from_json_text(text);
  CHECK(back.m == 3);
  CHECK(back.k(2, 0, 1) == 1.0);
  CHECK(back.aut_generators.size() == 2);
  CHECK_THROWS_AS(model_from_json_text("{not json"), Error);
  CHECK_THROWS_AS(model_from_json_text(R"({"m": 1, "k": [], "t_box": {"lo": [0.5], "hi": [2]}})"), Error);
}
