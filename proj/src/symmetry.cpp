#include "qklab/symmetry.hpp"

#include <algorithm>
#include <cmath>

namespace qklab::symmetry {

namespace tl = qklab::tensorlab;
namespace tw = qklab::twistqk;

double heis_pairing(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "pairing of covectors of different length");
  // -a^T omega^{-1} b = (a_x . b_y - a_y . b_x) / 2, antisymmetric bit for bit
  const std::size_t n = a.size() / 2;
  double x = 0.0, y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x += a[i] * b[n + i];
    y += a[n + i] * b[i];
  }
  return 0.5 * (x - y);
}

HeisElement heis_compose(const HeisElement& a, const HeisElement& b, Mode mode) {
  HeisElement out;
  out.alpha = a.alpha + b.alpha;
  out.tau = tw::normalize_angle(a.tau + b.tau + 0.5 * heis_pairing(a.alpha, b.alpha), mode);
  return out;
}

HeisElement heis_inverse(const HeisElement& a, Mode mode) {
  HeisElement out;
  out.alpha = -1.0 * a.alpha;
  out.tau = tw::normalize_angle(-a.tau, mode);
  return out;
}

sg::AffineSymmetry aff_compose(const sg::AffineSymmetry& h1, const sg::AffineSymmetry& h2) {
  sg::AffineSymmetry h;
  h.lambda = h1.lambda * h2.lambda;
  h.A = h1.A * h2.A;
  h.v = h2.v + (h2.lambda * h2.lambda) * (inverse(h2.A) * h1.v);
  h.L = h1.L * h2.L;
  h.S = h1.S * h2.S;
  return h;
}

sg::AffineSymmetry aff_inverse(const sg::AffineSymmetry& h) {
  sg::AffineSymmetry out;
  out.lambda = 1.0 / h.lambda;
  out.A = inverse(h.A);
  out.v = (-1.0 / (h.lambda * h.lambda)) * (h.A * h.v);
  out.L = inverse(h.L);
  out.S = inverse(h.S);
  return out;
}

GroupElement identity_element(const CubicModel& model, Mode mode) {
  return heis_element(model, std::vector<double>(static_cast<std::size_t>(2 * model.n()), 0.0), 0.0, mode);
}

GroupElement make_element(const CubicModel& model, double lambda, const Matrix<double>& A, std::vector<double> v,
                          std::vector<double> alpha, double tau, Mode mode) {
  if (static_cast<int>(alpha.size()) != 2 * model.n()) throw Error(ErrorKind::DimensionMismatch, "alpha has 2n entries");
  GroupElement g;
  g.aff = sg::embed_affine_symmetry(model, lambda, A, std::move(v));
  g.heis = {std::move(alpha), tw::normalize_angle(tau, mode)};
  g.mode = mode;
  return g;
}

GroupElement heis_element(const CubicModel& model, std::vector<double> alpha, double tau, Mode mode) {
  GroupElement g;
  g.aff = sg::identity_symmetry(model);
  if (static_cast<int>(alpha.size()) != 2 * model.n()) throw Error(ErrorKind::DimensionMismatch, "alpha has 2n entries");
  g.heis = {std::move(alpha), tw::normalize_angle(tau, mode)};
  g.mode = mode;
  return g;
}

GroupElement compose(const GroupElement& g1, const GroupElement& g2) {
  if (g1.mode != g2.mode) throw Error(ErrorKind::ModeMismatch, "composing circle-mode and cover-mode elements");
  GroupElement g;
  g.mode = g1.mode;
  g.aff = aff_compose(g1.aff, g2.aff);
  const HeisElement k1{transpose(g2.aff.S) * g1.heis.alpha, g1.heis.tau};
  g.heis = heis_compose(k1, g2.heis, g.mode);
  return g;
}

GroupElement inverse(const GroupElement& g) {
  // (h, k)^{-1} = (h^{-1}, h . k^{-1}), h . (a, t) = (S^{-T} a, t)
  GroupElement out;
  out.mode = g.mode;
  out.aff = aff_inverse(g.aff);
  const HeisElement kinv = heis_inverse(g.heis, g.mode);
  out.heis = {transpose(inverse(g.aff.S)) * kinv.alpha, kinv.tau};
  return out;
}

GroupElement random_element(const CubicModel& model, std::mt19937_64& rng, Mode mode) {
  std::uniform_real_distribution<double> lam(0.8, 1.25), unit(-1.0, 1.0), small(-0.3, 0.3), angle(0.0, 2.0 * sg::kPi);
  const int m = model.m;
  Matrix<double> A = Matrix<double>::identity(m);
  if (!model.aut_generators.empty()) {
    std::uniform_int_distribution<int> len(0, 3);
    std::uniform_int_distribution<std::size_t> pick(0, model.aut_generators.size() - 1);
    const int L = len(rng);
    for (int k = 0; k < L; ++k) A = A * model.aut_generators[pick(rng)];
  }
  for (const Matrix<double>& a : model.aut_algebra) {
    const double coef = small(rng);
    Matrix<double> e = Matrix<double>::identity(m);
    bool diagonal = true;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (i != j && a(i, j) != 0.0) diagonal = false;
    if (!diagonal) continue;
    for (int i = 0; i < m; ++i) e(i, i) = std::exp(coef * a(i, i));
    A = A * e;
  }
  const double lambda = lam(rng);
  std::vector<double> v;
  for (int a = 0; a < m; ++a) v.push_back(0.5 * unit(rng));
  std::vector<double> alpha;
  for (int i = 0; i < 2 * model.n(); ++i) alpha.push_back(unit(rng));
  const double tau = angle(rng);
  return make_element(model, lambda, A, std::move(v), std::move(alpha), tau, mode);
}

tw::PPoint act_P(const CubicModel& model, const GroupElement& g, const tw::PPoint& pp) {
  const std::vector<double>& p = pp.n_point.p;
  const double s1 = pp.s + g.heis.tau + 0.5 * heis_pairing(g.heis.alpha, p);
  const std::vector<double> p1 = p + g.heis.alpha;
  const std::vector<double> p2 = transpose(inverse(g.aff.S)) * p1;

  std::vector<std::complex<double>> X;
  for (const auto& z : pp.n_point.base.X) X.push_back(z);
  std::vector<std::complex<double>> X2(X.size(), 0.0);
  for (int i = 0; i < g.aff.L.rows(); ++i)
    for (int j = 0; j < g.aff.L.cols(); ++j) X2[static_cast<std::size_t>(i)] += g.aff.L(i, j) * X[static_cast<std::size_t>(j)];
  sg::CaskPoint base;
  try {
    base = sg::cask_point_from_X(model, X2);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::OutsideCone) throw Error(ErrorKind::LeftDomain, "image base point has t outside U");
    throw;
  }
  return {cmap::make_npoint(std::move(base), p2), tw::normalize_angle(s1, g.mode)};
}

tw::QKPoint act_Nbar(const CubicModel& model, const GroupElement& g, const tw::QKPoint& qk) {
  const tw::PPoint img = act_P(model, g, tw::to_ppoint(model, qk));
  if (std::abs(img.n_point.base.phi) > 1e-12)
    throw Error(ErrorKind::PhiViolation, "image has arg X^0 = " + std::to_string(img.n_point.base.phi));
  tw::QKPoint out;
  out.r = img.n_point.base.r;
  out.b = img.n_point.base.b;
  out.t = img.n_point.base.t;
  out.p = img.n_point.p;
  out.s = img.s;
  return out;
}

IsometryReport isometry_report(const CubicModel& model, const GroupElement& g, double c,
                               const std::vector<tw::QKPoint>& sample) {
  IsometryReport rep;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const std::vector<double> x = sample[i].chart();
    tl::JacobianSample js;
    std::vector<double> g_img;
    try {
      js = tl::jacobian([&](const auto& v) {
        using V = std::decay_t<decltype(v[0])>;
        return act_nbar_chart<V>(model, g, std::span<const V>(v));
      }, x);
      g_img = tw::qk_metric_components<double>(model, std::span<const double>(js.value), c);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::OutsideOneLoopDomain || e.kind() == ErrorKind::OutsideCone ||
          e.kind() == ErrorKind::LeftDomain) {
        ++rep.skipped;
        continue;
      }
      throw;
    }
    const std::vector<double> g_src = tw::qk_metric_components<double>(model, std::span<const double>(x), c);
    const int d = static_cast<int>(x.size());
    Matrix<double> Gi(d, d), Gs(d, d);
    Gi.data() = g_img;
    Gs.data() = g_src;
    const Matrix<double> diff = transpose(js.jacobian) * Gi * js.jacobian - Gs;
    double res = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) res = std::max(res, std::abs(diff(a, b)) / std::sqrt(Gs(a, a) * Gs(b, b)));
    ++rep.checked;
    if (res > rep.max_residual || rep.worst_point < 0) {
      rep.max_residual = std::max(rep.max_residual, res);
      rep.worst_point = static_cast<int>(i);
    }
  }
  return rep;
}

double displacement(const tw::QKPoint& a, const tw::QKPoint& b, Mode mode) {
  const std::vector<double> x = a.chart(), y = b.chart();
  double d = 0.0;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) d = std::max(d, std::abs(x[k] - y[k]));
  double ds = std::abs(x.back() - y.back());
  if (mode == Mode::Circle) ds = std::min(ds, 2.0 * sg::kPi - ds);
  return std::max(d, ds);
}

bool EffectivenessReport::pass() const {
  return trials > 0 && moved == trials && min_max_displacement > 1e-9 && f_element_circle < 1e-12 &&
         f_element_cover > 1e-9 && std::abs(half_turn_min_shift - sg::kPi) < 1e-12;
}

EffectivenessReport effectiveness_check(const CubicModel& model, double c, int trials,
                                        const std::vector<tw::QKPoint>& sample, std::mt19937_64& rng) {
  (void)c;
  EffectivenessReport rep;
  for (int k = 0; k < trials; ++k) {
    const GroupElement g = random_element(model, rng, Mode::Circle);
    double worst = 0.0;
    for (const auto& qk : sample) worst = std::max(worst, displacement(act_Nbar(model, g, qk), qk, Mode::Circle));
    ++rep.trials;
    if (worst > 1e-9) ++rep.moved;
    rep.min_max_displacement = std::min(rep.min_max_displacement, worst);
  }
  const std::vector<double> zero(static_cast<std::size_t>(2 * model.n()), 0.0);
  const GroupElement f_circle = heis_element(model, zero, 2.0 * sg::kPi, Mode::Circle);
  const GroupElement f_cover = heis_element(model, zero, 2.0 * sg::kPi, Mode::Cover);
  const GroupElement half = heis_element(model, zero, sg::kPi, Mode::Circle);
  rep.f_element_cover = 1e300;
  rep.half_turn_min_shift = 1e300;
  for (const auto& qk : sample) {
    rep.f_element_circle = std::max(rep.f_element_circle, displacement(act_Nbar(model, f_circle, qk), qk, Mode::Circle));
    rep.f_element_cover = std::min(rep.f_element_cover, displacement(act_Nbar(model, f_cover, qk), qk, Mode::Cover));
    rep.half_turn_min_shift = std::min(rep.half_turn_min_shift, displacement(act_Nbar(model, half, qk), qk, Mode::Circle));
  }
  return rep;
}

AlgebraElement algebra_from_generator(const CubicModel& model, const AffineGenerator& gen) {
  return {sg::generator_matrix(model, gen), {}, 0.0};
}

AlgebraElement algebra_fiber(std::vector<double> v) { return {Matrix<double>(), std::move(v), 0.0}; }

AlgebraElement algebra_central(double z) { return {Matrix<double>(), {}, z}; }

std::vector<double> induced_killing(const CubicModel& model, const AlgebraElement& gen, const tw::QKPoint& qk, double c) {
  const std::vector<double> v = qk.chart();
  return induced_killing_of<double>(model, gen, std::span<const double>(v), c);
}

}  // namespace qklab::symmetry
