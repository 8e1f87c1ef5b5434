#pragma once

// Aff_H(R^{n-1}) x| (Heis_{2n+1} / F) as exact elements, their action on P
// and on Nbar, and the induced Killing fields of the infinitesimal action.
//
// An element (h, k) acts as x -> h(k(x)). Heisenberg pairing on covectors:
// B(a, b) = -a^T omega^{-1} b.

#include <random>
#include <span>
#include <string>
#include <vector>

#include "qklab/twistqk.hpp"

namespace qklab::symmetry {

using twistqk::Mode;

struct HeisElement {
  std::vector<double> alpha;
  double tau = 0.0;
};

struct GroupElement {
  sg::AffineSymmetry aff;
  HeisElement heis;
  Mode mode = Mode::Circle;
};

double heis_pairing(std::span<const double> a, std::span<const double> b);

HeisElement heis_compose(const HeisElement& a, const HeisElement& b, Mode mode);
HeisElement heis_inverse(const HeisElement& a, Mode mode);

sg::AffineSymmetry aff_compose(const sg::AffineSymmetry& h1, const sg::AffineSymmetry& h2);
sg::AffineSymmetry aff_inverse(const sg::AffineSymmetry& h);

GroupElement identity_element(const CubicModel& model, Mode mode = Mode::Circle);
GroupElement make_element(const CubicModel& model, double lambda, const Matrix<double>& A, std::vector<double> v,
                          std::vector<double> alpha, double tau, Mode mode = Mode::Circle);
GroupElement heis_element(const CubicModel& model, std::vector<double> alpha, double tau, Mode mode = Mode::Circle);

/// (h1 h2, (h2^{-1} . k1) k2) with h^{-1} . (a, t) = (S^T a, t).
GroupElement compose(const GroupElement& g1, const GroupElement& g2);
GroupElement inverse(const GroupElement& g);

/// Seeded random element: lambda in [0.8, 1.25], A a word in the model's
/// automorphism generators times exp of a small aut(H) element, v in [-0.5, 0.5]^m,
/// alpha in [-1, 1]^{2n}, tau in [0, 2 pi).
GroupElement random_element(const CubicModel& model, std::mt19937_64& rng, Mode mode = Mode::Circle);

twistqk::PPoint act_P(const CubicModel& model, const GroupElement& g, const twistqk::PPoint& pp);
/// Throws PhiViolation if the image leaves {phi = 0}, LeftDomain if t leaves U.
twistqk::QKPoint act_Nbar(const CubicModel& model, const GroupElement& g, const twistqk::QKPoint& qk);

/// Chart expression of act_Nbar without angle reduction, for differentiation.
template <class S>
std::vector<S> act_nbar_chart(const CubicModel& model, const GroupElement& g, std::span<const S> v) {
  const int n = model.n();
  const int m = model.m;
  const auto um = static_cast<std::size_t>(m);
  std::vector<S> u{v[0], S(0.0)};
  u.insert(u.end(), v.begin() + 1, v.begin() + 1 + static_cast<std::ptrdiff_t>(2 * um));
  std::vector<S> p(v.begin() + 1 + static_cast<std::ptrdiff_t>(2 * um), v.end() - 1);
  const S s = v.back();

  const Matrix<S> OmInv = cmap::flat_omega_inv<S>(n);
  const std::vector<S> alpha = cmap::promote<S>(g.heis.alpha);
  const S s1 = s + S(g.heis.tau) + S(-0.5) * bilinear(alpha, OmInv, p);
  const std::vector<S> p1 = p + alpha;
  const std::vector<S> p2 = cmap::promote<S>(transpose(inverse(g.aff.S))) * p1;

  const std::vector<sg::Cx<S>> X = sg::chart_to_X<S>(model, u);
  const std::vector<S> u2 = sg::X_to_chart<S>(model, sg::apply_L(cmap::promote<S>(g.aff.L), X));
  std::vector<S> out{u2[0]};
  out.insert(out.end(), u2.begin() + 2, u2.end());
  out.insert(out.end(), p2.begin(), p2.end());
  out.push_back(s1);
  return out;
}

struct IsometryReport {
  double max_residual = 0.0;
  int checked = 0;
  int skipped = 0;
  int worst_point = -1;
  bool pass(double tol = 1e-8) const { return checked > 0 && max_residual < tol; }
};

/// Residual max |(J^T g(g.x) J - g(x))_ab| / sqrt(g_aa g_bb) over the sample.
IsometryReport isometry_report(const CubicModel& model, const GroupElement& g, double c,
                               const std::vector<twistqk::QKPoint>& sample);

/// Displacement of a QK point, with s compared mod 2 pi in circle mode.
double displacement(const twistqk::QKPoint& a, const twistqk::QKPoint& b, Mode mode);

struct EffectivenessReport {
  int trials = 0;
  int moved = 0;                        ///< random non-identity elements moving some point > 1e-9
  double min_max_displacement = 1e300;  ///< over trials, of the max displacement over points
  double f_element_circle = 0.0;        ///< max displacement of tau = 2 pi, circle mode
  double f_element_cover = 0.0;         ///< min displacement of tau = 2 pi, cover mode
  double half_turn_min_shift = 0.0;     ///< min s-displacement of tau = pi, circle mode
  bool pass() const;
};

EffectivenessReport effectiveness_check(const CubicModel& model, double c, int trials,
                                        const std::vector<twistqk::QKPoint>& sample, std::mt19937_64& rng);

/// Infinitesimal element: canonical-lift matrix C (2n x 2n, or empty), fiber
/// vector v (2n, or empty) and central coefficient z.
struct AlgebraElement {
  Matrix<double> C;
  std::vector<double> v;
  double z = 0.0;
};

AlgebraElement algebra_from_generator(const CubicModel& model, const AffineGenerator& gen);
AlgebraElement algebra_fiber(std::vector<double> v);
AlgebraElement algebra_central(double z = 1.0);

/// V_Q = d pi_Nbar (V^) at an Nbar chart point.
template <class S>
std::vector<S> induced_killing_of(const CubicModel& model, const AlgebraElement& gen, std::span<const S> v, double c) {
  const std::vector<S> w = twistqk::nbar_to_p<S>(v);
  const twistqk::TwistState<S> st = twistqk::twist_state<S>(model, std::span<const S>(w), c);
  const std::size_t dN = static_cast<std::size_t>(4 * st.n);
  std::vector<S> V(dN, S(0.0));
  S mu(0.0);
  if (gen.C.rows() > 0) {
    V = V + cmap::canonical_lift_of(st.hk, gen.C);
    mu += cmap::moment_lift_of(st.hk, gen.C);
  }
  if (!gen.v.empty()) {
    V = V + cmap::fiber_field_of(st.hk, gen.v);
    mu += cmap::moment_fiber_of(st.hk, gen.v);
  }
  std::vector<S> hat = twistqk::lift_hat_of(st, V, mu);
  hat[dN] += S(gen.z);
  return twistqk::project_to_nbar_of(st, hat);
}

std::vector<double> induced_killing(const CubicModel& model, const AlgebraElement& gen, const twistqk::QKPoint& qk,
                                    double c);

inline auto induced_field(const CubicModel& model, const AlgebraElement& gen, double c) {
  return tensorlab::make_field(twistqk::kNbarFrame, tensorlab::kVector, 4 * model.n(), [&model, gen, c](const auto& v) {
    using V = std::decay_t<decltype(v[0])>;
    return induced_killing_of<V>(model, gen, std::span<const V>(v), c);
  });
}

}  // namespace qklab::symmetry
