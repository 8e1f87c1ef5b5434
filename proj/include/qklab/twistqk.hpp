#pragma once

// HK/QK twist: the circle bundle P = N x S^1 with connection eta, lifts of
// vector fields, the tensors g_P, theta_j, g~_P, the hypersurface
// Nbar = {arg X^0 = 0} and the one-loop deformed metric g^c on it.
//
// Frames:
//   "P-affine": (q, p, s), 4n+1 components;
//   "P-chart":  (r, phi, b, t, p, s);
//   "Nbar-chart": (r, b, t, p, s), 4n components (phi = 0).

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "qklab/cmap.hpp"

namespace qklab::twistqk {

inline const std::string kPAffineFrame = "P-affine";
inline const std::string kPChartFrame = "P-chart";
inline const std::string kNbarFrame = "Nbar-chart";

enum class Mode { Circle, Cover };

/// Twist data at a P-chart point, tensors in the P-affine frame.
template <class S>
struct TwistState {
  int n = 0;
  double c = 0.0;
  cmap::HKState<S> hk;
  S s;
  S fZ;
  S fH;
  std::vector<S> eta;
  std::array<std::vector<S>, 4> theta;
  Matrix<S> gP;
  Matrix<S> gtilde;
  std::vector<S> ZP;

  int dim() const { return 4 * n + 1; }
};

/// eta restricted to N-directions applied to an N-affine vector.
template <class S>
S eta_of(const TwistState<S>& st, const std::vector<S>& V) {
  S sum(0.0);
  for (std::size_t i = 0; i < V.size(); ++i) sum += st.eta[i] * V[i];
  return sum;
}

template <class S>
std::vector<S> extend(const std::vector<S>& v, const S& last) {
  std::vector<S> out = v;
  out.push_back(last);
  return out;
}

template <class S>
TwistState<S> twist_state(const CubicModel& model, std::span<const S> w, double c) {
  const int n = model.n();
  const int dN = 4 * n;
  if (static_cast<int>(w.size()) != dN + 1) throw Error(ErrorKind::DimensionMismatch, "P chart has 4n+1 entries");
  TwistState<S> st;
  st.n = n;
  st.c = c;
  st.hk = cmap::hk_state<S>(model, w.subspan(0, static_cast<std::size_t>(dN)));
  st.s = w[static_cast<std::size_t>(dN)];
  st.fZ = st.hk.fZ(c);
  st.fH = st.hk.fH(c);
  if (std::abs(ad::value_of(st.fZ)) < 1e-14 || std::abs(ad::value_of(st.fH)) < 1e-14)
    throw Error(ErrorKind::DeformationSingular, "f_Z or f_H vanishes");

  const auto& hk = st.hk;
  const std::vector<S>& q = hk.cask.q;
  // eta = ds + (1/2)(-omega_ij q^i dq^j + omega^{ij} p_i dp_j)
  std::vector<S> eq = S(0.5) * (hk.Om * q);
  std::vector<S> ep = S(-0.5) * (hk.OmInv * hk.p);
  st.eta = eq;
  st.eta.insert(st.eta.end(), ep.begin(), ep.end());
  st.eta.push_back(S(1.0));

  const std::vector<S> zero2n(static_cast<std::size_t>(2 * n), S(0.0));
  // theta_0 = d f_Z = -df = -g(xi, .)
  std::vector<S> th0 = S(-1.0) * (hk.cask.G * q);
  th0.insert(th0.end(), zero2n.begin(), zero2n.end());
  st.theta[0] = extend(th0, S(0.0));
  const std::vector<S> izg = cmap::iota_Z_gN(hk);
  st.theta[1] = st.eta;
  for (int i = 0; i < dN; ++i) st.theta[1][static_cast<std::size_t>(i)] -= izg[static_cast<std::size_t>(i)];
  st.theta[2] = extend(S(-1.0) * cmap::contract(hk.Z, hk.omega(3)), S(0.0));
  st.theta[3] = extend(cmap::contract(hk.Z, hk.omega(2)), S(0.0));

  st.gP = Matrix<S>(dN + 1, dN + 1);
  st.gP.set_block(0, 0, hk.gN);
  st.gP = st.gP - (S(1.0) / st.fH) * outer(st.eta, st.eta);
  st.gtilde = st.gP;
  for (const auto& th : st.theta) st.gtilde = st.gtilde + (S(1.0) / st.fZ) * outer(th, th);

  // Z_P = Z~ + f_H X_P
  st.ZP = extend(hk.Z, st.fH - eta_of(st, hk.Z));
  return st;
}

/// V^ = V - (eta(V) - mu_V) X_P for an N-affine vector V with Hamiltonian mu_V.
template <class S>
std::vector<S> lift_hat_of(const TwistState<S>& st, const std::vector<S>& V, const S& mu) {
  return extend(V, mu - eta_of(st, V));
}

/// eta-horizontal lift of an N-affine vector.
template <class S>
std::vector<S> horizontal_lift_of(const TwistState<S>& st, const std::vector<S>& V) {
  return extend(V, S(-1.0) * eta_of(st, V));
}

// P-affine -> P-chart conversions.
template <class S>
std::vector<S> p_vector_to_chart(const TwistState<S>& st, const std::vector<S>& v) {
  const std::size_t dN = static_cast<std::size_t>(4 * st.n);
  std::vector<S> head(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(dN));
  return extend(cmap::vector_to_chart(st.hk, head), v[dN]);
}
template <class S>
std::vector<S> p_form1_to_chart(const TwistState<S>& st, const std::vector<S>& a) {
  const std::size_t dN = static_cast<std::size_t>(4 * st.n);
  std::vector<S> head(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(dN));
  return extend(cmap::form1_to_chart(st.hk, head), a[dN]);
}
template <class S>
Matrix<S> p_jacobian(const TwistState<S>& st) {
  Matrix<S> one(1, 1);
  one(0, 0) = S(1.0);
  return block_diag(st.hk.Jc, one);
}
template <class S>
std::vector<S> p_form2_to_chart(const TwistState<S>& st, const Matrix<S>& m) {
  const Matrix<S> J = p_jacobian(st);
  return (transpose(J) * m * J).data();
}

/// Nbar chart (r, b, t, p, s) -> P chart (r, 0, b, t, p, s).
template <class S>
std::vector<S> nbar_to_p(std::span<const S> v) {
  std::vector<S> w(v.begin(), v.end());
  w.insert(w.begin() + 1, S(0.0));
  return w;
}

/// Tangent part along Nbar of a P-affine vector, splitting off a multiple of Z_P.
template <class S>
std::vector<S> project_to_nbar_of(const TwistState<S>& st, const std::vector<S>& v) {
  std::vector<S> vc = p_vector_to_chart(st, v);
  std::vector<S> zc = p_vector_to_chart(st, st.ZP);
  if (std::abs(ad::value_of(zc[1])) < 1e-12) throw Error(ErrorKind::TransversalityFailure, "Z_P tangent to Nbar");
  const S k = vc[1] / zc[1];
  std::vector<S> out;
  out.reserve(vc.size() - 1);
  for (std::size_t i = 0; i < vc.size(); ++i)
    if (i != 1) out.push_back(vc[i] - k * zc[i]);
  return out;
}

/// g^c = g~_P / (4 |f_Z|) on Nbar, in the Nbar chart.
template <class S>
std::vector<S> qk_metric_components(const CubicModel& model, std::span<const S> v, double c) {
  const std::vector<S> w = nbar_to_p<S>(v);
  TwistState<S> st = twist_state<S>(model, w, c);
  if (!(ad::value_of(st.fZ) > 0.0)) throw Error(ErrorKind::OutsideOneLoopDomain, "f_Z <= 0");
  const int d = 4 * st.n;
  const Matrix<S> J = p_jacobian(st);
  Matrix<S> E(d + 1, d);
  for (int i = 0; i < d + 1; ++i)
    for (int k = 0, col = 0; k < d + 1; ++k) {
      if (k == 1) continue;
      E(i, col++) = J(i, k);
    }
  return ((S(0.25) / st.fZ) * (transpose(E) * st.gtilde * E)).data();
}

// ---------------------------------------------------------------------------
// Point-level API

struct PPoint {
  cmap::NPoint n_point;
  double s = 0.0;

  std::vector<double> chart() const;
};

struct QKPoint {
  double r = 1.0;
  std::vector<double> b;
  std::vector<double> t;
  std::vector<double> p;
  double s = 0.0;

  std::vector<double> chart() const;
};

/// Wraps s into [0, 2 pi) in circle mode.
double normalize_angle(double s, Mode mode);

PPoint make_ppoint(const CubicModel& model, std::span<const double> chart, Mode mode = Mode::Circle);
/// Checks t in U and f_Z^c > 0.
QKPoint make_qkpoint(const CubicModel& model, std::span<const double> chart, double c, Mode mode = Mode::Circle);
PPoint to_ppoint(const CubicModel& model, const QKPoint& qk);

struct QKAux {
  double fZ = 0.0;
  double fH = 0.0;
  std::vector<double> eta;
  std::array<std::vector<double>, 4> theta;
};

struct QKMetricSample {
  tensorlab::TensorSample gQK;
  double c = 0.0;
  QKAux aux;
};

std::vector<double> eta(const CubicModel& model, const PPoint& pp);
std::vector<double> lift_ZP(const CubicModel& model, const PPoint& pp, double c);
std::vector<double> lift_hat(const CubicModel& model, const PPoint& pp, std::span<const double> V, double mu);

struct ThetaSample {
  std::array<tensorlab::TensorSample, 4> theta;
  tensorlab::TensorSample gP;
  tensorlab::TensorSample gtilde;
};
ThetaSample theta_and_gP(const CubicModel& model, const PPoint& pp, double c);

QKMetricSample qk_metric(const CubicModel& model, const QKPoint& qk, double c);

/// Metric field of g^c over the Nbar chart (for tensorlab kernels).
inline auto qk_metric_field(const CubicModel& model, double c) {
  return tensorlab::make_field(kNbarFrame, tensorlab::kCovariant2, 4 * model.n(), [&model, c](const auto& v) {
    using V = std::decay_t<decltype(v[0])>;
    return qk_metric_components<V>(model, std::span<const V>(v), c);
  });
}

/// g_H^c on N in the N-affine frame; DegenerateSpan if the Gram determinant of
/// {Z, I1 Z, I2 Z, I3 Z} is below 1e-12.
Matrix<double> elementary_deformation(const CubicModel& model, const cmap::NPoint& pt, double c);

/// Tangent part along Nbar of a P-affine vector at a QK point.
std::vector<double> project_to_Nbar(const CubicModel& model, const QKPoint& qk, std::span<const double> vec, double c);

/// g_H(a, b) / g^c(proj a^h, proj b^h) for N-affine vectors a, b with
/// eta-horizontal lifts a^h, b^h.
double twist_ratio(const CubicModel& model, const QKPoint& qk, double c, std::span<const double> a,
                   std::span<const double> b);

}  // namespace qklab::twistqk
