#pragma once

// Rigid c-map: the hyper-Kaehler structure on N = T*M over a CASK domain,
// the rotating Killing field Z, omega_H, I_H, canonical lifts of affine
// symmetries and fiber translations with their Hamiltonians.
//
// Two frames on N:
//   "N-affine": (q, p) = (x, y, p), 4n components, where the block formulas
//               of the rigid c-map are exact;
//   "N-chart":  (r, phi, b, t, p), the coordinates used for differentiation.
// The Jacobian d(q, p)/d(u, p) is blockdiag(A, I).

#include <span>
#include <string>
#include <vector>

#include "qklab/special_geometry.hpp"

namespace qklab::cmap {

inline const std::string kAffineFrame = "N-affine";
inline const std::string kChartFrame = "N-chart";

/// omega = kappa dx^i ^ dy_i in the flat frame, kappa = 2 for g = 2 Re(Im tau dX dXbar).
inline constexpr double kKappa = 2.0;

template <class S>
Matrix<S> flat_omega(int n) {
  Matrix<S> om(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    om(i, n + i) = S(kKappa);
    om(n + i, i) = S(-kKappa);
  }
  return om;
}

template <class S>
Matrix<S> flat_omega_inv(int n) {
  Matrix<S> om(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    om(i, n + i) = S(-1.0 / kKappa);
    om(n + i, i) = S(1.0 / kKappa);
  }
  return om;
}

template <class S>
Matrix<S> promote(const Matrix<double>& m) {
  Matrix<S> out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = S(m(i, j));
  return out;
}

template <class S>
std::vector<S> promote(std::span<const double> v) {
  return std::vector<S>(v.begin(), v.end());
}

/// Hyper-Kaehler data at an N-chart point, in the N-affine frame.
template <class S>
struct HKState {
  int n = 0;
  sg::CaskState<S> cask;
  std::vector<S> p;
  Matrix<S> Om;
  Matrix<S> OmInv;
  Matrix<S> gN;
  Matrix<S> I1;
  Matrix<S> I2;
  Matrix<S> I3;
  std::vector<S> Z;  ///< -(horizontal lift of J xi)
  Matrix<S> Jc;      ///< d(q, p) / d(u, p)
  Matrix<S> Jc_inv;

  /// omega_a = g_N(I_a ., .), a = 1..3.
  Matrix<S> omega(int a) const {
    const Matrix<S>& I = a == 1 ? I1 : (a == 2 ? I2 : I3);
    return transpose(I) * gN;
  }
  /// f_Z^c = -g_N(Z, Z)/2 - c/2.
  S fZ(double c) const { return -cask.f - S(0.5 * c); }
  /// f_H^c = f_Z^c + g_N(Z, Z).
  S fH(double c) const { return cask.f - S(0.5 * c); }
};

template <class S>
HKState<S> hk_state(const CubicModel& model, std::span<const S> v) {
  const int n = model.n();
  if (static_cast<int>(v.size()) != 4 * n) throw Error(ErrorKind::DimensionMismatch, "N chart has 4n entries");
  HKState<S> st;
  st.n = n;
  st.cask = sg::cask_state<S>(model, v.subspan(0, static_cast<std::size_t>(2 * n)));
  st.p.assign(v.begin() + 2 * n, v.end());
  st.Om = flat_omega<S>(n);
  st.OmInv = flat_omega_inv<S>(n);
  const Matrix<S>& G = st.cask.G;
  const Matrix<S>& J = st.cask.J;
  const Matrix<S> Ginv = inverse(G);
  st.gN = block_diag(G, Ginv);
  st.I1 = block_diag(J, transpose(J));
  st.I2 = Matrix<S>(4 * n, 4 * n);
  st.I2.set_block(0, 2 * n, -st.OmInv);
  st.I2.set_block(2 * n, 0, st.Om);
  st.I3 = st.I1 * st.I2;
  st.Z.assign(static_cast<std::size_t>(4 * n), S(0.0));
  for (int i = 0; i < 2 * n; ++i) st.Z[static_cast<std::size_t>(i)] = -st.cask.Jxi[static_cast<std::size_t>(i)];
  const Matrix<S> I2n = Matrix<S>::identity(2 * n);
  st.Jc = block_diag(st.cask.A, I2n);
  st.Jc_inv = block_diag(inverse(st.cask.A), I2n);
  return st;
}

// Frame conversions N-affine -> N-chart.
template <class S>
std::vector<S> vector_to_chart(const HKState<S>& st, const std::vector<S>& v) {
  return st.Jc_inv * v;
}
template <class S>
std::vector<S> form1_to_chart(const HKState<S>& st, const std::vector<S>& a) {
  return transpose(st.Jc) * a;
}
template <class S>
std::vector<S> form2_to_chart(const HKState<S>& st, const Matrix<S>& m) {
  return (transpose(st.Jc) * m * st.Jc).data();
}

/// omega_H = diag(-omega, omega^{-1}) in the N-affine frame.
template <class S>
Matrix<S> omega_H_block(int n) {
  return block_diag(Matrix<S>(-flat_omega<S>(n)), flat_omega_inv<S>(n));
}

/// iota_Z g_N as a one-form in the N-affine frame.
template <class S>
std::vector<S> iota_Z_gN(const HKState<S>& st) {
  return st.gN * st.Z;
}

/// (iota_V w)_j = V^i w_ij.
template <class S>
std::vector<S> contract(const std::vector<S>& V, const Matrix<S>& w) {
  return transpose(w) * V;
}

/// Canonical lift (C q, -C^T p) of the linear field q -> C q.
template <class S>
std::vector<S> canonical_lift_of(const HKState<S>& st, const Matrix<double>& C) {
  const Matrix<S> Cs = promote<S>(C);
  std::vector<S> out = Cs * st.cask.q;
  std::vector<S> pp = transpose(Cs) * st.p;
  for (auto& x : pp) out.push_back(-x);
  return out;
}

/// mu_Y = (1/2)(-q^T omega C q + p^T C omega^{-1} p).
template <class S>
S moment_lift_of(const HKState<S>& st, const Matrix<double>& C) {
  const Matrix<S> Cs = promote<S>(C);
  const std::vector<S>& q = st.cask.q;
  return S(0.5) * (-bilinear(q, st.Om * Cs, q) + bilinear(st.p, Cs * st.OmInv, st.p));
}

/// Constant fiber field (0, v).
template <class S>
std::vector<S> fiber_field_of(const HKState<S>& st, std::span<const double> v) {
  std::vector<S> out(static_cast<std::size_t>(2 * st.n), S(0.0));
  for (double x : v) out.push_back(S(x));
  return out;
}

/// mu_v = -omega^{kj} v_k p_j.
template <class S>
S moment_fiber_of(const HKState<S>& st, std::span<const double> v) {
  return -bilinear(promote<S>(v), st.OmInv, st.p);
}

// ---------------------------------------------------------------------------
// Point-level API

struct NPoint {
  sg::CaskPoint base;
  std::vector<double> p;

  std::vector<double> chart() const;
};

NPoint make_npoint(const CubicModel& model, std::span<const double> chart);
NPoint make_npoint(sg::CaskPoint base, std::vector<double> p);

struct HKSample {
  std::string frame = kAffineFrame;
  Matrix<double> gN;
  Matrix<double> I1, I2, I3;
  Matrix<double> omega1, omega2, omega3;

  /// Max residual of I_a^2 = -1, I1 I2 = I3, I_a^T g I_a = g, omega_a antisymmetric.
  double invariant_residual() const;
};

HKSample hk_sample(const CubicModel& model, const NPoint& pt);

struct RotationData {
  std::vector<double> Z;
  double fZ = 0.0;
  double fH = 0.0;
  double c = 0.0;
  double gZZ = 0.0;
};

RotationData rotation_data(const CubicModel& model, const NPoint& pt, double c);

/// omega_H via omega_1 + d iota_Z g_N (differentiated in the chart) and via the
/// block form; throws OmegaHInconsistency beyond tol. Returns the block form.
tensorlab::TensorSample omega_H(const CubicModel& model, const NPoint& pt, double tol = 1e-9);

/// The differentiated construction alone, in the N-affine frame.
Matrix<double> omega_H_derived(const CubicModel& model, const NPoint& pt);

/// I_H defined by omega_H = g_N(I_H ., .).
tensorlab::TensorSample I_H(const CubicModel& model, const NPoint& pt);

std::vector<double> canonical_lift(const Matrix<double>& C, const CubicModel& model, const NPoint& pt);
double moment_lift(const Matrix<double>& C, const CubicModel& model, const NPoint& pt);
double moment_fiber(std::span<const double> v, const NPoint& pt);
NPoint translate_fiber(std::span<const double> v, const NPoint& pt);

}  // namespace qklab::cmap
