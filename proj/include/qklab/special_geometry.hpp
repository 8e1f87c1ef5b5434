#pragma once

// CASK domain of a cubic prepotential F(X) = -(1/6) k_abc X^a X^b X^c / X^0,
// its flat affine frame (x, y), the supergravity r-map metric and the
// embedding of Aff_H into the symplectic group of the frame.
//
// Chart on M: u = (r, phi, b^1..b^m, t^1..t^m), X^0 = r e^{i phi},
// X^a = X^0 (b^a + i t^a). Everything generic is templated on the scalar so
// the same code runs on double, Dual and Jet2.

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "qklab/ad.hpp"
#include "qklab/linalg.hpp"
#include "qklab/model.hpp"
#include "qklab/tensorlab.hpp"

namespace qklab::sg {

template <class S>
using Cx = ad::Complex<S>;

inline constexpr double kPi = 3.14159265358979323846;

/// F(X) over any field-like scalar (complex jets included).
template <class V>
V prepotential_value(const CubicModel& model, std::span<const V> X) {
  if (ad::magnitude(X[0]) == 0.0) throw Error(ErrorKind::PoleOfPrepotential, "X^0 = 0");
  return -(model.cubic<V>(X.subspan(1)) / X[0]);
}

template <class S>
struct PrepotentialJet {
  Cx<S> value;
  std::vector<Cx<S>> grad;  ///< dF/dX^i
  Matrix<Cx<S>> tau;        ///< d^2F/dX^i dX^j
};

/// Holomorphic value, gradient and Hessian of F by a complex second-order jet.
template <class S>
PrepotentialJet<S> prepotential_jet(const CubicModel& model, const std::vector<Cx<S>>& X) {
  using HJ = ad::Jet2<Cx<S>>;
  const int n = model.n();
  if (ad::magnitude(X[0]) == 0.0) throw Error(ErrorKind::PoleOfPrepotential, "X^0 = 0");
  std::vector<HJ> Xj;
  Xj.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) Xj.push_back(HJ::variable(X[static_cast<std::size_t>(i)], n, i));
  HJ F = prepotential_value<HJ>(model, Xj);
  PrepotentialJet<S> out;
  out.value = F.value();
  out.grad.resize(static_cast<std::size_t>(n));
  out.tau = Matrix<Cx<S>>(n, n);
  for (int i = 0; i < n; ++i) {
    out.grad[static_cast<std::size_t>(i)] = F.d(i);
    for (int j = 0; j < n; ++j) out.tau(i, j) = F.h(i, j);
  }
  return out;
}

/// Point X in C^n from the chart u = (r, phi, b, t).
template <class S>
std::vector<Cx<S>> chart_to_X(const CubicModel& model, std::span<const S> u) {
  using std::cos;
  using std::sin;
  const int m = model.m;
  std::vector<Cx<S>> X(static_cast<std::size_t>(m + 1));
  const S& r = u[0];
  const S& phi = u[1];
  X[0] = Cx<S>(r * cos(phi), r * sin(phi));
  for (int a = 0; a < m; ++a)
    X[static_cast<std::size_t>(a + 1)] =
        X[0] * Cx<S>(u[static_cast<std::size_t>(2 + a)], u[static_cast<std::size_t>(2 + m + a)]);
  return X;
}

/// Inverse chart; phi in (-pi, pi].
template <class S>
std::vector<S> X_to_chart(const CubicModel& model, const std::vector<Cx<S>>& X) {
  using std::atan2;
  using std::sqrt;
  const int m = model.m;
  std::vector<S> u(static_cast<std::size_t>(2 + 2 * m));
  u[0] = sqrt(ad::norm2(X[0]));
  u[1] = atan2(X[0].im, X[0].re);
  for (int a = 0; a < m; ++a) {
    Cx<S> z = X[static_cast<std::size_t>(a + 1)] / X[0];
    u[static_cast<std::size_t>(2 + a)] = z.re;
    u[static_cast<std::size_t>(2 + m + a)] = z.im;
  }
  return u;
}

/// Affine coordinates q = (x, y): x^i = Re X^i, y_i = -Re dF/dX^i.
template <class S>
std::vector<S> affine_coords_of(const CubicModel& model, const std::vector<Cx<S>>& X) {
  const int n = model.n();
  PrepotentialJet<S> pj = prepotential_jet<S>(model, X);
  std::vector<S> q(static_cast<std::size_t>(2 * n));
  for (int i = 0; i < n; ++i) {
    q[static_cast<std::size_t>(i)] = X[static_cast<std::size_t>(i)].re;
    q[static_cast<std::size_t>(n + i)] = -pj.grad[static_cast<std::size_t>(i)].re;
  }
  return q;
}

/// All CASK data at a chart point, in the affine frame.
template <class S>
struct CaskState {
  int n = 0;
  std::vector<Cx<S>> X;
  PrepotentialJet<S> F;
  Matrix<S> N;    ///< Im tau
  Matrix<S> R;    ///< Re tau
  Matrix<S> G;    ///< g
  Matrix<S> J;    ///< complex structure, J(q) acting on components
  std::vector<S> q;    ///< (x, y) = components of xi
  std::vector<S> Jxi;  ///< J xi
  S f;                 ///< Kaehler potential Im(tau_ij) X^i conj(X^j)
  Matrix<S> A;         ///< d(x, y) / d(r, phi, b, t)
};

template <class S>
CaskState<S> cask_state(const CubicModel& model, std::span<const S> u) {
  const int n = model.n();
  const int m = model.m;
  if (static_cast<int>(u.size()) != 2 * n) throw Error(ErrorKind::DimensionMismatch, "CASK chart has 2n entries");
  CaskState<S> st;
  st.n = n;
  st.X = chart_to_X<S>(model, u);
  st.F = prepotential_jet<S>(model, st.X);
  st.N = Matrix<S>(n, n);
  st.R = Matrix<S>(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      st.R(i, j) = st.F.tau(i, j).re;
      st.N(i, j) = st.F.tau(i, j).im;
    }
  const Matrix<S> P = inverse(st.N);
  const Matrix<S> RP = st.R * P;
  const Matrix<S> PR = P * st.R;
  const Matrix<S> NRPR = st.N + st.R * PR;
  st.G = Matrix<S>(2 * n, 2 * n);
  st.G.set_block(0, 0, S(2.0) * NRPR);
  st.G.set_block(0, n, S(2.0) * RP);
  st.G.set_block(n, 0, S(2.0) * PR);
  st.G.set_block(n, n, S(2.0) * P);
  st.J = Matrix<S>(2 * n, 2 * n);
  st.J.set_block(0, 0, -PR);
  st.J.set_block(0, n, -P);
  st.J.set_block(n, 0, NRPR);
  st.J.set_block(n, n, RP);

  st.q.resize(static_cast<std::size_t>(2 * n));
  for (int i = 0; i < n; ++i) {
    st.q[static_cast<std::size_t>(i)] = st.X[static_cast<std::size_t>(i)].re;
    st.q[static_cast<std::size_t>(n + i)] = -st.F.grad[static_cast<std::size_t>(i)].re;
  }
  st.Jxi = st.J * st.q;

  S f(0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto& Xi = st.X[static_cast<std::size_t>(i)];
      const auto& Xj = st.X[static_cast<std::size_t>(j)];
      f += st.N(i, j) * (Xi.re * Xj.re + Xi.im * Xj.im);
    }
  st.f = f;

  // dX^i / du as complex rows.
  const std::size_t d = static_cast<std::size_t>(2 * n);
  std::vector<std::vector<Cx<S>>> dX(static_cast<std::size_t>(n), std::vector<Cx<S>>(d));
  const Cx<S>& X0 = st.X[0];
  Cx<S> e = X0 / Cx<S>(u[0]);
  dX[0][0] = e;
  dX[0][1] = Cx<S>(-X0.im, X0.re);
  for (int a = 0; a < m; ++a) {
    const auto ua = static_cast<std::size_t>(a + 1);
    Cx<S> z(u[static_cast<std::size_t>(2 + a)], u[static_cast<std::size_t>(2 + m + a)]);
    dX[ua][0] = z * dX[0][0];
    dX[ua][1] = z * dX[0][1];
    dX[ua][static_cast<std::size_t>(2 + a)] = X0;
    dX[ua][static_cast<std::size_t>(2 + m + a)] = Cx<S>(-X0.im, X0.re);
  }
  st.A = Matrix<S>(2 * n, 2 * n);
  for (std::size_t k = 0; k < d; ++k) {
    const int kk = static_cast<int>(k);
    for (int i = 0; i < n; ++i) {
      st.A(i, kk) = dX[static_cast<std::size_t>(i)][k].re;
      Cx<S> s(0.0);
      for (int j = 0; j < n; ++j) s += st.F.tau(i, j) * dX[static_cast<std::size_t>(j)][k];
      st.A(n + i, kk) = -s.re;
    }
  }
  return st;
}

// ---------------------------------------------------------------------------
// Plain-double operations

double eval_h(const CubicModel& model, std::span<const double> t);

/// -(1/4) d^2 log h (db db + dt dt) in the (b, t) frame.
tensorlab::TensorSample psk_metric(const CubicModel& model, std::span<const double> b, std::span<const double> t);

struct AutomorphismCheck {
  bool ok = false;
  double residual = 0.0;  ///< max |k'_abc - k_abc| / 6
};
AutomorphismCheck check_psr_automorphism(const CubicModel& model, const Matrix<double>& A, double tol = 1e-12);

std::complex<double> prepotential(const CubicModel& model, std::span<const std::complex<double>> X);

struct TauInfo {
  Matrix<std::complex<double>> tau;
  int positive = 0;
  int negative = 0;
  double hermitian = 0.0;  ///< Im(tau_ij) X^i conj(X^j)
  bool signature_ok = false;
  bool negativity_ok = false;
  bool valid() const { return signature_ok && negativity_ok; }
};
TauInfo tau_and_validity(const CubicModel& model, std::span<const std::complex<double>> X);

struct CaskPoint {
  double r = 1.0;
  double phi = 0.0;
  std::vector<double> b;
  std::vector<double> t;
  std::vector<std::complex<double>> X;
  std::vector<double> x;
  std::vector<double> y;
  Matrix<double> J_chart_to_affine;

  std::vector<double> chart() const;
};

/// Builds and caches a point; throws OutsideCone for t outside U.
CaskPoint make_cask_point(const CubicModel& model, double r, double phi, std::vector<double> b, std::vector<double> t);
CaskPoint make_cask_point(const CubicModel& model, std::span<const double> chart);
CaskPoint cask_point_from_X(const CubicModel& model, std::span<const std::complex<double>> X);

struct CaskTensors {
  Matrix<double> g;
  Matrix<double> omega;
  Matrix<double> omega_inv;
  Matrix<double> J;
  std::vector<double> xi;
  std::vector<double> Jxi;
  double f = 0.0;
};
CaskTensors cask_tensors(const CubicModel& model, const CaskPoint& point);

struct AffineCoords {
  std::vector<double> x;
  std::vector<double> y;
};
AffineCoords affine_coords(const CubicModel& model, std::span<const std::complex<double>> X);

/// Reference chart point of a model (first declared H sample, generic b, phi).
std::vector<double> reference_chart(const CubicModel& model, int variant = 0);

/// Constant symplectic matrix omega = J^T g of the affine frame, measured at
/// the reference point, and its off-diagonal block scale kappa.
Matrix<double> flat_omega(const CubicModel& model);
double measure_kappa(const CubicModel& model);

// ---------------------------------------------------------------------------
// Aff_H embedding

/// L on X-space: scaling o A-block o translation.
template <class T>
Matrix<T> symmetry_L(int m, const T& lambda, const Matrix<T>& A, const std::vector<T>& v) {
  const int n = m + 1;
  Matrix<T> tr = Matrix<T>::identity(n);
  for (int a = 0; a < m; ++a) tr(a + 1, 0) = v[static_cast<std::size_t>(a)];
  Matrix<T> ab(n, n);
  ab(0, 0) = T(1.0);
  ab.set_block(1, 1, A);
  Matrix<T> sc(n, n);
  sc(0, 0) = lambda * lambda * lambda;
  for (int a = 1; a < n; ++a) sc(a, a) = lambda;
  return sc * ab * tr;
}

template <class T>
std::vector<Cx<T>> apply_L(const Matrix<T>& L, const std::vector<Cx<T>>& X) {
  std::vector<Cx<T>> out(X.size());
  for (int i = 0; i < L.rows(); ++i) {
    Cx<T> s(0.0);
    for (int j = 0; j < L.cols(); ++j) {
      const T& l = L(i, j);
      if (ad::is_exact_zero(l)) continue;
      const auto& x = X[static_cast<std::size_t>(j)];
      s += Cx<T>(l * x.re, l * x.im);
    }
    out[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

/// Jacobian of q -> q o L at the chart point u, i.e. the matrix S with
/// q(L X) = S q(X). Entries are of type T so S can be differentiated in
/// the group parameters.
template <class T>
Matrix<T> symmetry_S_at(const CubicModel& model, const Matrix<T>& L, std::span<const double> u) {
  using D = ad::Dual<T>;
  const int d = 2 * model.n();
  std::vector<D> uj;
  uj.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) uj.push_back(D::variable(T(u[static_cast<std::size_t>(i)]), d, i));
  std::vector<Cx<D>> X = chart_to_X<D>(model, uj);
  Matrix<D> Ld(L.rows(), L.cols());
  for (int i = 0; i < L.rows(); ++i)
    for (int j = 0; j < L.cols(); ++j) Ld(i, j) = D(L(i, j));
  std::vector<D> qL = affine_coords_of<D>(model, apply_L(Ld, X));
  std::vector<D> q = affine_coords_of<D>(model, X);
  Matrix<T> Aimg(d, d);
  Matrix<T> Asrc(d, d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      Aimg(i, k) = qL[static_cast<std::size_t>(i)].d(k);
      Asrc(i, k) = q[static_cast<std::size_t>(i)].d(k);
    }
  return Aimg * inverse(Asrc);
}

struct AffineSymmetry {
  double lambda = 1.0;
  Matrix<double> A;
  std::vector<double> v;
  Matrix<double> L;
  Matrix<double> S;
};

/// Rounds entries within tol of p/q (q <= 64) to that fraction.
Matrix<double> snap_rational(const Matrix<double>& m, double tol = 1e-9);

AffineSymmetry embed_affine_symmetry(const CubicModel& model, double lambda, const Matrix<double>& A,
                                     std::vector<double> v);
AffineSymmetry identity_symmetry(const CubicModel& model);

/// Infinitesimal generator C = dS/d(eps) at the identity.
Matrix<double> generator_matrix(const CubicModel& model, const AffineGenerator& gen);
/// Infinitesimal action on X-space, dL/d(eps).
Matrix<double> generator_L(const CubicModel& model, const AffineGenerator& gen);

struct CaskAutomorphismReport {
  double metric = 0.0;
  double complex_structure = 0.0;
  double euler = 0.0;
  double connection = 0.0;
  int points = 0;
  double worst() const;
};
CaskAutomorphismReport check_cask_automorphism(const CubicModel& model, const AffineSymmetry& sym,
                                               const std::vector<CaskPoint>& points);

/// Chart image of u under L (point map of the symmetry on M).
template <class S>
std::vector<S> symmetry_chart_map(const CubicModel& model, const Matrix<double>& L, std::span<const S> u) {
  std::vector<Cx<S>> X = chart_to_X<S>(model, u);
  Matrix<S> Ls(L.rows(), L.cols());
  for (int i = 0; i < L.rows(); ++i)
    for (int j = 0; j < L.cols(); ++j) Ls(i, j) = S(L(i, j));
  return X_to_chart<S>(model, apply_L(Ls, X));
}

/// CASK metric in the chart frame, A^T g A.
template <class S>
std::vector<S> chart_metric(const CubicModel& model, std::span<const S> u) {
  CaskState<S> st = cask_state<S>(model, u);
  return (transpose(st.A) * st.G * st.A).data();
}

/// Solves A w = v in the chart frame (A from the CASK state).
template <class S>
std::vector<S> affine_to_chart(const CaskState<S>& st, const std::vector<S>& v) {
  return inverse(st.A) * v;
}

template <class S>
std::vector<S> chart_xi(const CubicModel& model, std::span<const S> u) {
  CaskState<S> st = cask_state<S>(model, u);
  return affine_to_chart(st, st.q);
}

template <class S>
std::vector<S> chart_Jxi(const CubicModel& model, std::span<const S> u) {
  CaskState<S> st = cask_state<S>(model, u);
  return affine_to_chart(st, st.Jxi);
}

/// omega = J^T g pulled to the chart frame.
template <class S>
std::vector<S> chart_omega(const CubicModel& model, std::span<const S> u) {
  CaskState<S> st = cask_state<S>(model, u);
  return (transpose(st.A) * transpose(st.J) * st.G * st.A).data();
}

}  // namespace qklab::sg
