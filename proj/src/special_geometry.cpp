#include "qklab/special_geometry.hpp"

#include <algorithm>
#include <cmath>

namespace qklab::sg {

namespace {

std::vector<Cx<double>> to_cx(std::span<const std::complex<double>> X) {
  std::vector<Cx<double>> out;
  out.reserve(X.size());
  for (const auto& z : X) out.emplace_back(z.real(), z.imag());
  return out;
}

double scale_of(const Matrix<double>& m) { return std::max(1.0, max_abs(m)); }

}  // namespace

double eval_h(const CubicModel& model, std::span<const double> t) {
  if (static_cast<int>(t.size()) != model.m) throw Error(ErrorKind::DimensionMismatch, "eval_h expects m entries");
  return model.cubic<double>(t);
}

tensorlab::TensorSample psk_metric(const CubicModel& model, std::span<const double> b, std::span<const double> t) {
  const int m = model.m;
  if (static_cast<int>(b.size()) != m || static_cast<int>(t.size()) != m)
    throw Error(ErrorKind::DimensionMismatch, "psk_metric expects m-sequences");
  if (!model.in_domain(t) || eval_h(model, t) <= 0.0) throw Error(ErrorKind::OutsideCone, "t not in U");
  auto logh = [&model](const auto& tt) {
    using ad::log;
    using V = std::decay_t<decltype(tt[0])>;
    return log(model.cubic<V>(tt));
  };
  tensorlab::ScalarJet jet = tensorlab::derive_scalar(logh, t);
  Matrix<double> g(2 * m, 2 * m);
  for (int a = 0; a < m; ++a)
    for (int c = 0; c < m; ++c) {
      const double v = -0.25 * jet.hessian(a, c);
      g(a, c) = v;
      g(m + a, m + c) = v;
    }
  return tensorlab::TensorSample::from_matrix("psk(b,t)", tensorlab::kCovariant2, g);
}

AutomorphismCheck check_psr_automorphism(const CubicModel& model, const Matrix<double>& A, double tol) {
  const int m = model.m;
  if (A.rows() != m || A.cols() != m) throw Error(ErrorKind::DimensionMismatch, "automorphism must be m x m");
  if (std::abs(determinant(A)) < 1e-14) throw Error(ErrorKind::SingularMatrix, "automorphism candidate is singular");
  double res = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        double kp = 0.0;
        for (int d = 0; d < m; ++d)
          for (int e = 0; e < m; ++e)
            for (int f = 0; f < m; ++f) kp += model.k(d, e, f) * A(d, a) * A(e, b) * A(f, c);
        res = std::max(res, std::abs(kp - model.k(a, b, c)) / 6.0);
      }
  return {res <= tol, res};
}

std::complex<double> prepotential(const CubicModel& model, std::span<const std::complex<double>> X) {
  if (static_cast<int>(X.size()) != model.n()) throw Error(ErrorKind::DimensionMismatch, "prepotential expects n entries");
  auto cx = to_cx(X);
  Cx<double> F = prepotential_value<Cx<double>>(model, cx);
  return {F.re, F.im};
}

TauInfo tau_and_validity(const CubicModel& model, std::span<const std::complex<double>> X) {
  const int n = model.n();
  if (static_cast<int>(X.size()) != n) throw Error(ErrorKind::DimensionMismatch, "tau expects n entries");
  auto cx = to_cx(X);
  PrepotentialJet<double> pj = prepotential_jet<double>(model, cx);
  TauInfo info;
  info.tau = Matrix<std::complex<double>>(n, n);
  Matrix<double> N(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      info.tau(i, j) = {pj.tau(i, j).re, pj.tau(i, j).im};
      N(i, j) = pj.tau(i, j).im;
    }
  for (double ev : symmetric_eigenvalues(N)) {
    if (std::abs(ev) < 1e-10) throw Error(ErrorKind::SignatureDegenerate, "eigenvalue " + std::to_string(ev));
    (ev > 0.0 ? info.positive : info.negative) += 1;
  }
  double herm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) herm += N(i, j) * std::real(X[static_cast<std::size_t>(i)] * std::conj(X[static_cast<std::size_t>(j)]));
  info.hermitian = herm;
  info.signature_ok = info.positive == n - 1 && info.negative == 1;
  info.negativity_ok = herm < 0.0;
  return info;
}

std::vector<double> CaskPoint::chart() const {
  std::vector<double> u{r, phi};
  u.insert(u.end(), b.begin(), b.end());
  u.insert(u.end(), t.begin(), t.end());
  return u;
}

CaskPoint make_cask_point(const CubicModel& model, double r, double phi, std::vector<double> b, std::vector<double> t) {
  const auto um = static_cast<std::size_t>(model.m);
  if (b.size() != um || t.size() != um) throw Error(ErrorKind::DimensionMismatch, "b and t need m entries");
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidPoint, "r must be positive");
  if (!model.in_domain(t)) throw Error(ErrorKind::OutsideCone, "t not in U");
  CaskPoint p;
  p.r = r;
  p.phi = phi;
  p.b = std::move(b);
  p.t = std::move(t);
  const std::vector<double> u = p.chart();
  CaskState<double> st = cask_state<double>(model, u);
  const int n = model.n();
  for (int i = 0; i < n; ++i) {
    p.X.emplace_back(st.X[static_cast<std::size_t>(i)].re, st.X[static_cast<std::size_t>(i)].im);
    p.x.push_back(st.q[static_cast<std::size_t>(i)]);
    p.y.push_back(st.q[static_cast<std::size_t>(n + i)]);
  }
  p.J_chart_to_affine = st.A;
  return p;
}

CaskPoint make_cask_point(const CubicModel& model, std::span<const double> chart) {
  const auto um = static_cast<std::size_t>(model.m);
  if (chart.size() != 2 + 2 * um) throw Error(ErrorKind::DimensionMismatch, "chart has 2n entries");
  return make_cask_point(model, chart[0], chart[1], std::vector<double>(chart.begin() + 2, chart.begin() + 2 + static_cast<std::ptrdiff_t>(um)),
                         std::vector<double>(chart.begin() + 2 + static_cast<std::ptrdiff_t>(um), chart.end()));
}

CaskPoint cask_point_from_X(const CubicModel& model, std::span<const std::complex<double>> X) {
  if (static_cast<int>(X.size()) != model.n()) throw Error(ErrorKind::DimensionMismatch, "X has n entries");
  if (std::abs(X[0]) == 0.0) throw Error(ErrorKind::PoleOfPrepotential, "X^0 = 0");
  std::vector<double> u = X_to_chart<double>(model, to_cx(X));
  return make_cask_point(model, u);
}

CaskTensors cask_tensors(const CubicModel& model, const CaskPoint& point) {
  TauInfo info = tau_and_validity(model, point.X);
  if (!info.valid()) throw Error(ErrorKind::InvalidPoint, "point fails CASK validity (signature or negativity)");
  const std::vector<double> u = point.chart();
  CaskState<double> st = cask_state<double>(model, u);
  CaskTensors ct;
  ct.g = st.G;
  ct.J = st.J;
  ct.omega = transpose(st.J) * st.G;
  ct.omega_inv = inverse(ct.omega);
  ct.xi = st.q;
  ct.Jxi = st.Jxi;
  ct.f = st.f;
  return ct;
}

AffineCoords affine_coords(const CubicModel& model, std::span<const std::complex<double>> X) {
  if (static_cast<int>(X.size()) != model.n()) throw Error(ErrorKind::DimensionMismatch, "X has n entries");
  std::vector<double> q = affine_coords_of<double>(model, to_cx(X));
  const auto n = static_cast<std::ptrdiff_t>(model.n());
  return {std::vector<double>(q.begin(), q.begin() + n), std::vector<double>(q.begin() + n, q.end())};
}

std::vector<double> reference_chart(const CubicModel& model, int variant) {
  const int m = model.m;
  std::vector<double> t0;
  if (!model.h_samples.empty()) {
    t0 = model.h_samples.front();
  } else {
    for (int a = 0; a < m; ++a)
      t0.push_back(0.5 * (model.t_lo[static_cast<std::size_t>(a)] + model.t_hi[static_cast<std::size_t>(a)]));
  }
  std::vector<double> u;
  if (variant == 0) {
    u = {1.0, 0.3};
    for (int a = 0; a < m; ++a) u.push_back(0.1 * (a + 1));
    for (double t : t0) u.push_back(t);
  } else {
    u = {1.4, -0.7};
    for (int a = 0; a < m; ++a) u.push_back(-0.25 + 0.05 * a);
    for (double t : t0) u.push_back(1.3 * t);
  }
  return u;
}

Matrix<double> flat_omega(const CubicModel& model) {
  const std::vector<double> u = reference_chart(model);
  CaskState<double> st = cask_state<double>(model, u);
  return snap_rational(transpose(st.J) * st.G, 1e-10);
}

double measure_kappa(const CubicModel& model) {
  const std::vector<double> u = reference_chart(model);
  CaskState<double> st = cask_state<double>(model, u);
  Matrix<double> om = transpose(st.J) * st.G;
  return om(0, model.n());
}

Matrix<double> snap_rational(const Matrix<double>& m, double tol) {
  Matrix<double> out = m;
  for (double& x : out.data()) {
    for (int q = 1; q <= 64; ++q) {
      const double p = std::round(x * q);
      if (std::abs(x - p / q) < tol) {
        x = p / q;
        break;
      }
    }
  }
  return out;
}

AffineSymmetry embed_affine_symmetry(const CubicModel& model, double lambda, const Matrix<double>& A,
                                     std::vector<double> v) {
  const int m = model.m;
  if (!(lambda > 0.0)) throw Error(ErrorKind::NotAutomorphism, "lambda must be positive");
  if (static_cast<int>(v.size()) != m) throw Error(ErrorKind::DimensionMismatch, "v needs m entries");
  AutomorphismCheck ac = check_psr_automorphism(model, A);
  if (!ac.ok) throw Error(ErrorKind::NotAutomorphism, "coefficient residual " + std::to_string(ac.residual));

  AffineSymmetry sym;
  sym.lambda = lambda;
  sym.A = A;
  sym.v = std::move(v);
  sym.L = symmetry_L<double>(m, lambda, A, sym.v);
  const Matrix<double> s0 = symmetry_S_at<double>(model, sym.L, reference_chart(model, 0));
  const Matrix<double> s1 = symmetry_S_at<double>(model, sym.L, reference_chart(model, 1));
  const double drift = max_abs_diff(s0, s1) / scale_of(s0);
  if (drift > 1e-9) throw Error(ErrorKind::EmbeddingInconsistency, "S not constant, drift " + std::to_string(drift));
  const Matrix<double> om = flat_omega(model);
  auto sympl_residual = [&om](const Matrix<double>& S) {
    return max_abs_diff(transpose(S) * om * S, om) / (scale_of(S) * scale_of(S));
  };
  sym.S = snap_rational(s0);
  if (sympl_residual(sym.S) > sympl_residual(s0)) sym.S = s0;
  const double sympl = sympl_residual(sym.S);
  if (sympl > 1e-11) throw Error(ErrorKind::EmbeddingInconsistency, "S not symplectic, residual " + std::to_string(sympl));
  return sym;
}

AffineSymmetry identity_symmetry(const CubicModel& model) {
  return embed_affine_symmetry(model, 1.0, Matrix<double>::identity(model.m),
                               std::vector<double>(static_cast<std::size_t>(model.m), 0.0));
}

namespace {

struct GeneratorCurve {
  ad::Dual<double> lambda;
  Matrix<ad::Dual<double>> A;
  std::vector<ad::Dual<double>> v;
};

GeneratorCurve curve_of(const CubicModel& model, const AffineGenerator& gen) {
  using D = ad::Dual<double>;
  const int m = model.m;
  const D eps = D::variable(0.0, 1, 0);
  GeneratorCurve c;
  c.lambda = D(1.0) + D(gen.lambda_rate) * eps;
  c.A = Matrix<D>::identity(m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const double rate = gen.a.rows() == m ? gen.a(a, b) : 0.0;
      c.A(a, b) = c.A(a, b) + D(rate) * eps;
    }
  c.v.resize(static_cast<std::size_t>(m));
  for (int a = 0; a < m; ++a) {
    const double rate = gen.v_rate.size() == static_cast<std::size_t>(m) ? gen.v_rate[static_cast<std::size_t>(a)] : 0.0;
    c.v[static_cast<std::size_t>(a)] = D(rate) * eps;
  }
  return c;
}

Matrix<double> tangent_of(const Matrix<ad::Dual<double>>& m) {
  Matrix<double> out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).d(0);
  return out;
}

}  // namespace

Matrix<double> generator_matrix(const CubicModel& model, const AffineGenerator& gen) {
  GeneratorCurve c = curve_of(model, gen);
  auto L = symmetry_L<ad::Dual<double>>(model.m, c.lambda, c.A, c.v);
  Matrix<double> C = tangent_of(symmetry_S_at<ad::Dual<double>>(model, L, reference_chart(model, 0)));
  return snap_rational(C);
}

Matrix<double> generator_L(const CubicModel& model, const AffineGenerator& gen) {
  GeneratorCurve c = curve_of(model, gen);
  return tangent_of(symmetry_L<ad::Dual<double>>(model.m, c.lambda, c.A, c.v));
}

double CaskAutomorphismReport::worst() const {
  return std::max({metric, complex_structure, euler, connection});
}

CaskAutomorphismReport check_cask_automorphism(const CubicModel& model, const AffineSymmetry& sym,
                                               const std::vector<CaskPoint>& points) {
  CaskAutomorphismReport rep;
  const int d = 2 * model.n();
  const Matrix<double> Sinv = inverse(sym.S);
  auto metric_field = tensorlab::make_field("cask-chart", tensorlab::kCovariant2, d,
                                            [&model](const auto& u) {
                                              using V = std::decay_t<decltype(u[0])>;
                                              return chart_metric<V>(model, u);
                                            });
  auto point_map = [&](const auto& u) {
    using V = std::decay_t<decltype(u[0])>;
    return symmetry_chart_map<V>(model, sym.L, u);
  };
  for (const CaskPoint& pt : points) {
    const std::vector<double> u = pt.chart();
    const std::vector<double> img = symmetry_chart_map<double>(model, sym.L, u);
    tensorlab::TensorSample pulled = tensorlab::pullback(point_map, metric_field, u, "cask-chart");
    tensorlab::TensorSample here = tensorlab::evaluate(metric_field, u);
    rep.metric = std::max(rep.metric, tensorlab::max_abs_diff(pulled, here) / std::max(1.0, here.max_abs()));

    CaskState<double> src = cask_state<double>(model, u);
    CaskState<double> dst = cask_state<double>(model, img);
    const Matrix<double> Jpush = sym.S * src.J * Sinv;
    rep.complex_structure = std::max(rep.complex_structure, max_abs_diff(Jpush, dst.J) / scale_of(dst.J));
    const std::vector<double> xi_push = sym.S * src.q;
    rep.euler = std::max(rep.euler, max_abs(std::span<const double>(xi_push - dst.q)) /
                                        std::max(1.0, max_abs(std::span<const double>(dst.q))));
    const Matrix<double> s_here = symmetry_S_at<double>(model, sym.L, u);
    rep.connection = std::max(rep.connection, max_abs_diff(s_here, sym.S) / scale_of(sym.S));
    ++rep.points;
  }
  return rep;
}

}  // namespace qklab::sg
