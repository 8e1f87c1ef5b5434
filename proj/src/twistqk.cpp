#include "qklab/twistqk.hpp"

#include <cmath>

namespace qklab::twistqk {

namespace tl = qklab::tensorlab;

std::vector<double> PPoint::chart() const {
  std::vector<double> w = n_point.chart();
  w.push_back(s);
  return w;
}

std::vector<double> QKPoint::chart() const {
  std::vector<double> v{r};
  v.insert(v.end(), b.begin(), b.end());
  v.insert(v.end(), t.begin(), t.end());
  v.insert(v.end(), p.begin(), p.end());
  v.push_back(s);
  return v;
}

double normalize_angle(double s, Mode mode) {
  if (mode == Mode::Cover) return s;
  const double two_pi = 2.0 * sg::kPi;
  double r = std::fmod(s, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

PPoint make_ppoint(const CubicModel& model, std::span<const double> chart, Mode mode) {
  const std::size_t dN = static_cast<std::size_t>(4 * model.n());
  if (chart.size() != dN + 1) throw Error(ErrorKind::DimensionMismatch, "P chart has 4n+1 entries");
  return {cmap::make_npoint(model, chart.subspan(0, dN)), normalize_angle(chart[dN], mode)};
}

QKPoint make_qkpoint(const CubicModel& model, std::span<const double> chart, double c, Mode mode) {
  const int m = model.m;
  const std::size_t um = static_cast<std::size_t>(m);
  if (static_cast<int>(chart.size()) != 4 * model.n()) throw Error(ErrorKind::DimensionMismatch, "Nbar chart has 4n entries");
  QKPoint qk;
  qk.r = chart[0];
  qk.b.assign(chart.begin() + 1, chart.begin() + 1 + static_cast<std::ptrdiff_t>(um));
  qk.t.assign(chart.begin() + 1 + static_cast<std::ptrdiff_t>(um), chart.begin() + 1 + static_cast<std::ptrdiff_t>(2 * um));
  qk.p.assign(chart.begin() + 1 + static_cast<std::ptrdiff_t>(2 * um), chart.end() - 1);
  qk.s = normalize_angle(chart.back(), mode);
  const PPoint pp = to_ppoint(model, qk);
  const double fZ = cmap::rotation_data(model, pp.n_point, c).fZ;
  if (!(fZ > 0.0)) throw Error(ErrorKind::OutsideOneLoopDomain, "f_Z = " + std::to_string(fZ));
  return qk;
}

PPoint to_ppoint(const CubicModel& model, const QKPoint& qk) {
  return {cmap::make_npoint(sg::make_cask_point(model, qk.r, 0.0, qk.b, qk.t), qk.p), qk.s};
}

namespace {

TwistState<double> state_at(const CubicModel& model, const PPoint& pp, double c) {
  const std::vector<double> w = pp.chart();
  return twist_state<double>(model, std::span<const double>(w), c);
}

tl::TensorSample form1(std::vector<double> v) {
  return tl::TensorSample::from_vector(kPAffineFrame, tl::kOneForm, std::move(v));
}

}  // namespace

std::vector<double> eta(const CubicModel& model, const PPoint& pp) { return state_at(model, pp, 0.0).eta; }

std::vector<double> lift_ZP(const CubicModel& model, const PPoint& pp, double c) { return state_at(model, pp, c).ZP; }

std::vector<double> lift_hat(const CubicModel& model, const PPoint& pp, std::span<const double> V, double mu) {
  const TwistState<double> st = state_at(model, pp, 0.0);
  if (static_cast<int>(V.size()) != 4 * st.n) throw Error(ErrorKind::DimensionMismatch, "N vector has 4n entries");
  return lift_hat_of(st, std::vector<double>(V.begin(), V.end()), mu);
}

ThetaSample theta_and_gP(const CubicModel& model, const PPoint& pp, double c) {
  const TwistState<double> st = state_at(model, pp, c);
  ThetaSample out;
  for (int j = 0; j < 4; ++j) out.theta[static_cast<std::size_t>(j)] = form1(st.theta[static_cast<std::size_t>(j)]);
  out.gP = tl::TensorSample::from_matrix(kPAffineFrame, tl::kCovariant2, st.gP);
  out.gtilde = tl::TensorSample::from_matrix(kPAffineFrame, tl::kCovariant2, st.gtilde);
  return out;
}

QKMetricSample qk_metric(const CubicModel& model, const QKPoint& qk, double c) {
  const std::vector<double> v = qk.chart();
  QKMetricSample out;
  out.c = c;
  out.gQK = tl::TensorSample::from_vector(kNbarFrame, tl::kCovariant2,
                                          qk_metric_components<double>(model, std::span<const double>(v), c));
  const Matrix<double> g = out.gQK.matrix();
  const std::vector<double> ev = symmetric_eigenvalues(g);
  if (!(ev.front() > 0.0)) throw Error(ErrorKind::DegenerateMetric, "g^c not positive definite, min eigenvalue " + std::to_string(ev.front()));
  const TwistState<double> st = state_at(model, to_ppoint(model, qk), c);
  out.aux.fZ = st.fZ;
  out.aux.fH = st.fH;
  out.aux.eta = st.eta;
  out.aux.theta = st.theta;
  return out;
}

Matrix<double> elementary_deformation(const CubicModel& model, const cmap::NPoint& pt, double c) {
  const std::vector<double> v = pt.chart();
  const cmap::HKState<double> st = cmap::hk_state<double>(model, std::span<const double>(v));
  const int d = 4 * st.n;
  const double fZ = st.fZ(c);
  const double fH = st.fH(c);
  if (std::abs(fZ) < 1e-14) throw Error(ErrorKind::DeformationSingular, "f_Z vanishes");
  Matrix<double> B(d, 4);
  const std::vector<double> cols[4] = {st.Z, st.I1 * st.Z, st.I2 * st.Z, st.I3 * st.Z};
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < d; ++i) B(i, k) = cols[k][static_cast<std::size_t>(i)];
  const Matrix<double> gram = transpose(B) * st.gN * B;
  if (std::abs(determinant(gram)) < 1e-12) throw Error(ErrorKind::DegenerateSpan, "Gram determinant of HZ below 1e-12");
  const Matrix<double> P = B * inverse(gram) * transpose(B) * st.gN;
  const Matrix<double> Q = Matrix<double>::identity(d) - P;
  return (1.0 / fZ) * (transpose(Q) * st.gN * Q) + (fH / (fZ * fZ)) * (transpose(P) * st.gN * P);
}

std::vector<double> project_to_Nbar(const CubicModel& model, const QKPoint& qk, std::span<const double> vec, double c) {
  const TwistState<double> st = state_at(model, to_ppoint(model, qk), c);
  if (static_cast<int>(vec.size()) != st.dim()) throw Error(ErrorKind::DimensionMismatch, "P vector has 4n+1 entries");
  return project_to_nbar_of(st, std::vector<double>(vec.begin(), vec.end()));
}

double twist_ratio(const CubicModel& model, const QKPoint& qk, double c, std::span<const double> a,
                   std::span<const double> b) {
  const PPoint pp = to_ppoint(model, qk);
  const TwistState<double> st = state_at(model, pp, c);
  const std::vector<double> va(a.begin(), a.end()), vb(b.begin(), b.end());
  const Matrix<double> gH = elementary_deformation(model, pp.n_point, c);
  const Matrix<double> g = qk_metric(model, qk, c).gQK.matrix();
  const std::vector<double> pa = project_to_nbar_of(st, horizontal_lift_of(st, va));
  const std::vector<double> pb = project_to_nbar_of(st, horizontal_lift_of(st, vb));
  return bilinear(va, gH, vb) / bilinear(pa, g, pb);
}

}  // namespace qklab::twistqk
