#include "qklab/cmap.hpp"

#include <algorithm>
#include <cmath>

namespace qklab::cmap {

namespace tl = qklab::tensorlab;

std::vector<double> NPoint::chart() const {
  std::vector<double> v = base.chart();
  v.insert(v.end(), p.begin(), p.end());
  return v;
}

NPoint make_npoint(const CubicModel& model, std::span<const double> chart) {
  const std::size_t d = static_cast<std::size_t>(2 * model.n());
  if (chart.size() != 2 * d) throw Error(ErrorKind::DimensionMismatch, "N chart has 4n entries");
  return make_npoint(sg::make_cask_point(model, chart.subspan(0, d)), std::vector<double>(chart.begin() + static_cast<std::ptrdiff_t>(d), chart.end()));
}

NPoint make_npoint(sg::CaskPoint base, std::vector<double> p) {
  if (p.size() != 2 * base.X.size()) throw Error(ErrorKind::DimensionMismatch, "p has 2n entries");
  return {std::move(base), std::move(p)};
}

double HKSample::invariant_residual() const {
  const int d = gN.rows();
  const Matrix<double> id = Matrix<double>::identity(d);
  double r = max_abs_diff(I1 * I2, I3);
  const double s = std::max(1.0, max_abs(gN));
  for (const Matrix<double>* I : {&I1, &I2, &I3}) {
    r = std::max(r, max_abs(*I * *I + id));
    r = std::max(r, max_abs_diff(transpose(*I) * gN * *I, gN) / s);
  }
  for (const Matrix<double>* w : {&omega1, &omega2, &omega3}) r = std::max(r, max_abs(*w + transpose(*w)) / s);
  return r;
}

HKSample hk_sample(const CubicModel& model, const NPoint& pt) {
  const std::vector<double> v = pt.chart();
  HKState<double> st = hk_state<double>(model, v);
  HKSample s;
  s.gN = st.gN;
  s.I1 = st.I1;
  s.I2 = st.I2;
  s.I3 = st.I3;
  s.omega1 = st.omega(1);
  s.omega2 = st.omega(2);
  s.omega3 = st.omega(3);
  return s;
}

RotationData rotation_data(const CubicModel& model, const NPoint& pt, double c) {
  if (!(c >= 0.0)) throw Error(ErrorKind::Config, "c must be non-negative");
  const std::vector<double> v = pt.chart();
  HKState<double> st = hk_state<double>(model, v);
  RotationData rd;
  rd.Z = st.Z;
  rd.c = c;
  rd.fZ = st.fZ(c);
  rd.fH = st.fH(c);
  rd.gZZ = bilinear(st.Z, st.gN, st.Z);
  return rd;
}

Matrix<double> omega_H_derived(const CubicModel& model, const NPoint& pt) {
  const int n = model.n();
  const std::vector<double> v = pt.chart();
  auto alpha = tl::make_field(kChartFrame, tl::kOneForm, 4 * n, [&model](const auto& x) {
    using V = std::decay_t<decltype(x[0])>;
    HKState<V> st = hk_state<V>(model, std::span<const V>(x));
    return form1_to_chart(st, iota_Z_gN(st));
  });
  const Matrix<double> d_chart = tl::exterior_derivative(alpha, v).matrix();
  HKState<double> st = hk_state<double>(model, v);
  const Matrix<double> d_aff = transpose(st.Jc_inv) * d_chart * st.Jc_inv;
  return st.omega(1) + d_aff;
}

tl::TensorSample omega_H(const CubicModel& model, const NPoint& pt, double tol) {
  const Matrix<double> block = omega_H_block<double>(model.n());
  const Matrix<double> derived = omega_H_derived(model, pt);
  const double res = max_abs_diff(block, derived);
  if (res > tol) throw Error(ErrorKind::OmegaHInconsistency, "residual " + std::to_string(res));
  return tl::TensorSample::from_matrix(kAffineFrame, tl::kCovariant2, block);
}

tl::TensorSample I_H(const CubicModel& model, const NPoint& pt) {
  const std::vector<double> v = pt.chart();
  HKState<double> st = hk_state<double>(model, v);
  // omega_H = I_H^T g_N
  const Matrix<double> I = transpose(omega_H_block<double>(st.n) * inverse(st.gN));
  return tl::TensorSample::from_matrix(kAffineFrame, tl::kMixed11, I);
}

std::vector<double> canonical_lift(const Matrix<double>& C, const CubicModel& model, const NPoint& pt) {
  const std::vector<double> v = pt.chart();
  return canonical_lift_of(hk_state<double>(model, v), C);
}

double moment_lift(const Matrix<double>& C, const CubicModel& model, const NPoint& pt) {
  const std::vector<double> v = pt.chart();
  return moment_lift_of(hk_state<double>(model, v), C);
}

double moment_fiber(std::span<const double> v, const NPoint& pt) {
  const int n = static_cast<int>(pt.p.size()) / 2;
  if (v.size() != pt.p.size()) throw Error(ErrorKind::DimensionMismatch, "fiber vector has 2n entries");
  return -bilinear(std::vector<double>(v.begin(), v.end()), flat_omega_inv<double>(n), pt.p);
}

NPoint translate_fiber(std::span<const double> v, const NPoint& pt) {
  if (v.size() != pt.p.size()) throw Error(ErrorKind::DimensionMismatch, "fiber vector has 2n entries");
  NPoint out = pt;
  for (std::size_t i = 0; i < v.size(); ++i) out.p[i] += v[i];
  return out;
}

}  // namespace qklab::cmap
