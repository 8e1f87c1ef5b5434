#include "qklab/tensorlab.hpp"

#include <algorithm>
#include <cmath>

namespace qklab::tensorlab {

Matrix<double> TensorSample::matrix() const {
  if (valence.rank() != 2) throw Error(ErrorKind::DimensionMismatch, "matrix() of non rank-2 sample");
  Matrix<double> m(dim, dim);
  m.data() = components;
  return m;
}

double TensorSample::max_abs() const { return qklab::max_abs(std::span<const double>(components)); }

TensorSample TensorSample::from_matrix(std::string frame, Valence valence, const Matrix<double>& m) {
  return {std::move(frame), valence, m.rows(), m.data()};
}

TensorSample TensorSample::from_vector(std::string frame, Valence valence, std::vector<double> v) {
  // dim is the d with d^rank == size
  int d = 0;
  if (valence.rank() <= 1) {
    d = static_cast<int>(v.size());
  } else {
    const double root = std::pow(static_cast<double>(v.size()), 1.0 / valence.rank());
    d = static_cast<int>(std::lround(root));
    std::size_t s = 1;
    for (int k = 0; k < valence.rank(); ++k) s *= static_cast<std::size_t>(d);
    if (s != v.size()) throw Error(ErrorKind::DimensionMismatch, "component count is not a power of the rank");
  }
  return {std::move(frame), valence, d, std::move(v)};
}

double max_abs_diff(const TensorSample& a, const TensorSample& b) {
  if (a.frame != b.frame) throw Error(ErrorKind::FrameMismatch, a.frame + " vs " + b.frame);
  if (a.components.size() != b.components.size()) throw Error(ErrorKind::DimensionMismatch, "sample sizes");
  double r = 0.0;
  for (std::size_t i = 0; i < a.components.size(); ++i) r = std::max(r, std::abs(a.components[i] - b.components[i]));
  return r;
}

TensorSample interior(const TensorSample& v, const TensorSample& form) {
  if (v.frame != form.frame) throw Error(ErrorKind::FrameMismatch, v.frame + " vs " + form.frame);
  const int d = form.dim;
  if (form.valence == kOneForm) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += v(i) * form(i);
    return {form.frame, kScalar, d, {s}};
  }
  if (form.valence == kCovariant2) {
    std::vector<double> r(static_cast<std::size_t>(d), 0.0);
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) r[static_cast<std::size_t>(j)] += v(i) * form(i, j);
    return {form.frame, kOneForm, d, std::move(r)};
  }
  throw Error(ErrorKind::DimensionMismatch, "interior expects a 1-form or 2-form");
}

double CurvatureSample::symmetry_residual() const {
  const int d = dim;
  double r = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          const double v = R(i, j, k, l);
          r = std::max(r, std::abs(v + R(j, i, k, l)));
          r = std::max(r, std::abs(v - R(k, l, i, j)));
          r = std::max(r, std::abs(v + R(i, k, l, j) + R(i, l, j, k)));
        }
  return r;
}

CurvatureSample curvature_from_jet(const std::vector<ad::Jet2<double>>& g, int d, const CurvatureOptions& opts) {
  auto at = [d](int i, int j) { return static_cast<std::size_t>(i * d + j); };
  Matrix<double> gv(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) gv(i, j) = g[at(i, j)].value();
  const double cond = condition_number(gv);
  if (!(cond < opts.max_condition))
    throw Error(ErrorKind::DegenerateMetric, "condition number " + std::to_string(cond));
  Matrix<double> gi = inverse(gv);

  // dg[i][j][k] = d_k g_ij, ddg[i][j][k][l] = d_k d_l g_ij
  auto dg = [&](int i, int j, int k) { return g[at(i, j)].d(k); };
  auto ddg = [&](int i, int j, int k, int l) { return g[at(i, j)].h(k, l); };

  const auto ud = static_cast<std::size_t>(d);
  // Christoffel symbols of the first kind: G1[k][i][j] = Gamma_{kij}
  std::vector<double> g1(ud * ud * ud);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        g1[(static_cast<std::size_t>(k) * ud + static_cast<std::size_t>(i)) * ud + static_cast<std::size_t>(j)] =
            0.5 * (dg(k, j, i) + dg(k, i, j) - dg(i, j, k));

  CurvatureSample out;
  out.dim = d;
  out.christoffel.assign(ud * ud * ud, 0.0);
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double s = 0.0;
        for (int k = 0; k < d; ++k)
          s += gi(l, k) * g1[(static_cast<std::size_t>(k) * ud + static_cast<std::size_t>(i)) * ud +
                            static_cast<std::size_t>(j)];
        out.christoffel[(static_cast<std::size_t>(l) * ud + static_cast<std::size_t>(i)) * ud +
                        static_cast<std::size_t>(j)] = s;
      }

  // R_ijkl = 1/2 (g_il,jk + g_jk,il - g_ik,jl - g_jl,ik) + g_mn (G^m_jk G^n_il - G^m_jl G^n_ik)
  //        = ... + Gamma_{n il} G^n_jk - Gamma_{n ik} G^n_jl
  auto G1 = [&](int k, int i, int j) {
    return g1[(static_cast<std::size_t>(k) * ud + static_cast<std::size_t>(i)) * ud + static_cast<std::size_t>(j)];
  };
  out.riemann.assign(ud * ud * ud * ud, 0.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          double s = 0.5 * (ddg(i, l, j, k) + ddg(j, k, i, l) - ddg(i, k, j, l) - ddg(j, l, i, k));
          for (int n = 0; n < d; ++n) s += G1(n, i, l) * out.gamma(n, j, k) - G1(n, i, k) * out.gamma(n, j, l);
          out.riemann[((static_cast<std::size_t>(i) * ud + static_cast<std::size_t>(j)) * ud +
                       static_cast<std::size_t>(k)) *
                          ud +
                      static_cast<std::size_t>(l)] = s;
        }

  // Ric_jl = g^{ik} R_ijkl
  out.ricci = Matrix<double>(d, d);
  for (int j = 0; j < d; ++j)
    for (int l = 0; l < d; ++l) {
      double s = 0.0;
      for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) s += gi(i, k) * out.R(i, j, k, l);
      out.ricci(j, l) = s;
    }
  double scal = 0.0;
  for (int j = 0; j < d; ++j)
    for (int l = 0; l < d; ++l) scal += gi(j, l) * out.ricci(j, l);
  out.scal = scal;

  // |R|^2 = R_ijkl R^ijkl, raising one index at a time.
  std::vector<double> up = out.riemann;
  for (int slot = 0; slot < 4; ++slot) {
    std::vector<double> next(up.size(), 0.0);
    for (std::size_t idx = 0; idx < up.size(); ++idx) {
      std::size_t rem = idx;
      std::size_t digits[4];
      for (int p = 3; p >= 0; --p) {
        digits[p] = rem % ud;
        rem /= ud;
      }
      double s = 0.0;
      for (std::size_t m = 0; m < ud; ++m) {
        std::size_t src[4] = {digits[0], digits[1], digits[2], digits[3]};
        src[slot] = m;
        s += gi(static_cast<int>(digits[slot]), static_cast<int>(m)) *
             up[((src[0] * ud + src[1]) * ud + src[2]) * ud + src[3]];
      }
      next[idx] = s;
    }
    up = std::move(next);
  }
  double k2 = 0.0;
  for (std::size_t idx = 0; idx < up.size(); ++idx) k2 += up[idx] * out.riemann[idx];
  out.kretschmann = k2;
  return out;
}

// ---------------------------------------------------------------------------
// Finite-difference oracles

std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                std::span<const double> x) {
  // Ridders' polynomial extrapolation of central differences.
  constexpr int kTab = 10;
  constexpr double kCon = 1.4;
  constexpr double kCon2 = kCon * kCon;
  std::vector<double> grad(x.size());
  std::vector<double> u(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double hh = 0.05 * std::max(1.0, std::abs(x[i]));
    double a[kTab][kTab];
    auto central = [&](double h) {
      u[i] = x[i] + h;
      double fp = f(u);
      u[i] = x[i] - h;
      double fm = f(u);
      u[i] = x[i];
      return (fp - fm) / (2.0 * h);
    };
    a[0][0] = central(hh);
    double err = 1e300;
    double best = a[0][0];
    for (int k = 1; k < kTab; ++k) {
      hh /= kCon;
      a[0][k] = central(hh);
      double fac = kCon2;
      for (int j = 1; j <= k; ++j) {
        a[j][k] = (a[j - 1][k] * fac - a[j - 1][k - 1]) / (fac - 1.0);
        fac *= kCon2;
        double e = std::max(std::abs(a[j][k] - a[j - 1][k]), std::abs(a[j][k] - a[j - 1][k - 1]));
        if (e <= err) {
          err = e;
          best = a[j][k];
        }
      }
      if (std::abs(a[k][k] - a[k - 1][k - 1]) >= 2.0 * err) break;
    }
    grad[i] = best;
  }
  return grad;
}

Matrix<double> fd_hessian(const std::function<double(const std::vector<double>&)>& f, std::span<const double> x) {
  const int d = static_cast<int>(x.size());
  Matrix<double> h(d, d);
  // Central differences of the Ridders gradient.
  for (int j = 0; j < d; ++j) {
    const double step = 1e-4 * std::max(1.0, std::abs(x[static_cast<std::size_t>(j)]));
    std::vector<double> xp(x.begin(), x.end());
    std::vector<double> xm(x.begin(), x.end());
    xp[static_cast<std::size_t>(j)] += step;
    xm[static_cast<std::size_t>(j)] -= step;
    auto gp = fd_gradient(f, xp);
    auto gm = fd_gradient(f, xm);
    for (int i = 0; i < d; ++i)
      h(i, j) = (gp[static_cast<std::size_t>(i)] - gm[static_cast<std::size_t>(i)]) / (2.0 * step);
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < i; ++j) h(i, j) = h(j, i) = 0.5 * (h(i, j) + h(j, i));
  return h;
}

Matrix<double> fd_jacobian(const std::function<std::vector<double>(const std::vector<double>&)>& f,
                           std::span<const double> x) {
  std::vector<double> f0 = f(std::vector<double>(x.begin(), x.end()));
  Matrix<double> jac(static_cast<int>(f0.size()), static_cast<int>(x.size()));
  for (std::size_t c = 0; c < f0.size(); ++c) {
    auto comp = [&](const std::vector<double>& u) { return f(u)[c]; };
    auto g = fd_gradient(comp, x);
    for (std::size_t j = 0; j < x.size(); ++j) jac(static_cast<int>(c), static_cast<int>(j)) = g[j];
  }
  return jac;
}

}  // namespace qklab::tensorlab
