#pragma once

// Pointwise differential-geometry kernels on coordinate charts.
//
// A field is a generic callable mapping chart coordinates (a std::vector of
// some scalar S) to its flattened components in the coordinate frame of that
// chart. Kernels evaluate it on Dual or Jet2 scalars to obtain exact first and
// second coordinate derivatives.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qklab/ad.hpp"
#include "qklab/errors.hpp"
#include "qklab/linalg.hpp"

namespace qklab::tensorlab {

struct Valence {
  int covariant = 0;
  int contravariant = 0;
  int rank() const { return covariant + contravariant; }
  friend bool operator==(const Valence&, const Valence&) = default;
};

inline constexpr Valence kScalar{0, 0};
inline constexpr Valence kVector{0, 1};
inline constexpr Valence kOneForm{1, 0};
inline constexpr Valence kCovariant2{2, 0};
inline constexpr Valence kContravariant2{0, 2};
inline constexpr Valence kMixed11{1, 1};
inline constexpr Valence kThreeForm{3, 0};

/// Components of a tensor at one point. Rank-2 components are stored
/// row-major; mixed (1,1) tensors are stored as T^i_j at [i][j].
struct TensorSample {
  std::string frame;
  Valence valence;
  int dim = 0;
  std::vector<double> components;

  double operator()(int i) const { return components[static_cast<std::size_t>(i)]; }
  double operator()(int i, int j) const { return components[static_cast<std::size_t>(i * dim + j)]; }
  double operator()(int i, int j, int k) const {
    return components[static_cast<std::size_t>((i * dim + j) * dim + k)];
  }
  Matrix<double> matrix() const;
  double max_abs() const;

  static TensorSample from_matrix(std::string frame, Valence valence, const Matrix<double>& m);
  static TensorSample from_vector(std::string frame, Valence valence, std::vector<double> v);
};

/// max |a - b| over components; throws on frame or shape mismatch.
double max_abs_diff(const TensorSample& a, const TensorSample& b);

struct CurvatureSample {
  int dim = 0;
  std::vector<double> christoffel;  ///< Gamma^i_{jk} at [(i*d + j)*d + k]
  std::vector<double> riemann;      ///< R_{ijkl}, all indices lowered
  Matrix<double> ricci;
  double scal = 0.0;
  double kretschmann = 0.0;

  double gamma(int i, int j, int k) const {
    return christoffel[static_cast<std::size_t>((i * dim + j) * dim + k)];
  }
  double R(int i, int j, int k, int l) const {
    return riemann[static_cast<std::size_t>(((i * dim + j) * dim + k) * dim + l)];
  }
  /// Largest violation of R_ijkl = -R_jikl = R_klij and the first Bianchi identity.
  double symmetry_residual() const;
};

/// A field on a chart with a declared frame and valence.
template <class Fn>
struct Field {
  std::string frame;
  Valence valence;
  int dim;
  Fn eval;
};

template <class Fn>
Field<std::decay_t<Fn>> make_field(std::string frame, Valence valence, int dim, Fn&& fn) {
  return {std::move(frame), valence, dim, std::forward<Fn>(fn)};
}

// ---------------------------------------------------------------------------
// Seeding helpers

template <class T = double>
std::vector<ad::Dual<T>> seed_dual(std::span<const T> x) {
  const int d = static_cast<int>(x.size());
  std::vector<ad::Dual<T>> out;
  out.reserve(x.size());
  for (int i = 0; i < d; ++i) out.push_back(ad::Dual<T>::variable(x[static_cast<std::size_t>(i)], d, i));
  return out;
}

template <class T = double>
std::vector<ad::Jet2<T>> seed_jet2(std::span<const T> x) {
  const int d = static_cast<int>(x.size());
  std::vector<ad::Jet2<T>> out;
  out.reserve(x.size());
  for (int i = 0; i < d; ++i) out.push_back(ad::Jet2<T>::variable(x[static_cast<std::size_t>(i)], d, i));
  return out;
}

/// Value, gradient and Hessian of a scalar field at a point.
struct ScalarJet {
  double value = 0.0;
  std::vector<double> gradient;
  Matrix<double> hessian;
};

enum class DerivativeMode { Automatic, FiniteDifference };

// Central-difference oracles with Ridders extrapolation for the gradient. They
// evaluate f on plain doubles only and share no code with the AD path.
std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                std::span<const double> x);
Matrix<double> fd_hessian(const std::function<double(const std::vector<double>&)>& f, std::span<const double> x);
Matrix<double> fd_jacobian(const std::function<std::vector<double>(const std::vector<double>&)>& f,
                           std::span<const double> x);

template <class Fn>
ScalarJet derive_scalar(Fn&& f, std::span<const double> x, DerivativeMode mode = DerivativeMode::Automatic) {
  const int d = static_cast<int>(x.size());
  ScalarJet out;
  if (mode == DerivativeMode::FiniteDifference) {
    std::function<double(const std::vector<double>&)> plain = [&](const std::vector<double>& u) { return f(u); };
    out.value = plain(std::vector<double>(x.begin(), x.end()));
    out.gradient = fd_gradient(plain, x);
    out.hessian = fd_hessian(plain, x);
    return out;
  }
  auto u = seed_jet2<double>(x);
  ad::Jet2<double> r = f(u);
  out.value = r.value();
  out.gradient.resize(x.size());
  out.hessian = Matrix<double>(d, d);
  for (int i = 0; i < d; ++i) {
    out.gradient[static_cast<std::size_t>(i)] = r.d(i);
    for (int j = 0; j < d; ++j) out.hessian(i, j) = r.h(i, j);
  }
  return out;
}

struct JacobianSample {
  std::vector<double> value;
  Matrix<double> jacobian;  ///< d value_i / d x_j
};

/// Values and Jacobian of a vector-valued map fn: R^d -> R^m.
template <class Fn>
JacobianSample jacobian(Fn&& fn, std::span<const double> x) {
  auto u = seed_dual<double>(x);
  std::vector<ad::Dual<double>> r = fn(u);
  JacobianSample out;
  out.value.resize(r.size());
  out.jacobian = Matrix<double>(static_cast<int>(r.size()), static_cast<int>(x.size()));
  for (std::size_t i = 0; i < r.size(); ++i) {
    out.value[i] = r[i].value();
    for (std::size_t j = 0; j < x.size(); ++j)
      out.jacobian(static_cast<int>(i), static_cast<int>(j)) = r[i].d(static_cast<int>(j));
  }
  return out;
}

template <class Fn>
TensorSample evaluate(const Field<Fn>& field, std::span<const double> x) {
  std::vector<double> u(x.begin(), x.end());
  return {field.frame, field.valence, field.dim, field.eval(u)};
}

namespace detail {

inline void require_dim(int dim, std::span<const double> x, const char* what) {
  if (static_cast<int>(x.size()) != dim) throw Error(ErrorKind::DimensionMismatch, what);
}

inline std::size_t expected_size(Valence v, int dim) {
  std::size_t s = 1;
  for (int k = 0; k < v.rank(); ++k) s *= static_cast<std::size_t>(dim);
  return s;
}

// Components and their coordinate gradients: [component][k].
template <class Fn>
std::pair<std::vector<double>, std::vector<std::vector<double>>> first_derivatives(const Field<Fn>& field,
                                                                                   std::span<const double> x) {
  require_dim(field.dim, x, field.frame.c_str());
  auto u = seed_dual<double>(x);
  std::vector<ad::Dual<double>> r = field.eval(u);
  if (r.size() != expected_size(field.valence, field.dim))
    throw Error(ErrorKind::DimensionMismatch, "field component count in frame " + field.frame);
  std::vector<double> val(r.size());
  std::vector<std::vector<double>> grad(r.size(), std::vector<double>(x.size()));
  for (std::size_t c = 0; c < r.size(); ++c) {
    val[c] = r[c].value();
    for (std::size_t k = 0; k < x.size(); ++k) grad[c][k] = r[c].d(static_cast<int>(k));
  }
  return {std::move(val), std::move(grad)};
}

}  // namespace detail

/// Exterior derivative of a one-form (result: 2-form) or of a 2-form (result: 3-form).
template <class Fn>
TensorSample exterior_derivative(const Field<Fn>& form, std::span<const double> x) {
  const int d = form.dim;
  auto [val, grad] = detail::first_derivatives(form, x);
  TensorSample out;
  out.frame = form.frame;
  out.dim = d;
  auto du = [&](int comp, int k) { return grad[static_cast<std::size_t>(comp)][static_cast<std::size_t>(k)]; };
  if (form.valence == kOneForm) {
    out.valence = kCovariant2;
    out.components.assign(static_cast<std::size_t>(d * d), 0.0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out.components[static_cast<std::size_t>(i * d + j)] = du(j, i) - du(i, j);
    return out;
  }
  if (form.valence == kCovariant2) {
    out.valence = kThreeForm;
    out.components.assign(static_cast<std::size_t>(d * d * d), 0.0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
          out.components[static_cast<std::size_t>((i * d + j) * d + k)] =
              du(j * d + k, i) + du(k * d + i, j) + du(i * d + j, k);
    return out;
  }
  throw Error(ErrorKind::DimensionMismatch, "exterior_derivative expects a 1-form or 2-form");
}

/// Lie derivative of a tensor field of valence (0,1), (1,0)... along V.
/// Supported: one-forms, (2,0), (0,2), (1,1) tensors and vectors (bracket).
template <class FnV, class FnT>
TensorSample lie_derivative(const Field<FnV>& V, const Field<FnT>& T, std::span<const double> x) {
  if (V.frame != T.frame) throw Error(ErrorKind::FrameMismatch, V.frame + " vs " + T.frame);
  if (V.valence != kVector) throw Error(ErrorKind::DimensionMismatch, "lie_derivative: V must be a vector field");
  const int d = T.dim;
  auto [v, dv] = detail::first_derivatives(V, x);
  auto [t, dt] = detail::first_derivatives(T, x);
  auto Vk = [&](int k) { return v[static_cast<std::size_t>(k)]; };
  auto dV = [&](int k, int i) { return dv[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]; };  // d_i V^k
  auto dT = [&](int c, int k) { return dt[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)]; };
  auto Tc = [&](int c) { return t[static_cast<std::size_t>(c)]; };

  TensorSample out;
  out.frame = T.frame;
  out.valence = T.valence;
  out.dim = d;
  out.components.assign(t.size(), 0.0);
  auto transport = [&](int c) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += Vk(k) * dT(c, k);
    return s;
  };
  if (T.valence == kOneForm) {
    for (int j = 0; j < d; ++j) {
      double s = transport(j);
      for (int k = 0; k < d; ++k) s += Tc(k) * dV(k, j);
      out.components[static_cast<std::size_t>(j)] = s;
    }
  } else if (T.valence == kVector) {
    for (int i = 0; i < d; ++i) {
      double s = transport(i);
      for (int k = 0; k < d; ++k) s -= Tc(k) * dV(i, k);
      out.components[static_cast<std::size_t>(i)] = s;
    }
  } else if (T.valence == kCovariant2) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double s = transport(i * d + j);
        for (int k = 0; k < d; ++k) s += Tc(k * d + j) * dV(k, i) + Tc(i * d + k) * dV(k, j);
        out.components[static_cast<std::size_t>(i * d + j)] = s;
      }
  } else if (T.valence == kContravariant2) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double s = transport(i * d + j);
        for (int k = 0; k < d; ++k) s -= Tc(k * d + j) * dV(i, k) + Tc(i * d + k) * dV(j, k);
        out.components[static_cast<std::size_t>(i * d + j)] = s;
      }
  } else if (T.valence == kMixed11) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double s = transport(i * d + j);
        for (int k = 0; k < d; ++k) s += -Tc(k * d + j) * dV(i, k) + Tc(i * d + k) * dV(k, j);
        out.components[static_cast<std::size_t>(i * d + j)] = s;
      }
  } else {
    throw Error(ErrorKind::DimensionMismatch, "lie_derivative: unsupported valence");
  }
  return out;
}

/// Lie bracket [V, W] of two vector fields.
template <class FnV, class FnW>
TensorSample bracket(const Field<FnV>& V, const Field<FnW>& W, std::span<const double> x) {
  return lie_derivative(V, W, x);
}

/// Interior product of a vector sample into a covariant tensor sample.
TensorSample interior(const TensorSample& v, const TensorSample& form);

struct CurvatureOptions {
  double max_condition = 1e13;
};

/// Levi-Civita curvature from exact first and second derivatives of g.
CurvatureSample curvature_from_jet(const std::vector<ad::Jet2<double>>& g, int dim,
                                   const CurvatureOptions& opts = {});

template <class Fn>
CurvatureSample curvature(const Field<Fn>& metric, std::span<const double> x, const CurvatureOptions& opts = {}) {
  if (metric.valence != kCovariant2) throw Error(ErrorKind::DimensionMismatch, "curvature expects a (2,0) tensor");
  detail::require_dim(metric.dim, x, metric.frame.c_str());
  auto u = seed_jet2<double>(x);
  std::vector<ad::Jet2<double>> g = metric.eval(u);
  if (g.size() != detail::expected_size(kCovariant2, metric.dim))
    throw Error(ErrorKind::DimensionMismatch, "metric component count");
  return curvature_from_jet(g, metric.dim, opts);
}

/// phi^* T at x for a covariant tensor field T (one-form or (2,0)) defined on
/// the target chart of phi.
template <class FnPhi, class FnT>
TensorSample pullback(FnPhi&& phi, const Field<FnT>& T, std::span<const double> x, std::string source_frame) {
  JacobianSample js = jacobian(phi, x);
  if (js.jacobian.rows() != T.dim) throw Error(ErrorKind::DimensionMismatch, "pullback target dimension");
  TensorSample target = evaluate(T, js.value);
  const int d = static_cast<int>(x.size());
  const Matrix<double>& J = js.jacobian;
  TensorSample out;
  out.frame = std::move(source_frame);
  out.valence = T.valence;
  out.dim = d;
  if (T.valence == kOneForm) {
    out.components.assign(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i < d; ++i)
      for (int a = 0; a < T.dim; ++a) out.components[static_cast<std::size_t>(i)] += target(a) * J(a, i);
    return out;
  }
  if (T.valence == kCovariant2) {
    Matrix<double> r = transpose(J) * target.matrix() * J;
    out.components = r.data();
    return out;
  }
  throw Error(ErrorKind::DimensionMismatch, "pullback expects a covariant tensor");
}

}  // namespace qklab::tensorlab
