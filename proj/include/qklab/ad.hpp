#pragma once

// Forward-mode automatic differentiation to second order.
//
// Dual<T> carries a value and a gradient, Jet2<T> additionally carries the
// symmetric Hessian (packed lower triangle). Both have a runtime dimension and
// nest: Jet2<Complex<Jet2<double>>> is the holomorphic jet of a prepotential
// whose coefficients are themselves second-order jets in chart coordinates.
// A jet with an empty derivative array is a constant; binary operations
// promote constants without allocating.

#include <cmath>
#include <cstddef>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "qklab/errors.hpp"

namespace qklab::ad {

template <class T>
struct Complex;
template <class T>
class Dual;
template <class T>
class Jet2;

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) {
  return value_of(x.value());
}
template <class T>
double value_of(const Jet2<T>& x) {
  return value_of(x.value());
}

template <class T>
struct Complex {
  T re;
  T im;

  Complex() : re(0.0), im(0.0) {}
  Complex(double r) : re(r), im(0.0) {}  // NOLINT(google-explicit-constructor)
  Complex(const T& r)                    // NOLINT(google-explicit-constructor)
    requires(!std::is_same_v<T, double>)
      : re(r), im(0.0) {}
  Complex(T r, T i) : re(std::move(r)), im(std::move(i)) {}

  friend Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
  friend Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
  friend Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
  friend Complex operator*(const Complex& a, const Complex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend Complex operator/(const Complex& a, const Complex& b) {
    T den = b.re * b.re + b.im * b.im;
    if (value_of(den) == 0.0) throw Error(ErrorKind::InvalidPoint, "complex division by zero");
    return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
  }
  Complex& operator+=(const Complex& o) { return *this = *this + o; }
  Complex& operator-=(const Complex& o) { return *this = *this - o; }
  Complex& operator*=(const Complex& o) { return *this = *this * o; }
};

template <class T>
Complex<T> conj(const Complex<T>& z) {
  return {z.re, -z.im};
}
template <class T>
T norm2(const Complex<T>& z) {
  return z.re * z.re + z.im * z.im;
}

// Magnitude of the primal value, used only for zero tests and pivoting.
inline double magnitude(double x) { return std::abs(x); }
template <class T>
double magnitude(const Complex<T>& z) {
  return magnitude(z.re) + magnitude(z.im);
}
template <class T>
double magnitude(const Dual<T>& x) {
  return magnitude(x.value());
}
template <class T>
double magnitude(const Jet2<T>& x) {
  return magnitude(x.value());
}

// ---------------------------------------------------------------------------

template <class T>
class Dual {
 public:
  Dual() : v_(0.0) {}
  Dual(double c) : v_(c) {}  // NOLINT(google-explicit-constructor)
  Dual(const T& c)           // NOLINT(google-explicit-constructor)
    requires(!std::is_same_v<T, double>)
      : v_(c) {}

  static Dual variable(const T& value, int dim, int index) {
    Dual r(value, dim);
    r.g_[static_cast<std::size_t>(index)] = T(1.0);
    return r;
  }

  const T& value() const { return v_; }
  int dim() const { return static_cast<int>(g_.size()); }
  bool is_constant() const { return g_.empty(); }
  T d(int i) const { return g_.empty() ? T(0.0) : g_[static_cast<std::size_t>(i)]; }

  friend Dual operator+(const Dual& a, const Dual& b) {
    if (b.is_constant()) return a.shifted(b.v_);
    if (a.is_constant()) return b.shifted(a.v_);
    Dual r(a.v_ + b.v_, check_dim(a, b));
    for (std::size_t i = 0; i < r.g_.size(); ++i) r.g_[i] = a.g_[i] + b.g_[i];
    return r;
  }
  friend Dual operator-(const Dual& a) {
    Dual r = a;
    r.v_ = -r.v_;
    for (auto& x : r.g_) x = -x;
    return r;
  }
  friend Dual operator-(const Dual& a, const Dual& b) { return a + (-b); }
  friend Dual operator*(const Dual& a, const Dual& b) {
    if (b.is_constant()) return a.scaled(b.v_);
    if (a.is_constant()) return b.scaled(a.v_);
    Dual r(a.v_ * b.v_, check_dim(a, b));
    for (std::size_t i = 0; i < r.g_.size(); ++i) r.g_[i] = a.v_ * b.g_[i] + b.v_ * a.g_[i];
    return r;
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    if (b.is_constant()) {
      if (magnitude(b.v_) == 0.0) throw Error(ErrorKind::InvalidPoint, "division by zero");
      return a.scaled(T(1.0) / b.v_);
    }
    return a * inv(b);
  }
  Dual& operator+=(const Dual& o) { return *this = *this + o; }
  Dual& operator-=(const Dual& o) { return *this = *this - o; }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }

  // f(a) given f(v), f'(v).
  static Dual chain(const Dual& a, const T& f0, const T& f1) {
    Dual r(f0, a.dim());
    for (std::size_t i = 0; i < r.g_.size(); ++i) r.g_[i] = f1 * a.g_[i];
    return r;
  }

  friend Dual inv(const Dual& a) {
    if (magnitude(a.v_) == 0.0) throw Error(ErrorKind::InvalidPoint, "division by zero");
    T iv = T(1.0) / a.v_;
    return chain(a, iv, -(iv * iv));
  }

 private:
  Dual(const T& v, int dim) : v_(v), g_(static_cast<std::size_t>(dim), T(0.0)) {}

  static int check_dim(const Dual& a, const Dual& b) {
    if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "dual operands");
    return a.dim();
  }
  Dual shifted(const T& c) const {
    Dual r = *this;
    r.v_ = r.v_ + c;
    return r;
  }
  Dual scaled(const T& c) const {
    Dual r = *this;
    r.v_ = r.v_ * c;
    for (auto& x : r.g_) x = x * c;
    return r;
  }

  T v_;
  std::vector<T> g_;
};

// ---------------------------------------------------------------------------

template <class T>
class Jet2 {
 public:
  Jet2() : v_(0.0) {}
  Jet2(double c) : v_(c) {}  // NOLINT(google-explicit-constructor)
  Jet2(const T& c)           // NOLINT(google-explicit-constructor)
    requires(!std::is_same_v<T, double>)
      : v_(c) {}

  static Jet2 variable(const T& value, int dim, int index) {
    Jet2 r(value, dim);
    r.d_[static_cast<std::size_t>(index)] = T(1.0);
    return r;
  }

  const T& value() const { return v_; }
  int dim() const { return dim_; }
  bool is_constant() const { return d_.empty(); }
  T d(int i) const { return d_.empty() ? T(0.0) : d_[static_cast<std::size_t>(i)]; }
  T h(int i, int j) const {
    if (d_.empty()) return T(0.0);
    return d_[static_cast<std::size_t>(dim_) + tri(i, j)];
  }

  friend Jet2 operator+(const Jet2& a, const Jet2& b) {
    if (b.is_constant()) return a.shifted(b.v_);
    if (a.is_constant()) return b.shifted(a.v_);
    Jet2 r(a.v_ + b.v_, check_dim(a, b));
    for (std::size_t i = 0; i < r.d_.size(); ++i) r.d_[i] = a.d_[i] + b.d_[i];
    return r;
  }
  friend Jet2 operator-(const Jet2& a) {
    Jet2 r = a;
    r.v_ = -r.v_;
    for (auto& x : r.d_) x = -x;
    return r;
  }
  friend Jet2 operator-(const Jet2& a, const Jet2& b) { return a + (-b); }
  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    if (b.is_constant()) return a.scaled(b.v_);
    if (a.is_constant()) return b.scaled(a.v_);
    const int n = check_dim(a, b);
    Jet2 r(a.v_ * b.v_, n);
    const auto un = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < un; ++i) r.d_[i] = a.v_ * b.d_[i] + b.v_ * a.d_[i];
    std::size_t k = un;
    for (std::size_t i = 0; i < un; ++i) {
      for (std::size_t j = 0; j <= i; ++j, ++k) {
        r.d_[k] = a.v_ * b.d_[k] + b.v_ * a.d_[k] + a.d_[i] * b.d_[j] + a.d_[j] * b.d_[i];
      }
    }
    return r;
  }
  friend Jet2 operator/(const Jet2& a, const Jet2& b) {
    if (b.is_constant()) {
      if (magnitude(b.v_) == 0.0) throw Error(ErrorKind::InvalidPoint, "division by zero");
      return a.scaled(T(1.0) / b.v_);
    }
    return a * inv(b);
  }
  Jet2& operator+=(const Jet2& o) { return *this = *this + o; }
  Jet2& operator-=(const Jet2& o) { return *this = *this - o; }
  Jet2& operator*=(const Jet2& o) { return *this = *this * o; }
  Jet2& operator/=(const Jet2& o) { return *this = *this / o; }

  // f(a) given f(v), f'(v), f''(v).
  static Jet2 chain(const Jet2& a, const T& f0, const T& f1, const T& f2) {
    Jet2 r(f0, a.dim_);
    if (a.is_constant()) return Jet2(f0);
    const auto un = static_cast<std::size_t>(a.dim_);
    for (std::size_t i = 0; i < un; ++i) r.d_[i] = f1 * a.d_[i];
    std::size_t k = un;
    for (std::size_t i = 0; i < un; ++i) {
      for (std::size_t j = 0; j <= i; ++j, ++k) r.d_[k] = f1 * a.d_[k] + f2 * a.d_[i] * a.d_[j];
    }
    return r;
  }

  friend Jet2 inv(const Jet2& a) {
    if (magnitude(a.v_) == 0.0) throw Error(ErrorKind::InvalidPoint, "division by zero");
    T iv = T(1.0) / a.v_;
    T iv2 = iv * iv;
    return chain(a, iv, -iv2, T(2.0) * iv2 * iv);
  }

 private:
  Jet2(const T& v, int dim)
      : v_(v),
        dim_(dim),
        d_(static_cast<std::size_t>(dim) + tri(dim, 0), T(0.0)) {}

  static std::size_t tri(int i, int j) {
    if (i < j) std::swap(i, j);
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(i + 1) / 2 + static_cast<std::size_t>(j);
  }
  static int check_dim(const Jet2& a, const Jet2& b) {
    if (a.dim_ != b.dim_) throw Error(ErrorKind::DimensionMismatch, "jet operands");
    return a.dim_;
  }
  Jet2 shifted(const T& c) const {
    Jet2 r = *this;
    r.v_ = r.v_ + c;
    return r;
  }
  Jet2 scaled(const T& c) const {
    Jet2 r = *this;
    r.v_ = r.v_ * c;
    for (auto& x : r.d_) x = x * c;
    return r;
  }

  T v_;
  int dim_ = 0;
  std::vector<T> d_;
};

// True for structural zeros: a plain 0.0 or a constant jet with zero value.
// Dense kernels skip these so block-sparse products stay cheap on jets.
inline bool is_exact_zero(double x) { return x == 0.0; }
template <class T>
bool is_exact_zero(const Dual<T>& x) {
  return x.is_constant() && is_exact_zero(x.value());
}
template <class T>
bool is_exact_zero(const Jet2<T>& x) {
  return x.is_constant() && is_exact_zero(x.value());
}
template <class T>
bool is_exact_zero(const Complex<T>& z) {
  return is_exact_zero(z.re) && is_exact_zero(z.im);
}

// ---------------------------------------------------------------------------
// Elementary functions. Domain violations throw InvalidPoint tagged with the
// function name.

// Plain-double overloads, so generic code can call ad::log etc. on any scalar.
using std::abs;
using std::atan;
using std::atan2;
using std::cos;
using std::exp;
using std::log;
using std::sin;
using std::sqrt;

inline void require_positive(double v, const char* tag) {
  if (!(v > 0.0)) throw Error(ErrorKind::InvalidPoint, std::string(tag) + " of non-positive argument");
}

template <class T>
Dual<T> log(const Dual<T>& a) {
  using std::log;
  require_positive(value_of(a), "log");
  return Dual<T>::chain(a, log(a.value()), T(1.0) / a.value());
}
template <class T>
Jet2<T> log(const Jet2<T>& a) {
  using std::log;
  require_positive(value_of(a), "log");
  T iv = T(1.0) / a.value();
  return Jet2<T>::chain(a, log(a.value()), iv, -(iv * iv));
}

template <class T>
Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  T e = exp(a.value());
  return Dual<T>::chain(a, e, e);
}
template <class T>
Jet2<T> exp(const Jet2<T>& a) {
  using std::exp;
  T e = exp(a.value());
  return Jet2<T>::chain(a, e, e, e);
}

template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  require_positive(value_of(a), "sqrt");
  T s = sqrt(a.value());
  return Dual<T>::chain(a, s, T(0.5) / s);
}
template <class T>
Jet2<T> sqrt(const Jet2<T>& a) {
  using std::sqrt;
  require_positive(value_of(a), "sqrt");
  T s = sqrt(a.value());
  T d1 = T(0.5) / s;
  return Jet2<T>::chain(a, s, d1, -(d1 / (T(2.0) * a.value())));
}

template <class T>
Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return Dual<T>::chain(a, sin(a.value()), cos(a.value()));
}
template <class T>
Jet2<T> sin(const Jet2<T>& a) {
  using std::cos;
  using std::sin;
  T s = sin(a.value());
  return Jet2<T>::chain(a, s, cos(a.value()), -s);
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return Dual<T>::chain(a, cos(a.value()), -sin(a.value()));
}
template <class T>
Jet2<T> cos(const Jet2<T>& a) {
  using std::cos;
  using std::sin;
  T c = cos(a.value());
  return Jet2<T>::chain(a, c, -sin(a.value()), -c);
}

template <class T>
Dual<T> abs(const Dual<T>& a) {
  return value_of(a) < 0.0 ? -a : a;
}
template <class T>
Jet2<T> abs(const Jet2<T>& a) {
  return value_of(a) < 0.0 ? -a : a;
}

template <class T>
Dual<T> atan(const Dual<T>& a) {
  using std::atan;
  return Dual<T>::chain(a, atan(a.value()), T(1.0) / (T(1.0) + a.value() * a.value()));
}
template <class T>
Jet2<T> atan(const Jet2<T>& a) {
  using std::atan;
  T d1 = T(1.0) / (T(1.0) + a.value() * a.value());
  return Jet2<T>::chain(a, atan(a.value()), d1, T(-2.0) * a.value() * d1 * d1);
}

// Quadrant selection on the primal value; every branch is smooth where taken.
template <class S>
S atan2(const S& y, const S& x)
  requires(!std::is_same_v<S, double>)
{
  using std::atan;
  constexpr double pi = 3.14159265358979323846;
  const double yv = value_of(y);
  const double xv = value_of(x);
  if (xv == 0.0 && yv == 0.0) throw Error(ErrorKind::InvalidPoint, "atan2 at origin");
  if (std::abs(xv) >= std::abs(yv)) {
    S base = atan(y / x);
    if (xv > 0.0) return base;
    return base + S(yv >= 0.0 ? pi : -pi);
  }
  S base = atan(x / y);
  return S(yv > 0.0 ? pi / 2 : -pi / 2) - base;
}

}  // namespace qklab::ad
