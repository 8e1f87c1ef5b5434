#pragma once

// Dense row-major matrices over any scalar the AD layer provides. Dimensions
// in this project stay below ~20, so everything is naive O(n^3).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "qklab/ad.hpp"
#include "qklab/errors.hpp"

namespace qklab {

using ad::magnitude;
using ad::value_of;

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows * cols), T(0.0)) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1.0);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  T& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * cols_ + j)]; }
  const T& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * cols_ + j)]; }
  const std::vector<T>& data() const { return a_; }
  std::vector<T>& data() { return a_; }

  Matrix block(int r0, int c0, int nr, int nc) const {
    Matrix b(nr, nc);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
  }
  void set_block(int r0, int c0, const Matrix& b) {
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
  }

  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    check_same(a, b);
    Matrix r = a;
    for (std::size_t k = 0; k < r.a_.size(); ++k) r.a_[k] = r.a_[k] + b.a_[k];
    return r;
  }
  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    check_same(a, b);
    Matrix r = a;
    for (std::size_t k = 0; k < r.a_.size(); ++k) r.a_[k] = r.a_[k] - b.a_[k];
    return r;
  }
  friend Matrix operator-(const Matrix& a) {
    Matrix r = a;
    for (auto& x : r.a_) x = -x;
    return r;
  }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw Error(ErrorKind::DimensionMismatch, "matrix product");
    Matrix r(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (ad::is_exact_zero(aik)) continue;
        for (int j = 0; j < b.cols_; ++j) r(i, j) = r(i, j) + aik * b(k, j);
      }
    return r;
  }
  friend Matrix operator*(const T& s, const Matrix& m) {
    Matrix r = m;
    for (auto& x : r.a_) x = s * x;
    return r;
  }

 private:
  static void check_same(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error(ErrorKind::DimensionMismatch, "matrix sum");
  }
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> a_;
};

template <class T>
using Vector = std::vector<T>;

template <class T>
Matrix<T> transpose(const Matrix<T>& m) {
  Matrix<T> r(m.cols(), m.rows());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r(j, i) = m(i, j);
  return r;
}

template <class T>
Vector<T> operator*(const Matrix<T>& m, const Vector<T>& v) {
  if (static_cast<int>(v.size()) != m.cols()) throw Error(ErrorKind::DimensionMismatch, "matrix-vector product");
  Vector<T> r(static_cast<std::size_t>(m.rows()), T(0.0));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (!ad::is_exact_zero(m(i, j))) r[static_cast<std::size_t>(i)] += m(i, j) * v[static_cast<std::size_t>(j)];
  return r;
}

template <class T>
Vector<T> operator+(const Vector<T>& a, const Vector<T>& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "vector sum");
  Vector<T> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}
template <class T>
Vector<T> operator-(const Vector<T>& a, const Vector<T>& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "vector difference");
  Vector<T> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}
template <class T>
Vector<T> operator*(const T& s, const Vector<T>& v) {
  Vector<T> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = s * v[i];
  return r;
}

template <class T>
T dot(const Vector<T>& a, const Vector<T>& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "dot product");
  T s(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Bilinear form u^T M w.
template <class T>
T bilinear(const Vector<T>& u, const Matrix<T>& m, const Vector<T>& w) {
  return dot(u, m * w);
}

template <class T>
Matrix<T> outer(const Vector<T>& a, const Vector<T>& b) {
  Matrix<T> r(static_cast<int>(a.size()), static_cast<int>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r(static_cast<int>(i), static_cast<int>(j)) = a[i] * b[j];
  return r;
}

template <class T>
Matrix<T> block_diag(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> r(a.rows() + b.rows(), a.cols() + b.cols());
  r.set_block(0, 0, a);
  r.set_block(a.rows(), a.cols(), b);
  return r;
}

/// Gauss-Jordan inverse with partial pivoting on the primal values.
template <class T>
Matrix<T> inverse(const Matrix<T>& m, double singular_tol = 1e-300) {
  const int n = m.rows();
  if (n != m.cols()) throw Error(ErrorKind::DimensionMismatch, "inverse of non-square matrix");
  Matrix<T> a = m;
  Matrix<T> r = Matrix<T>::identity(n);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = magnitude(a(col, col));
    for (int i = col + 1; i < n; ++i) {
      double v = magnitude(a(i, col));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best <= singular_tol) throw Error(ErrorKind::SingularMatrix, "pivot " + std::to_string(col));
    if (piv != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(a(col, j), a(piv, j));
        std::swap(r(col, j), r(piv, j));
      }
    }
    T ip = T(1.0) / a(col, col);
    for (int j = 0; j < n; ++j) {
      a(col, j) = a(col, j) * ip;
      r(col, j) = r(col, j) * ip;
    }
    for (int i = 0; i < n; ++i) {
      if (i == col) continue;
      T f = a(i, col);
      if (ad::is_exact_zero(f)) continue;
      for (int j = 0; j < n; ++j) {
        a(i, j) = a(i, j) - f * a(col, j);
        r(i, j) = r(i, j) - f * r(col, j);
      }
    }
  }
  return r;
}

/// Primal values of a matrix of AD scalars.
template <class T>
Matrix<double> values(const Matrix<T>& m) {
  Matrix<double> r(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r(i, j) = value_of(m(i, j));
  return r;
}
template <class T>
Vector<double> values(const Vector<T>& v) {
  Vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = value_of(v[i]);
  return r;
}

inline double max_abs(const Matrix<double>& m) {
  double r = 0.0;
  for (double x : m.data()) r = std::max(r, std::abs(x));
  return r;
}
inline double max_abs(std::span<const double> v) {
  double r = 0.0;
  for (double x : v) r = std::max(r, std::abs(x));
  return r;
}
inline double max_abs_diff(const Matrix<double>& a, const Matrix<double>& b) { return max_abs(a - b); }

inline double frobenius(const Matrix<double>& m) {
  double s = 0.0;
  for (double x : m.data()) s += x * x;
  return std::sqrt(s);
}

// Eigen-backed helpers for plain double matrices (defined in linalg.cpp).
std::vector<double> symmetric_eigenvalues(const Matrix<double>& m);
double condition_number(const Matrix<double>& m);
double determinant(const Matrix<double>& m);
std::vector<std::complex<double>> eigenvalues(const Matrix<double>& m);

}  // namespace qklab
