#include "qklab/linalg.hpp"

#include <Eigen/Dense>

namespace qklab {

namespace {

Eigen::MatrixXd to_eigen(const Matrix<double>& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

}  // namespace

std::vector<double> symmetric_eigenvalues(const Matrix<double>& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(m), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double condition_number(const Matrix<double>& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m));
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

double determinant(const Matrix<double>& m) { return to_eigen(m).determinant(); }

std::vector<std::complex<double>> eigenvalues(const Matrix<double>& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(m), false);
  const Eigen::VectorXcd& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace qklab
