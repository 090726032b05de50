#include "routedesign/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "routedesign/errors.hpp"

namespace routedesign::numerics {

namespace {

double cutoff(const Vector& singular_values, Eigen::Index rows, Eigen::Index cols,
              const ToleranceConfig& tol) {
  const double sigma_max = singular_values.size() > 0 ? singular_values.maxCoeff() : 0.0;
  return tol.rcond.value_or(default_rcond(rows, cols)) * sigma_max;
}

}  // namespace

double default_rcond(Eigen::Index rows, Eigen::Index cols) {
  return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
}

Matrix pseudoinverse(const Matrix& a, const ToleranceConfig& tol) {
  if (a.size() == 0) return Matrix::Zero(a.cols(), a.rows());
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double cut = cutoff(sv, a.rows(), a.cols(), tol);
  Vector inv = Vector::Zero(sv.size());
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > cut && sv(k) > 0.0) inv(k) = 1.0 / sv(k);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Vector lstsq(const Matrix& a, const Vector& rhs, double damping) {
  if (rhs.size() != a.rows()) throw ValidationError("lstsq: rhs length does not match rows");
  if (damping < 0.0) throw ValidationError("lstsq: damping must be nonnegative");
  if (damping == 0.0) {
    return a.completeOrthogonalDecomposition().solve(rhs);
  }
  // Damped normal equations (A^T A + damping I) z = A^T rhs; SPD for damping > 0.
  Matrix normal = Matrix::Zero(a.cols(), a.cols());
  normal.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose());
  normal.diagonal().array() += damping;
  Eigen::LLT<Matrix, Eigen::Lower> llt(normal);
  if (llt.info() != Eigen::Success) {
    return a.completeOrthogonalDecomposition().solve(rhs);
  }
  return llt.solve(a.transpose() * rhs);
}

SymmetricEigen eig_sym(const Matrix& s, const ToleranceConfig& tol) {
  if (s.rows() != s.cols()) throw NotSymmetric("eig_sym: matrix is not square");
  const double norm = s.norm();
  if ((s - s.transpose()).norm() > tol.eig_tol * std::max(norm, 1.0)) {
    throw NotSymmetric("eig_sym: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
  if (solver.info() != Eigen::Success) throw NumericalError("eig_sym: eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

int numerical_rank(const Matrix& a, const ToleranceConfig& tol) {
  if (a.size() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(a);
  const Vector& sv = svd.singularValues();
  const double cut = cutoff(sv, a.rows(), a.cols(), tol);
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > cut && sv(k) > 0.0) ++rank;
  }
  return rank;
}

double condition_number(const Matrix& a) {
  if (a.size() == 0) return 1.0;
  Eigen::BDCSVD<Matrix> svd(a);
  const Vector& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  if (smallest <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smallest;
}

}  // namespace routedesign::numerics
