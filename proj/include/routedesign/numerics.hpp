#pragma once

#include <Eigen/Dense>
#include <optional>

namespace routedesign {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

namespace numerics {

struct ToleranceConfig {
  // Relative singular-value cutoff. Unset means max(rows, cols) * machine epsilon.
  std::optional<double> rcond;
  // Allowed relative asymmetry ||S - S^T||_F / ||S||_F for eig_sym.
  double eig_tol = 1e-10;
};

double default_rcond(Eigen::Index rows, Eigen::Index cols);

// Moore-Penrose pseudoinverse via SVD. Singular values below rcond * sigma_max
// are treated as zero.
Matrix pseudoinverse(const Matrix& a, const ToleranceConfig& tol = {});

// Minimizes ||A z - rhs||^2 + damping * ||z||^2. With damping == 0 this is
// the minimum-norm least-squares solution.
Vector lstsq(const Matrix& a, const Vector& rhs, double damping = 0.0);

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns
};

// Throws NotSymmetric when the input is not symmetric to tol.eig_tol.
SymmetricEigen eig_sym(const Matrix& s, const ToleranceConfig& tol = {});

int numerical_rank(const Matrix& a, const ToleranceConfig& tol = {});

// Ratio of largest to smallest singular value; infinity for singular input.
double condition_number(const Matrix& a);

}  // namespace numerics
}  // namespace routedesign
