#pragma once

#include <Eigen/Dense>

namespace bayeslab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Solve A x = b for symmetric positive definite A via Cholesky.
Vector solve_spd(const Matrix& a, const Vector& b);
Matrix solve_spd(const Matrix& a, const Matrix& b);

// Inverse of an SPD matrix (small systems only; callers prefer solve_spd).
Matrix inverse_spd(const Matrix& a);

// Lower Cholesky factor; throws numeric_guard_error when not SPD to tolerance.
Matrix cholesky_lower(const Matrix& a);

// Eigenvalues of a symmetric matrix, ascending.
Vector symmetric_eigenvalues(const Matrix& a);

double log_det_spd(const Matrix& a);

}  // namespace bayeslab
