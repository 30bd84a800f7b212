#include "bayeslab/linalg.hpp"

#include "bayeslab/errors.hpp"

namespace bayeslab {

namespace {

Eigen::LLT<Matrix> checked_llt(const Matrix& a) {
    if (a.rows() != a.cols()) throw parameter_error("matrix is not square");
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success)
        throw numeric_guard_error("matrix is not positive definite");
    return llt;
}

}  // namespace

Vector solve_spd(const Matrix& a, const Vector& b) {
    return checked_llt(a).solve(b);
}

Matrix solve_spd(const Matrix& a, const Matrix& b) {
    return checked_llt(a).solve(b);
}

Matrix inverse_spd(const Matrix& a) {
    return checked_llt(a).solve(Matrix::Identity(a.rows(), a.cols()));
}

Matrix cholesky_lower(const Matrix& a) {
    return Matrix(checked_llt(a).matrixL());
}

Vector symmetric_eigenvalues(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw numeric_guard_error("symmetric eigensolve failed");
    return es.eigenvalues();
}

double log_det_spd(const Matrix& a) {
    Matrix l = cholesky_lower(a);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) acc += std::log(l(i, i));
    return 2.0 * acc;
}

}  // namespace bayeslab
