#pragma once

#include <Eigen/Dense>

namespace fmalg {

/// Nonnegative least squares, min ||A x - b|| s.t. x >= 0, by the classic
/// active-set method on the normal equations. Deterministic: ties in the
/// entering variable break toward the lowest index.
Eigen::VectorXd nnls(const Eigen::MatrixXd& gram, const Eigen::VectorXd& atb,
                     double dual_tol, int max_iter);

} // namespace fmalg
