#pragma once

#include <Eigen/Dense>

namespace privcurve {

// Symmetric PSD square root via eigendecomposition: R symmetric, R*R = M
// within 1e-8 Frobenius. Eigenvalues in [-1e-10, 0) (relative to the matrix
// scale) are clamped to 0. Asymmetric or indefinite input throws
// std::domain_error.
Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& m);

struct SingularTriplet {
  double sigma_max = 0.0;
  Eigen::VectorXd left;
  Eigen::VectorXd right;
  bool degenerate = false;  // set for the zero matrix (sigma_max = 0)
};

// Leading singular triplet of a dense matrix: ||M * right|| = sigma_max and
// sigma_max >= ||M z|| / ||z|| for every z.
SingularTriplet top_singular_triplet(const Eigen::MatrixXd& m);

}  // namespace privcurve
