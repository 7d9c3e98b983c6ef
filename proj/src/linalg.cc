#include "privcurve/linalg.h"

#include <cmath>
#include <stdexcept>

namespace privcurve {

Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw std::domain_error("matrix_sqrt_psd: matrix must be square");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::domain_error("matrix_sqrt_psd: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("matrix_sqrt_psd: eigendecomposition failed");
  }
  Eigen::VectorXd ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) {
    if (ev[i] < -1e-10 * scale) {
      throw std::domain_error("matrix_sqrt_psd: matrix is not PSD");
    }
    ev[i] = std::sqrt(std::max(ev[i], 0.0));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

SingularTriplet top_singular_triplet(const Eigen::MatrixXd& m) {
  SingularTriplet out;
  out.left = Eigen::VectorXd::Zero(m.rows());
  out.right = Eigen::VectorXd::Zero(m.cols());
  if (m.cwiseAbs().maxCoeff() == 0.0) {
    out.degenerate = true;
    if (m.rows() > 0) out.left[0] = 1.0;
    if (m.cols() > 0) out.right[0] = 1.0;
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.sigma_max = svd.singularValues()[0];
  out.left = svd.matrixU().col(0);
  out.right = svd.matrixV().col(0);
  // SVD vectors are defined up to a joint sign; canonicalize so that the
  // largest-magnitude entry of the right vector is positive.
  int imax = 0;
  out.right.cwiseAbs().maxCoeff(&imax);
  if (out.right[imax] < 0.0) {
    out.right = -out.right;
    out.left = -out.left;
  }
  return out;
}

}  // namespace privcurve
