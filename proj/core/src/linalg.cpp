#include "gridrecover/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace gridrecover::linalg {

double symmetric_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

double min_eigenvalue(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

Eigen::MatrixXd psd_pseudo_inverse(const Eigen::MatrixXd& a, double rel_cutoff) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double top = ev.size() ? std::abs(ev(ev.size() - 1)) : 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > rel_cutoff * top) inv(i) = 1.0 / ev(i);
  }
  const Eigen::MatrixXd& q = eig.eigenvectors();
  return q * inv.asDiagonal() * q.transpose();
}

double spectral_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues()(0);
}

}  // namespace gridrecover::linalg
