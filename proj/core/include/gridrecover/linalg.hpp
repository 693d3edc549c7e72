#pragma once

#include <Eigen/Dense>

namespace gridrecover::linalg {

/// Largest |eigenvalue| of a symmetric matrix, i.e. its operator 2-norm.
[[nodiscard]] double symmetric_norm(const Eigen::MatrixXd& a);

/// Smallest eigenvalue of a symmetric matrix.
[[nodiscard]] double min_eigenvalue(const Eigen::MatrixXd& a);

/// Moore-Penrose pseudoinverse of a symmetric PSD matrix via eigendecomposition.
/// Eigenvalues below rel_cutoff * max eigenvalue are treated as kernel.
[[nodiscard]] Eigen::MatrixXd psd_pseudo_inverse(const Eigen::MatrixXd& a,
                                                 double rel_cutoff = 1e-12);

/// Operator 2-norm of a general matrix (largest singular value).
[[nodiscard]] double spectral_norm(const Eigen::MatrixXd& a);

}  // namespace gridrecover::linalg
