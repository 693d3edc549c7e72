#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "gridrecover/network.hpp"
#include "gridrecover/states.hpp"
#include "gridrecover/vandermonde.hpp"

namespace gridrecover {

/// Default KKT tolerance; matches the interior-point tolerance used in the
/// reference experiments.
inline constexpr double kDefaultNnlsTolerance = 1e-8;

struct NnlsResult {
  Eigen::VectorXd w;
  double objective = 0.0;     // ||A w - b||
  double kkt_residual = 0.0;  // max violation of the optimality conditions
  int iterations = 0;
};

/// Thrown when the iteration cap is hit; carries the best iterate found.
class NnlsError : public std::runtime_error {
 public:
  NnlsError(const std::string& what, NnlsResult best)
      : std::runtime_error(what), best_(std::move(best)) {}
  [[nodiscard]] const NnlsResult& best() const noexcept { return best_; }

 private:
  NnlsResult best_;
};

/// Largest violation of: w >= 0, g_i >= -tol where w_i = 0, |g_i| <= tol where
/// w_i > 0, with g = A^T (A w - b).
[[nodiscard]] double kkt_residual(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                  const Eigen::VectorXd& w);

/// min ||A w - b|| subject to w >= 0 (Lawson-Hanson active set).
///
/// Entering variable: largest negative-gradient component, lowest index on
/// ties. Subproblems use minimum-norm least squares, so rank-deficient A is
/// accepted. `max_iterations` <= 0 selects 5 * cols + 50.
[[nodiscard]] NnlsResult solve_nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                    double tol = kDefaultNnlsTolerance, int max_iterations = 0);

/// Orthonormal basis of the numerical kernel of A (singular values below
/// rel_tol * sigma_max). Zero columns when A has full column rank.
[[nodiscard]] Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& A, double rel_tol = 1e-10);

struct ParameterEstimate {
  Network network;  // (N, E, w) including any zero-weight edges of E
  Eigen::VectorXd w;
  double rms = 0.0;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
};

/// [w, rms] = parameter_estimation(E, Omega).
[[nodiscard]] ParameterEstimate parameter_estimation(const EdgeSet& edges, const StateSet& set,
                                                     double tol = kDefaultNnlsTolerance);
[[nodiscard]] ParameterEstimate parameter_estimation(const VandermondeSystem& sys,
                                                     double tol = kDefaultNnlsTolerance);

}  // namespace gridrecover
