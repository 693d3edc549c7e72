#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gridrecover/network.hpp"

namespace gridrecover {

/// Power drawn into each node by its incident lines at voltages e + i f:
/// p_j = sum_k c_jk alpha_jk - s_jk beta_jk, q_j = sum_k c_jk beta_jk + s_jk alpha_jk.
void line_injections(const Network& net, const Eigen::VectorXd& e, const Eigen::VectorXd& f,
                     Eigen::VectorXd& p, Eigen::VectorXd& q);

struct NewtonOptions {
  int max_iterations = 50;
  double tolerance = 1e-12;     // infinity norm of the mismatch
  double stall_accept = 1e-10;  // accepted if the line search stalls below this
  int max_halvings = 40;
};

struct PowerFlowSolution {
  Eigen::VectorXd e;
  Eigen::VectorXd f;
  double mismatch = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Damped Newton from a flat start. Node `slack` (1-based) is held at v = 1;
/// every other node must draw the given injection (P, and Q for AC).
/// Step halving continues until the mismatch infinity norm decreases.
[[nodiscard]] PowerFlowSolution solve_power_flow(const Network& net, int slack,
                                                 const Eigen::VectorXd& P,
                                                 const Eigen::VectorXd& Q,
                                                 const NewtonOptions& options = {});

namespace detail {
/// Mismatch of the non-slack equations, unknown layout (e_j[, f_j]) per
/// non-slack node in increasing node order.
Eigen::VectorXd power_flow_mismatch(const Network& net, int slack, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& P, const Eigen::VectorXd& Q);
Eigen::MatrixXd power_flow_jacobian(const Network& net, int slack, const Eigen::VectorXd& x);
}  // namespace detail

}  // namespace gridrecover
