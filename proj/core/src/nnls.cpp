#include "gridrecover/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace gridrecover {

namespace {

// Minimum-norm least squares on the passive columns; zero elsewhere.
Eigen::VectorXd passive_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                              const std::vector<Eigen::Index>& passive) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(A.cols());
  if (passive.empty()) return s;
  Eigen::MatrixXd sub(A.rows(), static_cast<Eigen::Index>(passive.size()));
  for (std::size_t i = 0; i < passive.size(); ++i) sub.col(static_cast<Eigen::Index>(i)) = A.col(passive[i]);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sub);
  const Eigen::VectorXd x = cod.solve(b);
  for (std::size_t i = 0; i < passive.size(); ++i) s(passive[i]) = x(static_cast<Eigen::Index>(i));
  return s;
}

NnlsResult finish(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, Eigen::VectorXd w,
                  int iterations) {
  NnlsResult r;
  r.w = std::move(w);
  r.objective = (A * r.w - b).norm();
  r.kkt_residual = kkt_residual(A, b, r.w);
  r.iterations = iterations;
  return r;
}

}  // namespace

double kkt_residual(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& w) {
  const Eigen::VectorXd g = A.transpose() * (A * w - b);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) < 0.0) worst = std::max(worst, -w(i));
    if (w(i) > 0.0) {
      worst = std::max(worst, std::abs(g(i)));
    } else {
      worst = std::max(worst, -g(i));
    }
  }
  return worst;
}

NnlsResult solve_nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double tol,
                      int max_iterations) {
  if (A.rows() != b.size()) throw std::invalid_argument("rows(A) must equal len(b)");
  if (!(tol > 0.0)) throw std::invalid_argument("NNLS tolerance must be positive");
  const Eigen::Index cols = A.cols();
  if (max_iterations <= 0) max_iterations = static_cast<int>(5 * cols + 50);

  // A tall system has the same minimizers as its R factor against Q^T b.
  Eigen::MatrixXd R;
  Eigen::VectorXd c;
  if (A.rows() > cols && cols > 0) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    const Eigen::VectorXd qtb = qr.householderQ().adjoint() * b;
    R = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
    c = qtb.head(cols);
  } else {
    R = A;
    c = b;
  }

  Eigen::VectorXd w = Eigen::VectorXd::Zero(cols);
  std::vector<bool> passive(static_cast<std::size_t>(cols), false);
  std::vector<bool> excluded(static_cast<std::size_t>(cols), false);
  int iterations = 0;

  auto passive_list = [&] {
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < cols; ++i)
      if (passive[i]) out.push_back(i);
    return out;
  };

  while (true) {
    const Eigen::VectorXd dual = R.transpose() * (c - R * w);
    Eigen::Index enter = -1;
    double best = tol;
    for (Eigen::Index i = 0; i < cols; ++i) {
      if (passive[i] || excluded[i]) continue;
      if (dual(i) > best) {
        best = dual(i);
        enter = i;
      }
    }
    if (enter < 0) break;
    passive[enter] = true;

    bool first = true;
    bool reverted = false;
    while (true) {
      if (iterations++ == max_iterations) {
        throw NnlsError("NNLS iteration cap exceeded", finish(A, b, w, max_iterations));
      }
      const auto plist = passive_list();
      const Eigen::VectorXd s = passive_solve(R, c, plist);
      bool feasible = true;
      for (auto i : plist)
        if (!(s(i) > 0.0)) feasible = false;
      if (feasible) {
        w = s;
        break;
      }
      if (first && !(s(enter) > 0.0)) {
        // Numerically the entering column cannot improve the fit; skip it
        // until the passive set changes.
        passive[enter] = false;
        excluded[enter] = true;
        reverted = true;
        break;
      }
      first = false;
      double alpha = std::numeric_limits<double>::infinity();
      Eigen::Index blocking = -1;
      for (auto i : plist) {
        if (s(i) <= 0.0) {
          const double a = w(i) / (w(i) - s(i));
          if (a < alpha) {
            alpha = a;
            blocking = i;
          }
        }
      }
      if (blocking < 0) {
        throw NnlsError("NNLS subproblem produced a non-finite solution",
                        finish(A, b, w, iterations));
      }
      w += alpha * (s - w);
      w(blocking) = 0.0;
      for (auto i : plist) {
        if (w(i) <= 0.0) {
          w(i) = 0.0;
          passive[i] = false;
        }
      }
    }
    if (!reverted) std::fill(excluded.begin(), excluded.end(), false);
  }
  return finish(A, b, w, iterations);
}

Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& A, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double top = sv.size() ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * top) ++rank;
  return svd.matrixV().rightCols(A.cols() - rank);
}

ParameterEstimate parameter_estimation(const EdgeSet& edges, const StateSet& set, double tol) {
  return parameter_estimation(assemble(edges, set), tol);
}

ParameterEstimate parameter_estimation(const VandermondeSystem& sys, double tol) {
  NnlsResult r = solve_nnls(sys.matrix, sys.response, tol);
  ParameterEstimate out;
  out.network = sys.network(r.w);
  out.w = std::move(r.w);
  out.objective = r.objective;
  out.rms = r.objective / std::sqrt(static_cast<double>(sys.matrix.rows()));
  out.kkt_residual = r.kkt_residual;
  out.iterations = r.iterations;
  return out;
}

}  // namespace gridrecover
