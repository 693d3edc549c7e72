#include "gridrecover/power_flow.hpp"

#include <stdexcept>

#include <Eigen/LU>

namespace gridrecover {

namespace {

struct Layout {
  bool ac;
  int n;
  int slack;  // 0-based
  // unknown position of node v's e (and f at +1 for AC), -1 for slack
  std::vector<int> pos;
  int size = 0;

  Layout(const Network& net, int slack_id)
      : ac(net.kind() == Kind::AC), n(net.n()), slack(slack_id - 1),
        pos(static_cast<std::size_t>(net.n()), -1) {
    if (slack_id < 1 || slack_id > n) throw std::invalid_argument("slack node out of range");
    for (int v = 0; v < n; ++v) {
      if (v == slack) continue;
      pos[v] = size;
      size += ac ? 2 : 1;
    }
  }

  void unpack(const Eigen::VectorXd& x, Eigen::VectorXd& e, Eigen::VectorXd& f) const {
    e = Eigen::VectorXd::Ones(n);
    f = Eigen::VectorXd::Zero(n);
    for (int v = 0; v < n; ++v) {
      if (pos[v] < 0) continue;
      e(v) = x(pos[v]);
      if (ac) f(v) = x(pos[v] + 1);
    }
  }
};

}  // namespace

void line_injections(const Network& net, const Eigen::VectorXd& e, const Eigen::VectorXd& f,
                     Eigen::VectorXd& p, Eigen::VectorXd& q) {
  p = Eigen::VectorXd::Zero(net.n());
  q = Eigen::VectorXd::Zero(net.n());
  for (const auto& edge : net.edges()) {
    const int a = edge.j - 1, b = edge.k - 1;
    const double alpha_ab = e(a) * e(a) + f(a) * f(a) - e(a) * e(b) - f(a) * f(b);
    const double alpha_ba = e(b) * e(b) + f(b) * f(b) - e(b) * e(a) - f(b) * f(a);
    const double beta_ab = e(a) * f(b) - e(b) * f(a);
    p(a) += edge.c * alpha_ab - edge.s * beta_ab;
    q(a) += edge.c * beta_ab + edge.s * alpha_ab;
    p(b) += edge.c * alpha_ba + edge.s * beta_ab;
    q(b) += -edge.c * beta_ab + edge.s * alpha_ba;
  }
}

namespace detail {

Eigen::VectorXd power_flow_mismatch(const Network& net, int slack, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& P, const Eigen::VectorXd& Q) {
  Layout layout(net, slack);
  Eigen::VectorXd e, f, p, q;
  layout.unpack(x, e, f);
  line_injections(net, e, f, p, q);
  Eigen::VectorXd out(layout.size);
  for (int v = 0; v < layout.n; ++v) {
    if (layout.pos[v] < 0) continue;
    out(layout.pos[v]) = p(v) - P(v);
    if (layout.ac) out(layout.pos[v] + 1) = q(v) - Q(v);
  }
  return out;
}

Eigen::MatrixXd power_flow_jacobian(const Network& net, int slack, const Eigen::VectorXd& x) {
  Layout layout(net, slack);
  Eigen::VectorXd e, f;
  layout.unpack(x, e, f);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(layout.size, layout.size);

  // Row j, derivatives with respect to node j itself and its neighbour k.
  auto accumulate = [&](int j, int k, double c, double s) {
    const int rj = layout.pos[j];
    if (rj < 0) return;
    const int ck = layout.pos[k];
    if (layout.ac) {
      jac(rj, rj) += c * (2 * e(j) - e(k)) - s * f(k);
      jac(rj, rj + 1) += c * (2 * f(j) - f(k)) + s * e(k);
      jac(rj + 1, rj) += c * f(k) + s * (2 * e(j) - e(k));
      jac(rj + 1, rj + 1) += -c * e(k) + s * (2 * f(j) - f(k));
      if (ck >= 0) {
        jac(rj, ck) += -c * e(j) + s * f(j);
        jac(rj, ck + 1) += -c * f(j) - s * e(j);
        jac(rj + 1, ck) += -c * f(j) - s * e(j);
        jac(rj + 1, ck + 1) += c * e(j) - s * f(j);
      }
    } else {
      jac(rj, rj) += c * (2 * e(j) - e(k));
      if (ck >= 0) jac(rj, ck) += -c * e(j);
    }
  };
  for (const auto& edge : net.edges()) {
    accumulate(edge.j - 1, edge.k - 1, edge.c, edge.s);
    accumulate(edge.k - 1, edge.j - 1, edge.c, edge.s);
  }
  return jac;
}

}  // namespace detail

PowerFlowSolution solve_power_flow(const Network& net, int slack, const Eigen::VectorXd& P,
                                   const Eigen::VectorXd& Q, const NewtonOptions& options) {
  Layout layout(net, slack);
  if (P.size() != net.n() || Q.size() != net.n()) {
    throw std::invalid_argument("injection vectors must have one entry per node");
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(layout.size);
  for (int v = 0; v < layout.n; ++v)
    if (layout.pos[v] >= 0) x(layout.pos[v]) = 1.0;

  PowerFlowSolution out;
  Eigen::VectorXd F = detail::power_flow_mismatch(net, slack, x, P, Q);
  double norm = F.size() ? F.lpNorm<Eigen::Infinity>() : 0.0;

  for (int it = 0; it < options.max_iterations && norm > options.tolerance; ++it) {
    out.iterations = it + 1;
    Eigen::MatrixXd jac = detail::power_flow_jacobian(net, slack, x);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (!lu.isInvertible()) break;
    Eigen::VectorXd step = lu.solve(-F);

    double t = 1.0;
    bool improved = false;
    for (int h = 0; h <= options.max_halvings; ++h, t *= 0.5) {
      Eigen::VectorXd trial = x + t * step;
      Eigen::VectorXd Ft = detail::power_flow_mismatch(net, slack, trial, P, Q);
      double nt = Ft.lpNorm<Eigen::Infinity>();
      if (nt < norm) {
        x = std::move(trial);
        F = std::move(Ft);
        norm = nt;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }

  layout.unpack(x, out.e, out.f);
  out.mismatch = norm;
  out.converged = norm <= options.tolerance || norm <= options.stall_accept;
  return out;
}

}  // namespace gridrecover
