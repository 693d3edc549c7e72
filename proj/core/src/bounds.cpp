#include "gridrecover/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "gridrecover/linalg.hpp"

namespace gridrecover {

namespace {

void require_kind(const Network& net, const StateSet& set, Kind kind) {
  if (net.kind() != kind || set.kind() != kind) {
    throw std::invalid_argument(std::string("bound requires ") + std::string(to_string(kind)) +
                                " network and states");
  }
  if (net.n() != set.n()) throw std::invalid_argument("network and states differ in size");
}

void require_nonzero_voltage(const StateSet& set) {
  for (std::size_t k = 0; k < set.m(); ++k) {
    if ((set[k].e.array() == 0.0).any()) {
      throw std::invalid_argument("state " + std::to_string(k) + " has a zero voltage");
    }
  }
}

// max_k || D_k L D_k || over per-state diagonal scalings.
template <typename Diag>
double max_block_norm(const Eigen::MatrixXd& L, const StateSet& set, Diag diag) {
  double best = 0.0;
  for (std::size_t k = 0; k < set.m(); ++k) {
    const Eigen::VectorXd d = diag(set[k]);
    const Eigen::MatrixXd block = d.asDiagonal() * L * d.asDiagonal();
    best = std::max(best, linalg::symmetric_norm(block));
  }
  return best;
}

}  // namespace

Eigen::VectorXd phi_vector(const StateSet& set) {
  if (set.kind() != Kind::DC) throw std::invalid_argument("phi_vector is defined for DC states");
  require_nonzero_voltage(set);
  const int n = set.n();
  Eigen::VectorXd phi(static_cast<Eigen::Index>(set.m()) * n);
  for (std::size_t k = 0; k < set.m(); ++k) {
    const Eigen::ArrayXd inv = set[k].e.array().inverse();
    const double lambda = inv.sum() / inv.square().sum();
    phi.segment(static_cast<Eigen::Index>(k) * n, n).setConstant(lambda);
  }
  return phi;
}

double kernel_shift_norm(const StateSet& set, const Eigen::VectorXd& lambda_per_state) {
  if (lambda_per_state.size() != static_cast<Eigen::Index>(set.m())) {
    throw std::invalid_argument("need one lambda per state");
  }
  double sq = 0.0;
  for (std::size_t k = 0; k < set.m(); ++k) {
    const Eigen::ArrayXd r =
        1.0 - lambda_per_state(static_cast<Eigen::Index>(k)) / set[k].e.array();
    sq += r.square().sum();
  }
  return std::sqrt(sq);
}

BoundReport dc_bound(const Network& net, const StateSet& set, double eps) {
  require_kind(net, set, Kind::DC);
  require_nonzero_voltage(set);
  const auto [cg, sg] = split_graphs(net);
  const Eigen::MatrixXd L = laplacian(cg);
  const double vlv = max_block_norm(L, set, [](const State& x) { return x.e; });

  const Eigen::VectorXd phi = phi_vector(set);
  Eigen::VectorXd lambda(static_cast<Eigen::Index>(set.m()));
  for (std::size_t k = 0; k < set.m(); ++k)
    lambda(static_cast<Eigen::Index>(k)) = phi(static_cast<Eigen::Index>(k) * set.n());
  const double shift = kernel_shift_norm(set, lambda);

  BoundReport r;
  r.variant = BoundVariant::Fine;
  r.rms_base = rms(net, set);
  r.epsilon = eps;
  r.bound_term = vlv * shift / std::sqrt(static_cast<double>(set.m() * set.n()));
  r.bound_total = r.rms_base + eps * r.bound_term;
  return r;
}

BoundReport dc_bound_coarse(const Network& net, const StateSet& set, double eps, double vmin,
                            double vmax) {
  require_kind(net, set, Kind::DC);
  if (!(vmin > 0.0) || vmin > 1.0 || vmax < vmin) {
    throw std::invalid_argument("coarse bound needs 0 < vmin <= 1 and vmin <= vmax");
  }
  for (std::size_t k = 0; k < set.m(); ++k) {
    const Eigen::ArrayXd mag = set[k].e.array().abs();
    if ((mag < vmin).any() || (mag > vmax).any()) {
      throw std::invalid_argument("state " + std::to_string(k) +
                                  " has a voltage outside the declared range");
    }
  }
  const auto [cg, sg] = split_graphs(net);
  const double rho = std::max((1.0 - vmin) / vmin, (vmax - 1.0) / vmax);
  BoundReport r;
  r.variant = BoundVariant::Coarse;
  r.rms_base = rms(net, set);
  r.epsilon = eps;
  r.bound_term = vmax * vmax * rho * linalg::symmetric_norm(laplacian(cg));
  r.bound_total = r.rms_base + eps * r.bound_term;
  return r;
}

double ac_delta(const Network& net, const StateSet& set) {
  require_kind(net, set, Kind::AC);
  const auto [cg, sg] = split_graphs(net);
  const Eigen::MatrixXd Lc = laplacian(cg);
  const Eigen::MatrixXd Ls = laplacian(sg);
  auto real_part = [](const State& x) { return x.e; };
  auto imag_part = [](const State& x) { return x.f; };

  const double ece_c = max_block_norm(Lc, set, real_part);
  const double fcf_c = max_block_norm(Lc, set, imag_part);
  const double ece_s = max_block_norm(Ls, set, real_part);
  const double fcf_s = max_block_norm(Ls, set, imag_part);
  const double norm_c = linalg::symmetric_norm(Lc);
  const double norm_s = linalg::symmetric_norm(Ls);

  double e_max = 0.0, f_max = 0.0, e_sq = 0.0, f_sq = 0.0;
  for (const auto& x : set.states()) {
    e_max = std::max(e_max, x.e.cwiseAbs().maxCoeff());
    f_max = std::max(f_max, x.f.cwiseAbs().maxCoeff());
    e_sq += x.e.squaredNorm();
    f_sq += x.f.squaredNorm();
  }
  const double e_one = std::sqrt(e_sq);
  const double f_one = std::sqrt(f_sq);
  const double root_mn = std::sqrt(static_cast<double>(set.m() * set.n()));

  const double first = root_mn * (ece_c + fcf_c) + norm_s * (e_max * f_one + f_max * e_one);
  const double second = root_mn * (ece_s + fcf_s) + norm_c * (f_max * e_one + e_max * f_one);
  return std::sqrt(first * first + second * second);
}

BoundReport ac_bound(const Network& net, const StateSet& set, double eps) {
  BoundReport r;
  r.variant = BoundVariant::AC;
  r.rms_base = rms(net, set);
  r.epsilon = eps;
  r.bound_term = ac_delta(net, set) / std::sqrt(2.0 * static_cast<double>(set.m() * set.n()));
  r.bound_total = r.rms_base + eps * r.bound_term;
  return r;
}

}  // namespace gridrecover
