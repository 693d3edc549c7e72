#include "gridrecover/sparsifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "gridrecover/linalg.hpp"
#include "gridrecover/random.hpp"

namespace gridrecover {

double EdgeStatistics::leverage_sum() const noexcept {
  double total = 0.0;
  for (const auto& e : edges) total += e.leverage;
  return total;
}

EdgeStatistics effective_resistances(const WeightedGraph& g) {
  const Eigen::MatrixXd pinv = linalg::psd_pseudo_inverse(laplacian(g), 1e-12);
  const Connectivity comp = connectivity(g);

  EdgeStatistics out;
  out.n = g.n();
  out.components = comp.count;
  out.edges.reserve(g.size());
  double total = 0.0;
  for (const auto& e : g.edges()) {
    const int a = e.j - 1, b = e.k - 1;
    EdgeStat st;
    st.edge = e.key();
    st.weight = e.w;
    if (comp.component[a] != comp.component[b]) {
      if (e.w > 0.0) throw std::logic_error("positive edge joins two components");
      st.r_eff = std::numeric_limits<double>::infinity();
    } else {
      st.r_eff = std::max(0.0, pinv(a, a) + pinv(b, b) - 2.0 * pinv(a, b));
      st.leverage = std::clamp(e.w * st.r_eff, 0.0, 1.0);
    }
    if (e.w > 0.0) total += st.leverage;
    out.edges.push_back(st);
  }
  if (total > 0.0) {
    for (auto& st : out.edges)
      if (st.weight > 0.0) st.p = st.leverage / total;
  }
  return out;
}

std::int64_t sample_count(int n, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const double t = std::ceil(8.0 * n * std::log(static_cast<double>(n)) / (eps * eps));
  constexpr double cap = 4.0e18;
  if (!(t < cap)) return static_cast<std::int64_t>(cap);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(t));
}

SparsifyOutcome sparsify_dc(const WeightedGraph& g, double eps, std::uint64_t seed) {
  const std::int64_t t = sample_count(g.n(), eps);
  const EdgeStatistics stats = effective_resistances(g);

  std::vector<const EdgeStat*> pool;
  for (const auto& st : stats.edges)
    if (st.weight > 0.0 && st.p > 0.0) pool.push_back(&st);
  if (pool.empty()) throw std::invalid_argument("graph has no positive-weight edge to sample");

  // Multinomial draw of t samples as a chain of conditional binomials.
  std::mt19937_64 rng(seed);
  std::vector<WeightedEdge> kept;
  std::int64_t remaining = t;
  double mass = 1.0;
  for (std::size_t i = 0; i < pool.size() && remaining > 0; ++i) {
    const EdgeStat& st = *pool[i];
    std::int64_t count = remaining;
    if (i + 1 < pool.size()) {
      const double q = std::clamp(st.p / mass, 0.0, 1.0);
      count = std::binomial_distribution<std::int64_t>(remaining, q)(rng);
    }
    remaining -= count;
    mass -= st.p;
    if (count > 0) {
      const double w = static_cast<double>(count) * st.weight /
                       (static_cast<double>(t) * st.p);
      kept.push_back({st.edge.j, st.edge.k, w});
    }
  }
  return {WeightedGraph(g.n(), std::move(kept)), t, eps, seed};
}

NetworkSparsifyOutcome sparsify_ac(const Network& net, double eps, std::uint64_t seed) {
  auto [cg, sg] = split_graphs(net);
  NetworkSparsifyOutcome out;
  const bool has_c = cg.support_size() > 0;
  const bool has_s = sg.support_size() > 0;
  if (!has_c && !has_s) throw std::invalid_argument("network has no positive-weight edge");

  WeightedGraph c_side(net.n(), {});
  WeightedGraph s_side(net.n(), {});
  if (has_c) {
    out.conductance = sparsify_dc(cg, eps, seed);
    c_side = out.conductance.graph;
  } else {
    out.conductance = {c_side, sample_count(net.n(), eps), eps, seed};
  }
  if (has_s) {
    out.susceptance = sparsify_dc(sg, eps, derive_seed(seed, 1));
    s_side = out.susceptance->graph;
  }
  out.network = merge_graphs(net.kind(), c_side, s_side);
  return out;
}

bool is_epsilon_approximation(const WeightedGraph& g, const WeightedGraph& g2, double eps,
                              double tol) {
  if (g.n() != g2.n()) return false;
  if (eps < 0.0) throw std::invalid_argument("epsilon must be non-negative");
  const Eigen::MatrixXd L = laplacian(g);
  const Eigen::MatrixXd L2 = laplacian(g2);
  const double slack = tol * linalg::symmetric_norm(L);
  const Eigen::MatrixXd upper = (1.0 + eps) * L - L2;
  const Eigen::MatrixXd lower = L2 - L / (1.0 + eps);
  return linalg::min_eigenvalue(upper) >= -slack && linalg::min_eigenvalue(lower) >= -slack;
}

bool is_epsilon_approximation(const Network& net, const Network& net2, double eps, double tol) {
  if (net.n() != net2.n()) return false;
  auto [c1, s1] = split_graphs(net);
  auto [c2, s2] = split_graphs(net2);
  return is_epsilon_approximation(c1, c2, eps, tol) && is_epsilon_approximation(s1, s2, eps, tol);
}

}  // namespace gridrecover
