#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gridrecover/network.hpp"

namespace gridrecover {

/// Per-edge spectral statistics of a weighted graph.
///
/// `leverage` is w * r_eff, clamped to [0, 1]; it equals 1 on bridges. The
/// sampling probability `p` is the leverage normalized over positive-weight
/// edges. Zero-weight edges get p = 0, and r_eff = +inf if their endpoints sit
/// in different components.
struct EdgeStat {
  EdgeKey edge;
  double weight = 0.0;
  double r_eff = 0.0;
  double leverage = 0.0;
  double p = 0.0;
};

struct EdgeStatistics {
  int n = 0;
  int components = 0;
  std::vector<EdgeStat> edges;

  [[nodiscard]] double leverage_sum() const noexcept;
};

/// Effective resistances through the Laplacian pseudoinverse. Resistances are
/// computed within components of the positive-weight support.
[[nodiscard]] EdgeStatistics effective_resistances(const WeightedGraph& g);

/// t = ceil(8 n ln(n) / eps^2), at least 1.
[[nodiscard]] std::int64_t sample_count(int n, double eps);

struct SparsifyOutcome {
  WeightedGraph graph;
  std::int64_t samples = 0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
};

/// Draws t edges with replacement with probability p and gives each sampled
/// edge weight count * w / (t p). Deterministic for a given seed.
/// Throws std::invalid_argument if eps <= 0 or the graph has no positive edge.
[[nodiscard]] SparsifyOutcome sparsify_dc(const WeightedGraph& g, double eps, std::uint64_t seed);

struct NetworkSparsifyOutcome {
  Network network;
  SparsifyOutcome conductance;
  std::optional<SparsifyOutcome> susceptance;  // empty when the network has no s > 0
};

/// Sparsifies the conductance and susceptance graphs independently and takes
/// the union of their edge sets, zero-filling the side an edge was not drawn
/// on. For a DC network this is sparsify_dc on the conductance graph with the
/// same seed.
[[nodiscard]] NetworkSparsifyOutcome sparsify_ac(const Network& net, double eps,
                                                 std::uint64_t seed);

/// True iff (1+eps) L - L2 and L2 - L/(1+eps) are both PSD, up to
/// -tol * ||L|| on their smallest eigenvalues.
[[nodiscard]] bool is_epsilon_approximation(const WeightedGraph& g, const WeightedGraph& g2,
                                            double eps, double tol = 1e-9);

/// Networks: both the conductance and susceptance graphs must approximate.
[[nodiscard]] bool is_epsilon_approximation(const Network& net, const Network& net2, double eps,
                                            double tol = 1e-9);

}  // namespace gridrecover
