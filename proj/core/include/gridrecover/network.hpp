#pragma once

#include <complex>
#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace gridrecover {

using Complex = std::complex<double>;

enum class Kind { DC, AC };

[[nodiscard]] constexpr std::string_view to_string(Kind kind) noexcept {
  return kind == Kind::DC ? "dc" : "ac";
}

/// Undirected edge between two 1-based node ids, stored with j < k.
struct EdgeKey {
  int j = 0;
  int k = 0;

  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

using EdgeSet = std::vector<EdgeKey>;

/// All n(n-1)/2 edges of the complete graph, lexicographic.
[[nodiscard]] EdgeSet complete_edges(int n);

/// A line with conductance c and susceptance s (admittance w = c - i s).
struct Edge {
  int j = 0;
  int k = 0;
  double c = 0.0;
  double s = 0.0;

  [[nodiscard]] EdgeKey key() const noexcept { return {j, k}; }
  [[nodiscard]] Complex admittance() const noexcept { return {c, -s}; }
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct WeightedEdge {
  int j = 0;
  int k = 0;
  double w = 0.0;

  [[nodiscard]] EdgeKey key() const noexcept { return {j, k}; }
  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

/// Real weighted graph on nodes 1..n. Edges are canonicalized (j < k) and
/// kept in lexicographic order; loops, duplicates and negative weights are
/// rejected with std::invalid_argument.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  WeightedGraph(int n, std::vector<WeightedEdge> edges);

  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] const std::vector<WeightedEdge>& edges() const noexcept { return edges_; }
  [[nodiscard]] std::size_t size() const noexcept { return edges_.size(); }
  /// Number of edges with strictly positive weight.
  [[nodiscard]] std::size_t support_size() const noexcept;
  /// Weight of (j,k) in either order; 0 when absent.
  [[nodiscard]] double weight(int j, int k) const noexcept;
  /// Copy without the zero-weight edges.
  [[nodiscard]] WeightedGraph normalized() const;

  friend bool operator==(const WeightedGraph&, const WeightedGraph&) = default;

 private:
  int n_ = 0;
  std::vector<WeightedEdge> edges_;
};

/// Electrical network Gamma = (N, E, w). For DC every susceptance must be 0.
class Network {
 public:
  Network() = default;
  Network(Kind kind, int n, std::vector<Edge> edges);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
  [[nodiscard]] std::size_t size() const noexcept { return edges_.size(); }
  [[nodiscard]] EdgeSet edge_set() const;
  /// Edge in either orientation, nullptr when absent.
  [[nodiscard]] const Edge* find(int j, int k) const noexcept;
  /// Edges with c > 0 or s > 0.
  [[nodiscard]] std::size_t support_size() const noexcept;
  /// Copy without edges whose parameters are all zero.
  [[nodiscard]] Network normalized() const;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  Kind kind_ = Kind::DC;
  int n_ = 0;
  std::vector<Edge> edges_;
};

/// Real Laplacian: off-diagonal -w_jk, diagonal the incident weight sum.
[[nodiscard]] Eigen::MatrixXd laplacian(const WeightedGraph& g);

/// L = L^c - i L^s.
[[nodiscard]] Eigen::MatrixXcd admittance_matrix(const Network& net);

/// Conductance graph and susceptance graph over the same edge carrier.
[[nodiscard]] std::pair<WeightedGraph, WeightedGraph> split_graphs(const Network& net);

/// Inverse of split_graphs. The two graphs may have different edge sets; an
/// edge missing from one side gets a zero parameter on that side. Edges that
/// end up with all-zero parameters are kept.
[[nodiscard]] Network merge_graphs(Kind kind, const WeightedGraph& conductance,
                                   const WeightedGraph& susceptance);

/// Admittance of the single line equivalent to w1 and w2 in series:
/// 1/w = 1/w1 + 1/w2. Throws std::domain_error when either input is zero.
[[nodiscard]] Complex series_equivalent(Complex w1, Complex w2);

/// Connected components of the positive-weight support.
struct Connectivity {
  std::vector<int> component;  // indexed by node id - 1
  int count = 0;
  std::size_t support_edges = 0;

  [[nodiscard]] bool is_connected() const noexcept { return count == 1; }
  [[nodiscard]] bool is_spanning_tree() const noexcept {
    return count == 1 && support_edges + 1 == component.size();
  }
};

[[nodiscard]] Connectivity connectivity(const WeightedGraph& g);
/// Support is the set of edges with c > 0 or s > 0.
[[nodiscard]] Connectivity connectivity(const Network& net);

}  // namespace gridrecover
