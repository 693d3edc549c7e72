#include "gridrecover/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gridrecover {

namespace {

void check_endpoints(int n, int j, int k) {
  if (j < 1 || k < 1 || j > n || k > n) {
    throw std::invalid_argument("edge (" + std::to_string(j) + "," + std::to_string(k) +
                                ") references a node outside 1.." + std::to_string(n));
  }
  if (j == k) {
    throw std::invalid_argument("loop at node " + std::to_string(j));
  }
}

void check_weight(double w, const char* what) {
  if (!std::isfinite(w) || w < 0.0) {
    throw std::invalid_argument(std::string(what) + " must be finite and non-negative");
  }
}

template <typename E>
void canonicalize(int n, std::vector<E>& edges) {
  for (auto& e : edges) {
    check_endpoints(n, e.j, e.k);
    if (e.j > e.k) std::swap(e.j, e.k);
  }
  std::sort(edges.begin(), edges.end(),
            [](const E& a, const E& b) { return a.key() < b.key(); });
  auto dup = std::adjacent_find(edges.begin(), edges.end(),
                                [](const E& a, const E& b) { return a.key() == b.key(); });
  if (dup != edges.end()) {
    throw std::invalid_argument("duplicate edge (" + std::to_string(dup->j) + "," +
                                std::to_string(dup->k) + ")");
  }
}

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) { parent_[find(a)] = find(b); }

 private:
  std::vector<int> parent_;
};

Connectivity label(int n, const std::vector<EdgeKey>& support) {
  DisjointSets sets(n);
  for (const auto& e : support) sets.unite(e.j - 1, e.k - 1);
  Connectivity out;
  out.component.assign(static_cast<std::size_t>(n), -1);
  out.support_edges = support.size();
  std::vector<int> root_label(static_cast<std::size_t>(n), -1);
  for (int v = 0; v < n; ++v) {
    int r = sets.find(v);
    if (root_label[r] < 0) root_label[r] = out.count++;
    out.component[v] = root_label[r];
  }
  return out;
}

}  // namespace

EdgeSet complete_edges(int n) {
  EdgeSet out;
  out.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int j = 1; j <= n; ++j)
    for (int k = j + 1; k <= n; ++k) out.push_back({j, k});
  return out;
}

WeightedGraph::WeightedGraph(int n, std::vector<WeightedEdge> edges)
    : n_(n), edges_(std::move(edges)) {
  if (n < 1) throw std::invalid_argument("graph needs at least one node");
  for (const auto& e : edges_) check_weight(e.w, "edge weight");
  canonicalize(n_, edges_);
}

std::size_t WeightedGraph::support_size() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [](const auto& e) { return e.w > 0.0; }));
}

double WeightedGraph::weight(int j, int k) const noexcept {
  EdgeKey key{std::min(j, k), std::max(j, k)};
  auto it = std::lower_bound(edges_.begin(), edges_.end(), key,
                             [](const WeightedEdge& e, const EdgeKey& x) { return e.key() < x; });
  return (it != edges_.end() && it->key() == key) ? it->w : 0.0;
}

WeightedGraph WeightedGraph::normalized() const {
  std::vector<WeightedEdge> kept;
  std::copy_if(edges_.begin(), edges_.end(), std::back_inserter(kept),
               [](const auto& e) { return e.w > 0.0; });
  return WeightedGraph(n_, std::move(kept));
}

Network::Network(Kind kind, int n, std::vector<Edge> edges)
    : kind_(kind), n_(n), edges_(std::move(edges)) {
  if (n < 1) throw std::invalid_argument("network needs at least one node");
  for (const auto& e : edges_) {
    check_weight(e.c, "conductance");
    check_weight(e.s, "susceptance");
    if (kind_ == Kind::DC && e.s != 0.0) {
      throw std::invalid_argument("DC network edge has nonzero susceptance");
    }
  }
  canonicalize(n_, edges_);
}

EdgeSet Network::edge_set() const {
  EdgeSet out;
  out.reserve(edges_.size());
  for (const auto& e : edges_) out.push_back(e.key());
  return out;
}

const Edge* Network::find(int j, int k) const noexcept {
  EdgeKey key{std::min(j, k), std::max(j, k)};
  auto it = std::lower_bound(edges_.begin(), edges_.end(), key,
                             [](const Edge& e, const EdgeKey& x) { return e.key() < x; });
  return (it != edges_.end() && it->key() == key) ? &*it : nullptr;
}

std::size_t Network::support_size() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      edges_.begin(), edges_.end(), [](const auto& e) { return e.c > 0.0 || e.s > 0.0; }));
}

Network Network::normalized() const {
  std::vector<Edge> kept;
  std::copy_if(edges_.begin(), edges_.end(), std::back_inserter(kept),
               [](const auto& e) { return e.c > 0.0 || e.s > 0.0; });
  return Network(kind_, n_, std::move(kept));
}

Eigen::MatrixXd laplacian(const WeightedGraph& g) {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(g.n(), g.n());
  for (const auto& e : g.edges()) {
    const int a = e.j - 1, b = e.k - 1;
    L(a, b) -= e.w;
    L(b, a) -= e.w;
    L(a, a) += e.w;
    L(b, b) += e.w;
  }
  return L;
}

Eigen::MatrixXcd admittance_matrix(const Network& net) {
  auto [cg, sg] = split_graphs(net);
  Eigen::MatrixXcd L(net.n(), net.n());
  L.real() = laplacian(cg);
  L.imag() = -laplacian(sg);
  return L;
}

std::pair<WeightedGraph, WeightedGraph> split_graphs(const Network& net) {
  std::vector<WeightedEdge> c, s;
  c.reserve(net.size());
  s.reserve(net.size());
  for (const auto& e : net.edges()) {
    c.push_back({e.j, e.k, e.c});
    s.push_back({e.j, e.k, e.s});
  }
  return {WeightedGraph(net.n(), std::move(c)), WeightedGraph(net.n(), std::move(s))};
}

Network merge_graphs(Kind kind, const WeightedGraph& conductance,
                     const WeightedGraph& susceptance) {
  if (conductance.n() != susceptance.n()) {
    throw std::invalid_argument("conductance and susceptance graphs differ in node count");
  }
  std::vector<Edge> merged;
  const auto& ce = conductance.edges();
  const auto& se = susceptance.edges();
  std::size_t a = 0, b = 0;
  while (a < ce.size() || b < se.size()) {
    if (b == se.size() || (a < ce.size() && ce[a].key() < se[b].key())) {
      merged.push_back({ce[a].j, ce[a].k, ce[a].w, 0.0});
      ++a;
    } else if (a == ce.size() || se[b].key() < ce[a].key()) {
      merged.push_back({se[b].j, se[b].k, 0.0, se[b].w});
      ++b;
    } else {
      merged.push_back({ce[a].j, ce[a].k, ce[a].w, se[b].w});
      ++a;
      ++b;
    }
  }
  if (kind == Kind::DC) {
    for (auto& e : merged) {
      if (e.s != 0.0) throw std::invalid_argument("DC merge with nonzero susceptance");
    }
  }
  return Network(kind, conductance.n(), std::move(merged));
}

Complex series_equivalent(Complex w1, Complex w2) {
  if (w1 == Complex{} || w2 == Complex{}) {
    throw std::domain_error("series equivalent of an open circuit is undefined");
  }
  return 1.0 / (1.0 / w1 + 1.0 / w2);
}

Connectivity connectivity(const WeightedGraph& g) {
  std::vector<EdgeKey> support;
  for (const auto& e : g.edges())
    if (e.w > 0.0) support.push_back(e.key());
  return label(g.n(), support);
}

Connectivity connectivity(const Network& net) {
  std::vector<EdgeKey> support;
  for (const auto& e : net.edges())
    if (e.c > 0.0 || e.s > 0.0) support.push_back(e.key());
  return label(net.n(), support);
}

}  // namespace gridrecover
