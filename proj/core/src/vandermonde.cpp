#include "gridrecover/vandermonde.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include <Eigen/SVD>

namespace gridrecover {

namespace {

EdgeSet canonical(EdgeSet edges, int n) {
  for (auto& e : edges) {
    if (e.j > e.k) std::swap(e.j, e.k);
    if (e.j < 1 || e.k > n || e.j == e.k) {
      throw std::invalid_argument("edge outside the node range or a loop");
    }
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw std::invalid_argument("duplicate edge in edge set");
  }
  return edges;
}

void fill_block(Kind kind, const EdgeSet& edges, const State& x, Eigen::Ref<Eigen::MatrixXd> b) {
  const auto& e = x.e;
  const auto& f = x.f;
  for (std::size_t col = 0; col < edges.size(); ++col) {
    const int j = edges[col].j - 1, k = edges[col].k - 1;
    const double alpha_jk = e(j) * e(j) + f(j) * f(j) - e(j) * e(k) - f(j) * f(k);
    const double alpha_kj = e(k) * e(k) + f(k) * f(k) - e(k) * e(j) - f(k) * f(j);
    if (kind == Kind::DC) {
      b(j, col) = alpha_jk;
      b(k, col) = alpha_kj;
      continue;
    }
    const double beta_jk = e(j) * f(k) - e(k) * f(j);
    const double beta_kj = -beta_jk;
    const Eigen::Index c = 2 * static_cast<Eigen::Index>(col);
    b(2 * j, c) = alpha_jk;
    b(2 * j, c + 1) = -beta_jk;
    b(2 * j + 1, c) = beta_jk;
    b(2 * j + 1, c + 1) = alpha_jk;
    b(2 * k, c) = alpha_kj;
    b(2 * k, c + 1) = -beta_kj;
    b(2 * k + 1, c) = beta_kj;
    b(2 * k + 1, c + 1) = alpha_kj;
  }
}

std::vector<Column> column_map(Kind kind, const EdgeSet& edges) {
  std::vector<Column> cols;
  for (const auto& e : edges) {
    cols.push_back({e, Part::Conductance});
    if (kind == Kind::AC) cols.push_back({e, Part::Susceptance});
  }
  return cols;
}

}  // namespace

Eigen::MatrixXd row_block(Kind kind, int n, const EdgeSet& edges, const State& x) {
  const int per = kind == Kind::AC ? 2 : 1;
  EdgeSet canon = canonical(edges, n);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(per * n, per * static_cast<Eigen::Index>(canon.size()));
  fill_block(kind, canon, x, b);
  return b;
}

VandermondeSystem assemble(EdgeSet edges, const StateSet& set) {
  if (edges.empty()) throw std::invalid_argument("cannot assemble a system with no edges");
  VandermondeSystem sys;
  sys.kind = set.kind();
  sys.n = set.n();
  sys.m = set.m();
  sys.edges = canonical(std::move(edges), set.n());
  sys.columns = column_map(sys.kind, sys.edges);

  const int per = sys.columns_per_edge();
  const Eigen::Index block_rows = per * sys.n;
  sys.matrix = Eigen::MatrixXd::Zero(block_rows * static_cast<Eigen::Index>(sys.m),
                                     static_cast<Eigen::Index>(sys.columns.size()));
  sys.response.resize(sys.matrix.rows());
  for (std::size_t k = 0; k < sys.m; ++k) {
    const Eigen::Index r0 = static_cast<Eigen::Index>(k) * block_rows;
    fill_block(sys.kind, sys.edges, set[k], sys.matrix.middleRows(r0, block_rows));
    for (int j = 0; j < sys.n; ++j) {
      sys.response(r0 + per * j) = set[k].P(j);
      if (per == 2) sys.response(r0 + per * j + 1) = set[k].Q(j);
    }
  }
  return sys;
}

VandermondeSystem VandermondeSystem::restrict_to(const EdgeSet& subset) const {
  EdgeSet sub = canonical(subset, n);
  const int per = columns_per_edge();
  VandermondeSystem out;
  out.kind = kind;
  out.n = n;
  out.m = m;
  out.edges = sub;
  out.columns = column_map(kind, sub);
  out.response = response;
  out.matrix.resize(matrix.rows(), static_cast<Eigen::Index>(out.columns.size()));
  for (std::size_t i = 0; i < sub.size(); ++i) {
    auto it = std::lower_bound(edges.begin(), edges.end(), sub[i]);
    if (it == edges.end() || *it != sub[i]) {
      throw std::invalid_argument("restriction edge (" + std::to_string(sub[i].j) + "," +
                                  std::to_string(sub[i].k) + ") is not a column of the system");
    }
    const auto src = static_cast<Eigen::Index>(it - edges.begin()) * per;
    out.matrix.middleCols(static_cast<Eigen::Index>(i) * per, per) = matrix.middleCols(src, per);
  }
  return out;
}

Network VandermondeSystem::network(const Eigen::VectorXd& w) const {
  if (w.size() != static_cast<Eigen::Index>(columns.size())) {
    throw std::invalid_argument("parameter vector length does not match the column count");
  }
  const int per = columns_per_edge();
  std::vector<Edge> out;
  out.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto c0 = static_cast<Eigen::Index>(i) * per;
    out.push_back({edges[i].j, edges[i].k, std::max(0.0, w(c0)),
                   per == 2 ? std::max(0.0, w(c0 + 1)) : 0.0});
  }
  return Network(kind, n, std::move(out));
}

Eigen::VectorXd VandermondeSystem::parameters(const Network& net) const {
  const int per = columns_per_edge();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(columns.size()));
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (const Edge* e = net.find(edges[i].j, edges[i].k)) {
      w(static_cast<Eigen::Index>(i) * per) = e->c;
      if (per == 2) w(static_cast<Eigen::Index>(i) * per + 1) = e->s;
    }
  }
  return w;
}

double condition_number(const Eigen::MatrixXd& matrix) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (matrix.size() == 0 || matrix.cols() > matrix.rows()) return inf;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(matrix);
  const auto& sv = svd.singularValues();
  const double top = sv(0);
  const double bottom = sv(sv.size() - 1);
  if (!(top > 0.0) || bottom / top < kRankThreshold) return inf;
  return top / bottom;
}

double condition_number(const VandermondeSystem& sys) { return condition_number(sys.matrix); }

void write_csv(const VandermondeSystem& sys, std::ostream& out) {
  for (const auto& c : sys.columns) {
    out << (c.part == Part::Conductance ? "c_" : "s_") << c.edge.j << '_' << c.edge.k << ',';
  }
  out << "U\n";
  out << std::setprecision(17);
  for (Eigen::Index r = 0; r < sys.matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < sys.matrix.cols(); ++c) out << sys.matrix(r, c) << ',';
    out << sys.response(r) << '\n';
  }
}

}  // namespace gridrecover
