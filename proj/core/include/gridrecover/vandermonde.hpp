#pragma once

#include <iosfwd>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "gridrecover/network.hpp"
#include "gridrecover/states.hpp"

namespace gridrecover {

enum class Part { Conductance, Susceptance };

struct Column {
  EdgeKey edge;
  Part part = Part::Conductance;
};

/// Stacked linear system M_E(Omega) w - U(Omega) = power-flow residuals.
///
/// Rows follow the residual layout of `residuals()`: state-major, then node,
/// with (g_j, h_j) interleaved for AC. Columns are lexicographic by edge, and
/// for AC each edge contributes a (c, s) pair of adjacent columns.
struct VandermondeSystem {
  Kind kind = Kind::DC;
  int n = 0;
  std::size_t m = 0;
  EdgeSet edges;
  Eigen::MatrixXd matrix;
  Eigen::VectorXd response;
  std::vector<Column> columns;

  [[nodiscard]] int columns_per_edge() const noexcept { return kind == Kind::AC ? 2 : 1; }

  /// Column restriction to a subset of `edges`. Equivalent to assembling the
  /// subset directly. Throws std::invalid_argument for edges not present.
  [[nodiscard]] VandermondeSystem restrict_to(const EdgeSet& subset) const;

  /// Network (N, E, w) for a parameter vector laid out like the columns.
  [[nodiscard]] Network network(const Eigen::VectorXd& w) const;

  /// Parameter vector of `net` in this system's column layout (0 where absent).
  [[nodiscard]] Eigen::VectorXd parameters(const Network& net) const;
};

/// Block M_E(x) for one state: n x |E| (DC) or 2n x 2|E| (AC).
[[nodiscard]] Eigen::MatrixXd row_block(Kind kind, int n, const EdgeSet& edges,
                                        const State& x);

/// Throws std::invalid_argument on an empty edge set or edges outside 1..n.
[[nodiscard]] VandermondeSystem assemble(EdgeSet edges, const StateSet& set);

/// Relative rank threshold below which the condition number is reported as
/// +infinity.
inline constexpr double kRankThreshold = 1e-13;

/// sigma_max / sigma_min, or +infinity when sigma_min / sigma_max < kRankThreshold
/// (including wide matrices, which are always rank deficient).
[[nodiscard]] double condition_number(const Eigen::MatrixXd& matrix);
[[nodiscard]] double condition_number(const VandermondeSystem& sys);

/// Debug dump: one row per equation, columns labelled c_j_k / s_j_k then U.
void write_csv(const VandermondeSystem& sys, std::ostream& out);

}  // namespace gridrecover
