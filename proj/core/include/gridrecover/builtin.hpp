#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "gridrecover/network.hpp"
#include "gridrecover/states.hpp"

namespace gridrecover::builtin {

/// Six-node DC network: triangle 1-2-3 with a weak line (1,2), joined by the
/// weak bridge (3,4) to the star 4-5, 4-6.
[[nodiscard]] Network table1_dc();

/// The 21 edges of the Heawood graph (cubic, girth 6) on nodes 1..14.
[[nodiscard]] EdgeSet heawood_edges();

/// Heawood topology with conductances drawn uniformly from [0.5, 100].
[[nodiscard]] Network heawood_dc(std::uint64_t seed);

/// Path 1-2-3 with c12 = 2, c23 = 3.
[[nodiscard]] Network path3_dc();

/// Random connected 6-node AC network: a random spanning tree plus three
/// extra edges, c and s uniform in [0.5, 100].
[[nodiscard]] Network small_ac(std::uint64_t seed);

/// Five-node AC network in which node 2 has degree 2 (neighbours 1 and 3)
/// and never injects power. Node 1 and node 3 are not adjacent.
[[nodiscard]] Network series_ac();

/// Node 1 slack, nodes 2..n draw P (and Q) uniformly from the given ranges.
[[nodiscard]] Scenario load_scenario(int n, double p_min, double p_max, double q_min = 0.0,
                                     double q_max = 0.0);

struct Case {
  std::string name;
  Network network;
  std::string scenario;  // human-readable description for provenance
  std::function<StateSet(std::size_t m, std::uint64_t seed)> sample;
};

[[nodiscard]] std::vector<std::string> names();

/// Named builtin case. `seed` only matters for randomized networks.
/// Throws std::invalid_argument for unknown names.
[[nodiscard]] Case make(std::string_view name, std::uint64_t seed);

}  // namespace gridrecover::builtin
