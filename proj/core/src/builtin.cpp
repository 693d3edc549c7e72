#include "gridrecover/builtin.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "gridrecover/random.hpp"

namespace gridrecover::builtin {

Network table1_dc() {
  return Network(Kind::DC, 6,
                 {{1, 2, 0.5799, 0.0},
                  {1, 3, 75.980, 0.0},
                  {2, 3, 75.979, 0.0},
                  {3, 4, 0.4698, 0.0},
                  {4, 5, 94.599, 0.0},
                  {4, 6, 79.909, 0.0}});
}

EdgeSet heawood_edges() {
  EdgeSet out;
  for (int j = 1; j <= 14; ++j) out.push_back({std::min(j, j % 14 + 1), std::max(j, j % 14 + 1)});
  // chords join each odd node to the node five steps ahead
  for (int j = 1; j <= 13; j += 2) {
    const int k = (j + 4) % 14 + 1;
    out.push_back({std::min(j, k), std::max(j, k)});
  }
  std::sort(out.begin(), out.end());
  return out;
}

Network heawood_dc(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> c(0.5, 100.0);
  std::vector<Edge> edges;
  for (const auto& e : heawood_edges()) edges.push_back({e.j, e.k, c(rng), 0.0});
  return Network(Kind::DC, 14, std::move(edges));
}

Network path3_dc() { return Network(Kind::DC, 3, {{1, 2, 2.0, 0.0}, {2, 3, 3.0, 0.0}}); }

Network small_ac(std::uint64_t seed) {
  constexpr int n = 6;
  std::mt19937_64 rng(seed);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 1);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<EdgeKey> keys;
  auto add = [&](int a, int b) {
    const EdgeKey key{std::min(a, b), std::max(a, b)};
    if (std::find(keys.begin(), keys.end(), key) != keys.end()) return false;
    keys.push_back(key);
    return true;
  };
  for (int i = 1; i < n; ++i) {
    const int parent = std::uniform_int_distribution<int>(0, i - 1)(rng);
    add(order[i], order[parent]);
  }
  std::uniform_int_distribution<int> node(1, n);
  for (int extra = 0; extra < 3;) {
    const int a = node(rng), b = node(rng);
    if (a != b && add(a, b)) ++extra;
  }
  std::sort(keys.begin(), keys.end());
  std::uniform_real_distribution<double> value(0.5, 100.0);
  std::vector<Edge> edges;
  for (const auto& k : keys) {
    const double c = value(rng);
    const double s = value(rng);
    edges.push_back({k.j, k.k, c, s});
  }
  return Network(Kind::AC, n, std::move(edges));
}

Network series_ac() {
  return Network(Kind::AC, 5,
                 {{1, 2, 16.7913, 2.6154},
                  {1, 4, 4.0, 6.5},
                  {2, 3, 1.1999, 3.8157},
                  {3, 4, 7.5, 3.0},
                  {3, 5, 2.5, 8.0},
                  {4, 5, 12.0, 5.5}});
}

Scenario load_scenario(int n, double p_min, double p_max, double q_min, double q_max) {
  return Scenario::loads(n, 1, p_min, p_max, q_min, q_max);
}

std::vector<std::string> names() {
  return {"table1_dc", "heawood_dc", "path3_dc", "small_ac", "series_ac"};
}

Case make(std::string_view name, std::uint64_t seed) {
  if (name == "table1_dc") {
    Network net = table1_dc();
    return {"table1_dc", net, "slack node 1 at v=1; nodes 2-6 draw P uniform in [-0.01, 0]",
            [net](std::size_t m, std::uint64_t s) {
              return generate_scenario(net, load_scenario(6, -0.01, 0.0), m, s);
            }};
  }
  if (name == "heawood_dc") {
    Network net = heawood_dc(derive_seed(seed, 0));
    return {"heawood_dc", net, "voltages uniform in [0.9, 1.1], powers from the power flow equations",
            [net](std::size_t m, std::uint64_t s) {
              return generate_voltage_driven(net, m, VoltageRange{}, s);
            }};
  }
  if (name == "path3_dc") {
    Network net = path3_dc();
    Scenario sc = load_scenario(3, -0.1, 0.0);
    sc.nodes[1].role = NodeRole::ZeroInjection;
    return {"path3_dc", net, "slack node 1; node 2 zero injection; node 3 draws P uniform in [-0.1, 0]",
            [net, sc](std::size_t m, std::uint64_t s) { return generate_scenario(net, sc, m, s); }};
  }
  if (name == "small_ac") {
    Network net = small_ac(derive_seed(seed, 0));
    return {"small_ac",
            net,
            "voltage magnitudes uniform in [0.9, 1.1], angles uniform in [-0.1, 0.1] rad",
            [net](std::size_t m, std::uint64_t s) {
              return generate_voltage_driven(net, m, VoltageRange{}, s);
            }};
  }
  if (name == "series_ac") {
    Network net = series_ac();
    Scenario sc = load_scenario(5, -0.05, 0.0, -0.02, 0.0);
    sc.nodes[1].role = NodeRole::ZeroInjection;
    return {"series_ac", net,
            "slack node 1; node 2 zero injection; nodes 3-5 draw P in [-0.05, 0], Q in [-0.02, 0]",
            [net, sc](std::size_t m, std::uint64_t s) { return generate_scenario(net, sc, m, s); }};
  }
  throw std::invalid_argument("unknown builtin \"" + std::string(name) + "\"");
}

}  // namespace gridrecover::builtin
