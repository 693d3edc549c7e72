#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridrecover/network.hpp"

namespace gridrecover {

/// One measurement snapshot: voltage v_j = e_j + i f_j and injected power
/// S_j = P_j + i Q_j at every node. DC states keep f and Q at zero.
struct State {
  Eigen::VectorXd e;
  Eigen::VectorXd f;
  Eigen::VectorXd P;
  Eigen::VectorXd Q;

  [[nodiscard]] static State zeros(int n);
  [[nodiscard]] Eigen::VectorXcd voltage() const;
  [[nodiscard]] Eigen::VectorXcd power() const;
  friend bool operator==(const State& a, const State& b);
};

/// The data set Omega: m >= 1 homogeneous states.
class StateSet {
 public:
  StateSet() = default;
  StateSet(Kind kind, int n, std::vector<State> states);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] std::size_t m() const noexcept { return states_.size(); }
  [[nodiscard]] const std::vector<State>& states() const noexcept { return states_; }
  [[nodiscard]] const State& operator[](std::size_t k) const { return states_[k]; }
  /// Number of scalar equations: nm (DC) or 2nm (AC).
  [[nodiscard]] std::size_t equation_count() const noexcept;

  friend bool operator==(const StateSet&, const StateSet&) = default;

 private:
  Kind kind_ = Kind::DC;
  int n_ = 0;
  std::vector<State> states_;
};

/// Power-flow residuals g_j (and h_j, interleaved per node for AC) for every
/// state, in state-major order. Evaluated edge by edge from the power flow
/// equations.
[[nodiscard]] Eigen::VectorXd residuals(const Network& net, const StateSet& set);

/// Same vector computed as V conj(L) conj(V) 1 - S per state.
[[nodiscard]] Eigen::VectorXd residuals_matrix_form(const Network& net, const StateSet& set);

/// Fitting error ||residuals|| / sqrt(nm) (DC) or / sqrt(2nm) (AC).
[[nodiscard]] double rms(const Network& net, const StateSet& set);

struct VoltageRange {
  double min = 0.9;
  double max = 1.1;
};

/// Samples voltages uniformly in the magnitude range (AC: angle uniform in
/// [-0.1, 0.1] rad) and derives the powers so each state is exact.
[[nodiscard]] StateSet generate_voltage_driven(const Network& net, std::size_t m,
                                               VoltageRange range, std::uint64_t seed);

enum class NodeRole { Slack, FixedPower, ZeroInjection };

struct NodeSpec {
  NodeRole role = NodeRole::FixedPower;
  double p_min = 0.0;
  double p_max = 0.0;
  double q_min = 0.0;
  double q_max = 0.0;
};

/// Per-node restrictions used when sampling states by solving power flow.
struct Scenario {
  std::vector<NodeSpec> nodes;
  double noise_sigma = 0.0;
  VoltageRange range{};
  int max_retries = 100;

  /// Node `slack` (1-based) is the slack bus, every other node draws P and Q
  /// uniformly from the given ranges.
  [[nodiscard]] static Scenario loads(int n, int slack, double p_min, double p_max,
                                      double q_min = 0.0, double q_max = 0.0);
  /// Throws std::invalid_argument unless exactly one slack node exists and
  /// every range is ordered.
  void validate(int n) const;
};

/// Raised when a state cannot be produced; `state_index` is 0-based.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::size_t state_index, const std::string& what)
      : std::runtime_error("state " + std::to_string(state_index) + ": " + what),
        state_index_(state_index) {}
  [[nodiscard]] std::size_t state_index() const noexcept { return state_index_; }

 private:
  std::size_t state_index_;
};

/// Samples injections per the scenario and solves power flow for each state
/// with the slack voltage fixed to 1. Noise, if any, is added afterwards.
[[nodiscard]] StateSet generate_scenario(const Network& net, const Scenario& scenario,
                                         std::size_t m, std::uint64_t seed);

/// Adds i.i.d. N(0, sigma^2) to every measured component (e, P; plus f, Q for AC).
[[nodiscard]] StateSet add_noise(const StateSet& set, double sigma, std::uint64_t seed);

/// Concatenates two state sets of the same kind and size.
[[nodiscard]] StateSet concat(const StateSet& a, const StateSet& b);

}  // namespace gridrecover
