#include "gridrecover/states.hpp"

#include <cmath>
#include <random>

#include "gridrecover/power_flow.hpp"
#include "gridrecover/random.hpp"

namespace gridrecover {

namespace {

void check_compatible(const Network& net, const StateSet& set) {
  if (net.n() != set.n()) {
    throw std::invalid_argument("network has " + std::to_string(net.n()) +
                                " nodes but states have " + std::to_string(set.n()));
  }
  if (net.kind() != set.kind()) {
    throw std::invalid_argument("network kind " + std::string(to_string(net.kind())) +
                                " does not match state kind " +
                                std::string(to_string(set.kind())));
  }
}

constexpr double kAngleSpread = 0.1;

}  // namespace

State State::zeros(int n) {
  return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n),
          Eigen::VectorXd::Zero(n)};
}

Eigen::VectorXcd State::voltage() const {
  Eigen::VectorXcd v(e.size());
  v.real() = e;
  v.imag() = f;
  return v;
}

Eigen::VectorXcd State::power() const {
  Eigen::VectorXcd s(P.size());
  s.real() = P;
  s.imag() = Q;
  return s;
}

bool operator==(const State& a, const State& b) {
  return a.e == b.e && a.f == b.f && a.P == b.P && a.Q == b.Q;
}

StateSet::StateSet(Kind kind, int n, std::vector<State> states)
    : kind_(kind), n_(n), states_(std::move(states)) {
  if (n < 1) throw std::invalid_argument("state set needs at least one node");
  if (states_.empty()) throw std::invalid_argument("state set needs at least one state");
  for (std::size_t k = 0; k < states_.size(); ++k) {
    const auto& s = states_[k];
    if (s.e.size() != n || s.f.size() != n || s.P.size() != n || s.Q.size() != n) {
      throw std::invalid_argument("state " + std::to_string(k) + " has the wrong dimension");
    }
    if (kind_ == Kind::DC && (!s.f.isZero(0.0) || !s.Q.isZero(0.0))) {
      throw std::invalid_argument("DC state " + std::to_string(k) +
                                  " has nonzero imaginary voltage or reactive power");
    }
  }
}

std::size_t StateSet::equation_count() const noexcept {
  return static_cast<std::size_t>(n_) * states_.size() * (kind_ == Kind::AC ? 2 : 1);
}

Eigen::VectorXd residuals(const Network& net, const StateSet& set) {
  check_compatible(net, set);
  const bool ac = set.kind() == Kind::AC;
  const int n = set.n();
  const int stride = ac ? 2 : 1;
  Eigen::VectorXd out(static_cast<Eigen::Index>(set.equation_count()));
  Eigen::VectorXd p, q;
  for (std::size_t k = 0; k < set.m(); ++k) {
    const State& x = set[k];
    line_injections(net, x.e, x.f, p, q);
    const Eigen::Index base = static_cast<Eigen::Index>(k) * n * stride;
    for (int j = 0; j < n; ++j) {
      out(base + j * stride) = p(j) - x.P(j);
      if (ac) out(base + j * stride + 1) = q(j) - x.Q(j);
    }
  }
  return out;
}

Eigen::VectorXd residuals_matrix_form(const Network& net, const StateSet& set) {
  check_compatible(net, set);
  const bool ac = set.kind() == Kind::AC;
  const int n = set.n();
  const int stride = ac ? 2 : 1;
  const Eigen::MatrixXcd Lbar = admittance_matrix(net).conjugate();
  Eigen::VectorXd out(static_cast<Eigen::Index>(set.equation_count()));
  for (std::size_t k = 0; k < set.m(); ++k) {
    const Eigen::VectorXcd v = set[k].voltage();
    const Eigen::VectorXcd r = (v.asDiagonal() * (Lbar * v.conjugate())) - set[k].power();
    const Eigen::Index base = static_cast<Eigen::Index>(k) * n * stride;
    for (int j = 0; j < n; ++j) {
      out(base + j * stride) = r(j).real();
      if (ac) out(base + j * stride + 1) = r(j).imag();
    }
  }
  return out;
}

double rms(const Network& net, const StateSet& set) {
  return residuals(net, set).norm() / std::sqrt(static_cast<double>(set.equation_count()));
}

StateSet generate_voltage_driven(const Network& net, std::size_t m, VoltageRange range,
                                 std::uint64_t seed) {
  if (!(range.min > 0.0) || !(range.max >= range.min)) {
    throw std::invalid_argument("voltage range must satisfy 0 < min <= max");
  }
  if (m == 0) throw std::invalid_argument("need at least one state");
  const int n = net.n();
  const bool ac = net.kind() == Kind::AC;
  std::vector<State> states;
  states.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::mt19937_64 rng(derive_seed(seed, k));
    std::uniform_real_distribution<double> mag(range.min, range.max);
    std::uniform_real_distribution<double> angle(-kAngleSpread, kAngleSpread);
    State x = State::zeros(n);
    for (int j = 0; j < n; ++j) {
      const double r = mag(rng);
      if (ac) {
        const double th = angle(rng);
        x.e(j) = r * std::cos(th);
        x.f(j) = r * std::sin(th);
      } else {
        x.e(j) = r;
      }
    }
    line_injections(net, x.e, x.f, x.P, x.Q);
    if (!ac) x.Q.setZero();
    states.push_back(std::move(x));
  }
  return StateSet(net.kind(), n, std::move(states));
}

Scenario Scenario::loads(int n, int slack, double p_min, double p_max, double q_min,
                         double q_max) {
  Scenario s;
  s.nodes.assign(static_cast<std::size_t>(n), NodeSpec{NodeRole::FixedPower, p_min, p_max,
                                                       q_min, q_max});
  s.nodes.at(static_cast<std::size_t>(slack - 1)).role = NodeRole::Slack;
  return s;
}

void Scenario::validate(int n) const {
  if (static_cast<int>(nodes.size()) != n) {
    throw std::invalid_argument("scenario must describe every node");
  }
  int slack = 0;
  for (const auto& node : nodes) {
    if (node.role == NodeRole::Slack) ++slack;
    if (node.p_min > node.p_max || node.q_min > node.q_max) {
      throw std::invalid_argument("scenario power range is not ordered");
    }
  }
  if (slack != 1) throw std::invalid_argument("scenario needs exactly one slack node");
  if (noise_sigma < 0.0) throw std::invalid_argument("noise sigma must be non-negative");
  if (!(range.min > 0.0) || range.max < range.min) {
    throw std::invalid_argument("voltage range must satisfy 0 < min <= max");
  }
}

StateSet generate_scenario(const Network& net, const Scenario& scenario, std::size_t m,
                           std::uint64_t seed) {
  scenario.validate(net.n());
  if (m == 0) throw std::invalid_argument("need at least one state");
  if (!connectivity(net).is_connected()) {
    throw std::invalid_argument("power flow needs a connected network");
  }
  const int n = net.n();
  const bool ac = net.kind() == Kind::AC;
  int slack = 0;
  for (int j = 0; j < n; ++j)
    if (scenario.nodes[j].role == NodeRole::Slack) slack = j + 1;

  std::vector<State> states;
  states.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::mt19937_64 rng(derive_seed(seed, k));
    bool done = false;
    for (int attempt = 0; attempt <= scenario.max_retries && !done; ++attempt) {
      Eigen::VectorXd P = Eigen::VectorXd::Zero(n), Q = Eigen::VectorXd::Zero(n);
      for (int j = 0; j < n; ++j) {
        const auto& spec = scenario.nodes[j];
        if (spec.role != NodeRole::FixedPower) continue;
        P(j) = std::uniform_real_distribution<double>(spec.p_min, spec.p_max)(rng);
        if (ac) Q(j) = std::uniform_real_distribution<double>(spec.q_min, spec.q_max)(rng);
      }
      PowerFlowSolution sol = solve_power_flow(net, slack, P, Q);
      if (!sol.converged) {
        throw ScenarioError(k, "Newton did not converge (mismatch " +
                                   std::to_string(sol.mismatch) + ")");
      }
      const Eigen::ArrayXd mag = (sol.e.array().square() + sol.f.array().square()).sqrt();
      if ((mag < scenario.range.min).any() || (mag > scenario.range.max).any()) continue;

      State x = State::zeros(n);
      x.e = sol.e;
      if (ac) x.f = sol.f;
      Eigen::VectorXd p, q;
      line_injections(net, x.e, x.f, p, q);
      x.P = P;
      x.Q = Q;
      x.P(slack - 1) = p(slack - 1);
      if (ac) x.Q(slack - 1) = q(slack - 1);
      states.push_back(std::move(x));
      done = true;
    }
    if (!done) {
      throw ScenarioError(k, "voltage left the allowed range after " +
                                 std::to_string(scenario.max_retries + 1) + " attempts");
    }
  }
  StateSet out(net.kind(), n, std::move(states));
  if (scenario.noise_sigma > 0.0) out = add_noise(out, scenario.noise_sigma, seed);
  return out;
}

StateSet add_noise(const StateSet& set, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("noise sigma must be non-negative");
  if (sigma == 0.0) return set;
  const bool ac = set.kind() == Kind::AC;
  std::vector<State> states = set.states();
  for (std::size_t k = 0; k < states.size(); ++k) {
    std::mt19937_64 rng(derive_seed(mix_seed(seed ^ 0x6e6f697365ULL), k));
    std::normal_distribution<double> noise(0.0, sigma);
    auto& x = states[k];
    for (int j = 0; j < set.n(); ++j) {
      x.e(j) += noise(rng);
      x.P(j) += noise(rng);
      if (ac) {
        x.f(j) += noise(rng);
        x.Q(j) += noise(rng);
      }
    }
  }
  return StateSet(set.kind(), set.n(), std::move(states));
}

StateSet concat(const StateSet& a, const StateSet& b) {
  if (a.kind() != b.kind() || a.n() != b.n()) {
    throw std::invalid_argument("cannot concatenate state sets of different shape");
  }
  std::vector<State> all = a.states();
  all.insert(all.end(), b.states().begin(), b.states().end());
  return StateSet(a.kind(), a.n(), std::move(all));
}

}  // namespace gridrecover
