#include "doctest.h"

#include <cmath>
#include <random>

#include "gridrecover/bounds.hpp"
#include "gridrecover/builtin.hpp"
#include "gridrecover/sparsifier.hpp"
#include "oracles.hpp"

using namespace gridrecover;

namespace {

double spectral_norm(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Each edge weight scaled by a factor in [1/(1+eps), 1+eps]; such a network
// is always an epsilon-approximation.
Network perturb(const Network& net, double eps, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double span = std::log1p(eps);
  std::vector<Edge> edges = net.edges();
  for (auto& e : edges) {
    e.c *= std::exp(span * u(rng));
    if (net.kind() == Kind::AC) e.s *= std::exp(span * u(rng));
  }
  return Network(net.kind(), net.n(), edges);
}

StateSet one_state(const std::vector<double>& e) {
  State x = State::zeros(static_cast<int>(e.size()));
  for (std::size_t j = 0; j < e.size(); ++j) x.e(static_cast<Eigen::Index>(j)) = e[j];
  return StateSet(Kind::DC, static_cast<int>(e.size()), {x});
}

}  // namespace

TEST_CASE("phi vector") {
  CHECK(phi_vector(one_state({1.0, 1.0, 1.0})).isApprox(Eigen::VectorXd::Ones(3)));
  CHECK(phi_vector(one_state({1.0, 2.0})).isApprox(Eigen::VectorXd::Constant(2, 1.2)));
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(1);
  CHECK(kernel_shift_norm(one_state({1.0, 1.0, 1.0}), ones) == 0.0);
  CHECK_THROWS_AS((void)phi_vector(one_state({1.0, 0.0})), std::invalid_argument);
}

TEST_CASE("phi minimizes the kernel shift") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> lam(0.5, 1.5);
  const Network net = builtin::table1_dc();
  for (int trial = 0; trial < 10; ++trial) {
    const StateSet set = generate_voltage_driven(net, 5, {}, static_cast<std::uint64_t>(trial));
    const Eigen::VectorXd phi = phi_vector(set);
    Eigen::VectorXd best(5);
    for (int k = 0; k < 5; ++k) best(k) = phi(k * 6);
    const double opt = kernel_shift_norm(set, best);
    for (int i = 0; i < 100; ++i) {
      Eigen::VectorXd other(5);
      for (int k = 0; k < 5; ++k) other(k) = lam(rng);
      CHECK(kernel_shift_norm(set, other) >= opt - 1e-14);
    }
  }
}

TEST_CASE("flat voltages give a zero bound term") {
  const Network net = builtin::table1_dc();
  State x = State::zeros(6);
  x.e.setConstant(1.03);
  const BoundReport r = dc_bound(net, StateSet(Kind::DC, 6, {x, x}), 0.5);
  CHECK(r.bound_term == doctest::Approx(0.0));
  CHECK(r.rms_base == doctest::Approx(0.0));
}

TEST_CASE("duplicating every state leaves the bound unchanged") {
  const Network net = builtin::table1_dc();
  const StateSet set = generate_voltage_driven(net, 4, {}, 3);
  const BoundReport a = dc_bound(net, set, 0.3);
  const BoundReport b = dc_bound(net, concat(set, set), 0.3);
  CHECK(b.bound_term == doctest::Approx(a.bound_term).epsilon(1e-12));
  CHECK(b.bound_total == doctest::Approx(a.bound_total).epsilon(1e-12));
}

TEST_CASE("fine bound matches its definition") {
  const Network net = builtin::table1_dc();
  const StateSet set = generate_voltage_driven(net, 3, {}, 8);
  const Eigen::MatrixXd L = laplacian(split_graphs(net).first);
  double vlv = 0.0;
  for (const auto& x : set.states()) vlv = std::max(vlv, spectral_norm(x.e.asDiagonal() * L * x.e.asDiagonal()));
  double sq = 0.0;
  for (const auto& x : set.states()) {
    const Eigen::ArrayXd inv = x.e.array().inverse();
    const double lambda = inv.sum() / inv.square().sum();
    sq += (1.0 - lambda * inv).square().sum();
  }
  const BoundReport r = dc_bound(net, set, 0.25);
  CHECK(r.bound_term == doctest::Approx(vlv * std::sqrt(sq) / std::sqrt(18.0)).epsilon(1e-12));
  CHECK(r.bound_total == doctest::Approx(r.rms_base + 0.25 * r.bound_term));
}

TEST_CASE("coarse bound") {
  const Network net = builtin::table1_dc();
  const double norm = spectral_norm(laplacian(split_graphs(net).first));
  const StateSet set = generate_voltage_driven(net, 5, {0.9, 1.1}, 2);
  const BoundReport r = dc_bound_coarse(net, set, 0.5, 0.9, 1.1);
  CHECK(r.bound_term == doctest::Approx(1.21 * (0.1 / 0.9) * norm).epsilon(1e-12));
  CHECK(dc_bound_coarse(net, generate_voltage_driven(net, 2, {1.0, 1.0}, 1), 0.5, 1.0, 1.0).bound_term == 0.0);
  CHECK_THROWS_AS((void)dc_bound_coarse(net, set, 0.5, 0.95, 1.05), std::invalid_argument);
  CHECK_THROWS_AS((void)dc_bound_coarse(net, set, 0.5, 1.1, 1.2), std::invalid_argument);

  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 50; ++trial) {
    const Network g = oracle::random_network(Kind::DC, 6, 3, rng);
    const StateSet s = generate_voltage_driven(g, 4, {0.9, 1.1}, static_cast<std::uint64_t>(trial));
    CHECK(dc_bound_coarse(g, s, 1.0, 0.9, 1.1).bound_term >= dc_bound(g, s, 1.0).bound_term - 1e-12);
  }
}

TEST_CASE("AC delta reductions") {
  SUBCASE("no imaginary parts") {
    std::mt19937_64 rng(63);
    const Network dc = oracle::random_network(Kind::DC, 5, 2, rng);
    std::vector<Edge> edges = dc.edges();
    const Network ac(Kind::AC, 5, edges);
    const StateSet dset = generate_voltage_driven(dc, 3, {}, 4);
    const StateSet aset(Kind::AC, 5, dset.states());
    const Eigen::MatrixXd L = laplacian(split_graphs(ac).first);
    double worst = 0.0;
    for (const auto& x : aset.states()) worst = std::max(worst, spectral_norm(x.e.asDiagonal() * L * x.e.asDiagonal()));
    CHECK(ac_delta(ac, aset) == doctest::Approx(std::sqrt(15.0) * worst).epsilon(1e-12));
  }
  SUBCASE("repeating a state scales delta by sqrt(m)") {
    const Network net = builtin::small_ac(3);
    const StateSet one = generate_voltage_driven(net, 1, {}, 6);
    StateSet many = one;
    for (int i = 0; i < 8; ++i) many = concat(many, one);
    CHECK(ac_delta(net, many) == doctest::Approx(3.0 * ac_delta(net, one)).epsilon(1e-12));
    CHECK(ac_bound(net, many, 0.1).bound_term == doctest::Approx(ac_bound(net, one, 0.1).bound_term).epsilon(1e-12));
  }
  CHECK_THROWS_AS((void)ac_delta(builtin::table1_dc(), generate_voltage_driven(builtin::table1_dc(), 1, {}, 1)),
                  std::invalid_argument);
}

TEST_CASE("bounds hold for epsilon approximations") {
  std::mt19937_64 rng(64);
  for (int trial = 0; trial < 40; ++trial) {
    const Kind kind = trial % 2 ? Kind::AC : Kind::DC;
    const Network net = oracle::random_network(kind, 6, 4, rng);
    const StateSet set = add_noise(generate_voltage_driven(net, 4, {0.9, 1.1}, static_cast<std::uint64_t>(trial)),
                                   1e-3, static_cast<std::uint64_t>(trial));
    for (double eps : {0.1, 0.5, 1.0}) {
      const BoundReport r = kind == Kind::AC ? ac_bound(net, set, eps) : dc_bound(net, set, eps);
      for (int i = 0; i < 5; ++i) {
        const Network g2 = perturb(net, eps, rng);
        REQUIRE(is_epsilon_approximation(net, g2, eps));
        CHECK(rms(g2, set) <= r.bound_total + 1e-9);
      }
      const Network sparse = sparsify_ac(net, eps, rng()).network;
      if (is_epsilon_approximation(net, sparse, eps)) CHECK(rms(sparse, set) <= r.bound_total + 1e-9);
    }
  }
}

TEST_CASE("bound holds on the Heawood network") {
  const Network net = builtin::heawood_dc(21);
  const StateSet set = add_noise(generate_voltage_driven(net, 20, {0.9, 1.1}, 5), 1e-4, 6);
  int verified = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const double eps = 0.5 + 0.5 * static_cast<double>(seed % 2);
    const Network sparse = sparsify_ac(net, eps, seed).network;
    if (!is_epsilon_approximation(net, sparse, eps)) continue;
    ++verified;
    CHECK(rms(sparse, set) <= dc_bound(net, set, eps).bound_total + 1e-9);
  }
  CHECK(verified > 0);
}
