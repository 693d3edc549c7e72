#include "doctest.h"

#include <random>
#include <sstream>

#include "gridrecover/builtin.hpp"
#include "gridrecover/vandermonde.hpp"
#include "oracles.hpp"

using namespace gridrecover;


TEST_CASE("row blocks") {
  SUBCASE("flat DC voltage gives a zero block") {
    State x = State::zeros(3);
    x.e.setOnes();
    CHECK(row_block(Kind::DC, 3, complete_edges(3), x).isZero(0.0));
  }
  SUBCASE("DC K3 entries are e_j^2 - e_j e_k") {
    State x = State::zeros(3);
    x.e << 1.1, 0.95, 1.02;
    const Eigen::MatrixXd M = row_block(Kind::DC, 3, complete_edges(3), x);
    const auto& e = x.e;
    Eigen::MatrixXd expected(3, 3);
    expected << e(0) * e(0) - e(0) * e(1), e(0) * e(0) - e(0) * e(2), 0,
        e(1) * e(1) - e(1) * e(0), 0, e(1) * e(1) - e(1) * e(2),
        0, e(2) * e(2) - e(2) * e(0), e(2) * e(2) - e(2) * e(1);
    CHECK((M - expected).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("AC with f = 0 replicates the DC pattern with zero beta") {
    State x = State::zeros(4);
    x.e << 1.0, 1.05, 0.97, 0.92;
    const EdgeSet edges{{1, 2}, {2, 3}, {2, 4}, {3, 4}};
    const Eigen::MatrixXd dc = row_block(Kind::DC, 4, edges, x);
    const Eigen::MatrixXd ac = row_block(Kind::AC, 4, edges, x);
    REQUIRE(ac.rows() == 8);
    REQUIRE(ac.cols() == 8);
    for (int j = 0; j < 4; ++j) {
      for (int c = 0; c < 4; ++c) {
        CHECK(ac(2 * j, 2 * c) == dc(j, c));
        CHECK(ac(2 * j + 1, 2 * c + 1) == dc(j, c));
        CHECK(ac(2 * j, 2 * c + 1) == 0.0);
        CHECK(ac(2 * j + 1, 2 * c) == 0.0);
      }
    }
  }
  SUBCASE("each column touches only its endpoints") {
    std::mt19937_64 rng(3);
    const Network net = oracle::random_network(Kind::AC, 6, 4, rng);
    const StateSet set = generate_voltage_driven(net, 1, {}, 4);
    const EdgeSet edges = net.edge_set();
    const Eigen::MatrixXd M = row_block(Kind::AC, 6, edges, set[0]);
    for (std::size_t c = 0; c < edges.size(); ++c) {
      for (int j = 1; j <= 6; ++j) {
        if (j == edges[c].j || j == edges[c].k) continue;
        CHECK(M.block(2 * (j - 1), 2 * static_cast<Eigen::Index>(c), 2, 2).isZero(0.0));
      }
    }
  }
}

TEST_CASE("assembly") {
  std::mt19937_64 rng(5);
  SUBCASE("m = 1 reduces to the row block") {
    const Network net = oracle::random_network(Kind::DC, 5, 3, rng);
    const StateSet set = generate_voltage_driven(net, 1, {}, 1);
    const VandermondeSystem sys = assemble(net.edge_set(), set);
    CHECK(sys.matrix == row_block(Kind::DC, 5, net.edge_set(), set[0]));
    CHECK(sys.response == set[0].P);
  }
  SUBCASE("M w - U equals the power-flow residuals") {
    for (int trial = 0; trial < 20; ++trial) {
      const Kind kind = trial % 2 ? Kind::AC : Kind::DC;
      const Network net = oracle::random_network(kind, 6, 4, rng);
      const StateSet set = add_noise(generate_voltage_driven(net, 5, {}, trial), 0.01, trial);
      const VandermondeSystem sys = assemble(net.edge_set(), set);
      const Eigen::VectorXd lhs = sys.matrix * sys.parameters(net) - sys.response;
      const Eigen::VectorXd ref = oracle::complex_residuals(net, set);
      CHECK((lhs - ref).norm() <= 1e-10 * std::max(1.0, ref.norm()));
    }
  }
  SUBCASE("shape and column map") {
    const Network net = oracle::random_network(Kind::AC, 5, 2, rng);
    const StateSet set = generate_voltage_driven(net, 3, {}, 2);
    const VandermondeSystem sys = assemble(complete_edges(5), set);
    CHECK(sys.matrix.rows() == 2 * 5 * 3);
    CHECK(sys.matrix.cols() == 2 * 10);
    CHECK(sys.columns[0].edge == EdgeKey{1, 2});
    CHECK(sys.columns[0].part == Part::Conductance);
    CHECK(sys.columns[1].part == Part::Susceptance);
    CHECK(sys.columns[19].edge == EdgeKey{4, 5});
    const Network back = sys.network(sys.parameters(net));
    CHECK(back.normalized() == net);
  }
  SUBCASE("DC columns have at most 2m nonzeros") {
    const Network net = oracle::random_network(Kind::DC, 7, 5, rng);
    const StateSet set = generate_voltage_driven(net, 6, {}, 9);
    const VandermondeSystem sys = assemble(complete_edges(7), set);
    for (Eigen::Index c = 0; c < sys.matrix.cols(); ++c)
      CHECK((sys.matrix.col(c).array() != 0.0).count() <= 12);
  }
  SUBCASE("column restriction equals direct assembly") {
    const Network net = oracle::random_network(Kind::AC, 6, 3, rng);
    const StateSet set = generate_voltage_driven(net, 4, {}, 3);
    const VandermondeSystem full = assemble(complete_edges(6), set);
    const EdgeSet subset{{1, 3}, {2, 5}, {4, 6}};
    const VandermondeSystem a = full.restrict_to(subset);
    const VandermondeSystem b = assemble(subset, set);
    CHECK(a.matrix == b.matrix);
    CHECK(a.response == b.response);
    CHECK(a.edges == b.edges);
    CHECK_THROWS_AS((void)assemble({{1, 3}}, set).restrict_to({{1, 2}}), std::invalid_argument);
  }
  SUBCASE("AC matrix on f = Q = 0 data has zero beta entries") {
    const Network dc = oracle::random_network(Kind::DC, 5, 2, rng);
    const StateSet dset = generate_voltage_driven(dc, 4, {}, 8);
    const StateSet aset(Kind::AC, 5, dset.states());
    const VandermondeSystem sys = assemble(complete_edges(5), aset);
    for (Eigen::Index r = 0; r < sys.matrix.rows(); ++r)
      for (Eigen::Index c = 0; c < sys.matrix.cols(); ++c)
        if ((r % 2) != (c % 2)) CHECK(sys.matrix(r, c) == 0.0);
  }
  SUBCASE("empty edge set throws") {
    const StateSet set = generate_voltage_driven(builtin::path3_dc(), 2, {}, 1);
    CHECK_THROWS_AS((void)assemble({}, set), std::invalid_argument);
    CHECK_THROWS_AS((void)assemble({{1, 4}}, set), std::invalid_argument);
  }
}

TEST_CASE("zero injection puts a vector in the kernel") {
  const double c12 = 2.0, c23 = 3.0;
  const StateSet set = oracle::path_zero_injection_states(c12, c23, 20, 4);
  const VandermondeSystem sys = assemble(complete_edges(3), set);
  Eigen::VectorXd z(3);
  z << -1.0 - c12 / c23, 1.0, -1.0 - c23 / c12;
  CHECK((sys.matrix * z).norm() < 1e-12);
  CHECK(condition_number(sys) == std::numeric_limits<double>::infinity());
  CHECK(std::isfinite(condition_number(assemble({{1, 2}, {2, 3}}, set))));
}

TEST_CASE("condition number") {
  Eigen::MatrixXd q = Eigen::MatrixXd::Random(8, 3);
  q = Eigen::HouseholderQR<Eigen::MatrixXd>(q).householderQ() * Eigen::MatrixXd::Identity(8, 3);
  CHECK(condition_number(q) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(condition_number(Eigen::MatrixXd::Ones(2, 3)) == std::numeric_limits<double>::infinity());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 0.5;
  CHECK(condition_number(d) == doctest::Approx(8.0));

  // the true topology is better conditioned than the complete graph
  const Network net = builtin::table1_dc();
  const StateSet set = generate_scenario(net, builtin::load_scenario(6, -0.01, 0.0), 100, 2);
  CHECK(condition_number(assemble(net.edge_set(), set)) <
        condition_number(assemble(complete_edges(6), set)));
}

TEST_CASE("csv dump") {
  const StateSet set = generate_voltage_driven(builtin::series_ac(), 2, {}, 1);
  const VandermondeSystem sys = assemble({{1, 2}, {3, 4}}, set);
  std::ostringstream out;
  write_csv(sys, out);
  const std::string text = out.str();
  CHECK(text.rfind("c_1_2,s_1_2,c_3_4,s_3_4,U\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 2 * 5 * 2);
}
