#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "gridrecover/builtin.hpp"
#include "gridrecover/nnls.hpp"
#include "oracles.hpp"

using namespace gridrecover;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd A(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) A(i, j) = z(rng);
  return A;
}

Eigen::VectorXd random_vector(int rows, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::VectorXd b(rows);
  for (int i = 0; i < rows; ++i) b(i) = z(rng);
  return b;
}

}  // namespace

TEST_CASE("identity with a negative target clips to zero") {
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd b(2);
  b << 1.0, -1.0;
  const NnlsResult r = solve_nnls(A, b);
  CHECK(r.w(0) == doctest::Approx(1.0));
  CHECK(r.w(1) == 0.0);
  CHECK(r.objective == doctest::Approx(1.0));
  CHECK(r.kkt_residual <= 1e-8);
}

TEST_CASE("agrees with exhaustive search on small instances") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> cols_d(1, 6);
  for (int trial = 0; trial < 100; ++trial) {
    const int cols = cols_d(rng);
    std::uniform_int_distribution<int> rows_d(cols, 12);
    const int rows = rows_d(rng);
    const Eigen::MatrixXd A = random_matrix(rows, cols, rng);
    const Eigen::VectorXd b = random_vector(rows, rng);
    const NnlsResult r = solve_nnls(A, b);
    const oracle::NnlsSolution ref = oracle::brute_force_nnls(A, b);
    CHECK((r.w - ref.w).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(r.objective == doctest::Approx(ref.objective).epsilon(1e-9));
    CHECK(r.w.minCoeff() >= 0.0);
    CHECK(kkt_residual(A, b, r.w) <= 1e-8);
  }
}

TEST_CASE("objective cannot be lowered by feasible perturbations") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> step(-0.1, 0.1);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::MatrixXd A = random_matrix(15, 8, rng);
    const Eigen::VectorXd b = random_vector(15, rng);
    const NnlsResult r = solve_nnls(A, b);
    for (int i = 0; i < 100; ++i) {
      Eigen::VectorXd w = r.w;
      for (Eigen::Index j = 0; j < w.size(); ++j) w(j) = std::max(0.0, w(j) + step(rng));
      CHECK((A * w - b).norm() >= r.objective - 1e-12);
    }
  }
}

TEST_CASE("zero columns do not change the fit") {
  std::mt19937_64 rng(43);
  const Eigen::MatrixXd A = random_matrix(10, 4, rng);
  const Eigen::VectorXd b = random_vector(10, rng);
  Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(10, 6);
  padded.col(0) = A.col(0);
  padded.col(2) = A.col(1);
  padded.col(3) = A.col(2);
  padded.col(5) = A.col(3);
  const NnlsResult a = solve_nnls(A, b);
  const NnlsResult p = solve_nnls(padded, b);
  CHECK(p.objective == doctest::Approx(a.objective).epsilon(1e-12));
  CHECK(p.w(1) == 0.0);
  CHECK(p.w(4) == 0.0);
}

TEST_CASE("dropping columns never improves the objective") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::MatrixXd A = random_matrix(12, 7, rng);
    const Eigen::VectorXd b = random_vector(12, rng);
    const double full = solve_nnls(A, b).objective;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < 7; ++j)
      if (rng() % 2) keep.push_back(j);
    if (keep.empty()) continue;
    Eigen::MatrixXd sub(12, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) sub.col(static_cast<Eigen::Index>(i)) = A.col(keep[i]);
    CHECK(solve_nnls(sub, b).objective >= full - 1e-12);
  }
}

TEST_CASE("minimizer is unique on well conditioned problems") {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> start(0.0, 5.0);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd A = random_matrix(20, 5, rng);
    const Eigen::VectorXd b = random_vector(20, rng);
    const NnlsResult r = solve_nnls(A, b);
    for (int s = 0; s < 10; ++s) {
      Eigen::VectorXd x0(5);
      for (int j = 0; j < 5; ++j) x0(j) = start(rng);
      const Eigen::VectorXd cd = oracle::coordinate_descent_nnls(A, b, x0, 5000);
      CHECK((cd - r.w).cwiseAbs().maxCoeff() <= 1e-6);
    }
    // column order must not matter either
    std::vector<Eigen::Index> perm(5);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd P(20, 5);
    for (int j = 0; j < 5; ++j) P.col(j) = A.col(perm[static_cast<std::size_t>(j)]);
    const NnlsResult q = solve_nnls(P, b);
    for (int j = 0; j < 5; ++j) CHECK(std::abs(q.w(j) - r.w(perm[static_cast<std::size_t>(j)])) <= 1e-9);
  }
}

TEST_CASE("rank deficient input is accepted") {
  std::mt19937_64 rng(46);
  Eigen::MatrixXd A = random_matrix(8, 3, rng);
  A.col(2) = A.col(0);
  Eigen::VectorXd b = A.col(0) * 2.0 + A.col(1);
  const NnlsResult r = solve_nnls(A, b);
  CHECK(r.objective <= 1e-10);
  CHECK(r.w(0) + r.w(2) == doctest::Approx(2.0));
  CHECK(r.w(1) == doctest::Approx(1.0));
}

TEST_CASE("iteration cap") {
  std::mt19937_64 rng(47);
  const Eigen::MatrixXd A = random_matrix(20, 10, rng);
  Eigen::VectorXd w(10);
  w << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10;
  const Eigen::VectorXd b = A * w;
  try {
    (void)solve_nnls(A, b, 1e-8, 2);
    FAIL("expected NnlsError");
  } catch (const NnlsError& err) {
    CHECK(err.best().w.size() == 10);
    CHECK(err.best().w.minCoeff() >= 0.0);
    CHECK(err.best().iterations == 2);
  }
  CHECK_NOTHROW((void)solve_nnls(A, b));
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS((void)solve_nnls(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Ones(3)),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)solve_nnls(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Ones(2), 0.0),
                  std::invalid_argument);
}

TEST_CASE("kernel basis") {
  CHECK(kernel_basis(Eigen::MatrixXd::Identity(3, 3)).cols() == 0);
  Eigen::MatrixXd A(2, 3);
  A << 1, 1, 0, 0, 0, 1;
  const Eigen::MatrixXd K = kernel_basis(A);
  REQUIRE(K.cols() == 1);
  CHECK((A * K).norm() < 1e-12);
  CHECK(std::abs(std::abs(K(0, 0)) - std::sqrt(0.5)) < 1e-12);
}

TEST_CASE("zero injection data leaves a segment of minimizers") {
  const double c12 = 2.0, c23 = 3.0;
  const StateSet set = oracle::path_zero_injection_states(c12, c23, 30, 9);

  const Eigen::MatrixXd K = kernel_basis(assemble(complete_edges(3), set).matrix);
  REQUIRE(K.cols() == 1);
  Eigen::VectorXd z(3);
  z << -1.0 - c12 / c23, 1.0, -1.0 - c23 / c12;
  CHECK(std::abs(std::abs(K.col(0).dot(z.normalized())) - 1.0) < 1e-8);

  // the fit on K3 lands on w = (c12, 0, c23) + delta z with delta in range
  const ParameterEstimate est = parameter_estimation(complete_edges(3), set);
  CHECK(est.rms <= 1e-9);
  const double delta = est.w(1);
  const double delta_max = c12 * c23 / (c12 + c23);
  CHECK(delta >= -1e-9);
  CHECK(delta <= delta_max + 1e-9);
  Eigen::VectorXd expected(3);
  expected << c12, 0.0, c23;
  expected += delta * z;
  CHECK((est.w - expected).cwiseAbs().maxCoeff() <= 1e-6);

  // the true path is pinned down
  const ParameterEstimate path = parameter_estimation({{1, 2}, {2, 3}}, set);
  CHECK(path.w(0) == doctest::Approx(c12).epsilon(1e-8));
  CHECK(path.w(1) == doctest::Approx(c23).epsilon(1e-8));
}

TEST_CASE("parameter estimation on exact data") {
  SUBCASE("true topology is recovered") {
    const Network net = builtin::table1_dc();
    const StateSet set = generate_voltage_driven(net, 50, {}, 3);
    const ParameterEstimate est = parameter_estimation(net.edge_set(), set);
    CHECK(est.rms <= 1e-10);
    for (const auto& e : net.edges()) CHECK(est.network.find(e.j, e.k)->c == doctest::Approx(e.c).epsilon(1e-7));
  }
  SUBCASE("AC") {
    const Network net = builtin::small_ac(2);
    const StateSet set = generate_voltage_driven(net, 40, {}, 5);
    const ParameterEstimate est = parameter_estimation(net.edge_set(), set);
    CHECK(est.rms <= 1e-10);
    CHECK(est.network.size() == net.size());
    for (const auto& e : net.edges()) {
      CHECK(est.network.find(e.j, e.k)->c == doctest::Approx(e.c).epsilon(1e-6));
      CHECK(est.network.find(e.j, e.k)->s == doctest::Approx(e.s).epsilon(1e-6));
    }
  }
  SUBCASE("estimated network keeps zero-weight edges of E") {
    const Network net = builtin::path3_dc();
    const StateSet set = generate_voltage_driven(net, 10, {}, 1);
    const ParameterEstimate est = parameter_estimation({{1, 2}, {1, 3}, {2, 3}}, set);
    CHECK(est.network.size() == 3);
    CHECK(std::abs(est.network.find(1, 3)->c) <= 1e-8);
    CHECK(est.rms == doctest::Approx(rms(est.network, set)).epsilon(1e-9));
  }
}
