#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "gridrecover/builtin.hpp"
#include "gridrecover/io.hpp"
#include "oracles.hpp"

using namespace gridrecover;

namespace {

template <typename F>
io::ParseError parse_error_of(F&& f) {
  try {
    f();
  } catch (const io::ParseError& err) {
    return err;
  }
  FAIL("expected a ParseError");
  return io::ParseError("", 0, 0, "");
}

}  // namespace

TEST_CASE("double formatting round trips") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    CHECK(std::stod(io::format_double(x)) == x);
  }
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(io::format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(io::format_double(std::nan("")) == "nan");
}

TEST_CASE("network json round trip") {
  std::mt19937_64 rng(72);
  for (Kind kind : {Kind::DC, Kind::AC}) {
    const Network net = oracle::random_network(kind, 7, 5, rng);
    CHECK(io::network_from_json(io::network_to_json(net)) == net);
  }
  const Network empty(Kind::DC, 3, {});
  CHECK(io::network_from_json(io::network_to_json(empty)) == empty);
  // s may be omitted for DC input
  const Network dc = io::network_from_json(R"({"kind":"dc","n":2,"edges":[{"j":1,"k":2,"c":4}]})");
  CHECK(dc.find(1, 2)->c == 4.0);
}

TEST_CASE("network json errors") {
  const auto syntax = parse_error_of([] { (void)io::network_from_json("{\n  \"kind\": \"dc\",\n  \"n\": ]\n}", "net.json"); });
  CHECK(syntax.line() == 3);
  CHECK(syntax.column() > 0);
  CHECK(std::string(syntax.what()).rfind("net.json:3:", 0) == 0);

  CHECK_THROWS_AS((void)io::network_from_json(R"({"kind":"xx","n":2,"edges":[]})"), io::ParseError);
  CHECK_THROWS_AS((void)io::network_from_json(R"({"kind":"dc","edges":[]})"), io::ParseError);
  CHECK_THROWS_AS((void)io::network_from_json(R"({"kind":"dc","n":2.5,"edges":[]})"), io::ParseError);
  CHECK_THROWS_AS((void)io::network_from_json(R"({"kind":"dc","n":2,"edges":[{"j":1,"k":2}]})"), io::ParseError);
  const auto invalid = parse_error_of(
      [] { (void)io::network_from_json(R"({"kind":"dc","n":2,"edges":[{"j":1,"k":3,"c":1}]})"); });
  CHECK(invalid.line() == 0);
}

TEST_CASE("state csv and json round trips") {
  for (Kind kind : {Kind::DC, Kind::AC}) {
    std::mt19937_64 rng(73);
    const Network net = oracle::random_network(kind, 5, 2, rng);
    const StateSet set = add_noise(generate_voltage_driven(net, 4, {}, 1), 1e-3, 2);
    CHECK(io::states_from_csv(io::states_to_csv(set)) == set);
    CHECK(io::states_from_json(io::states_to_json(set)) == set);
  }
  const std::string dc = io::states_to_csv(generate_voltage_driven(builtin::path3_dc(), 1, {}, 1));
  CHECK(dc.rfind("e_1,P_1,e_2,P_2,e_3,P_3\n", 0) == 0);
  const std::string ac = io::states_to_csv(generate_voltage_driven(builtin::small_ac(1), 1, {}, 1));
  CHECK(ac.rfind("e_1,f_1,P_1,Q_1,e_2,", 0) == 0);
}

TEST_CASE("state csv errors carry positions") {
  const auto bad_number = parse_error_of([] { (void)io::states_from_csv("e_1,P_1,e_2,P_2\n1,0,1,0\n1,0,x,0\n", "s.csv"); });
  CHECK(bad_number.line() == 3);
  CHECK(bad_number.column() == 5);
  const auto short_row = parse_error_of([] { (void)io::states_from_csv("e_1,P_1,e_2,P_2\n1,0,1\n"); });
  CHECK(short_row.line() == 2);
  CHECK_THROWS_AS((void)io::states_from_csv(""), io::ParseError);
  CHECK_THROWS_AS((void)io::states_from_csv("e_1,P_1\n"), io::ParseError);
  CHECK_THROWS_AS((void)io::states_from_csv("e_1,Q_1\n1,0\n"), io::ParseError);
}

TEST_CASE("trace csv") {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const RecoveryTrace trace{{1, 15, 1e-9, 1234.5, 0.1, Event::Initial},
                            {2, 15, 1e-9, 1234.5, 0.1, Event::NoEdgeReduction},
                            {3, 0, inf, inf, 0.15, Event::RejectedRms},
                            {4, 8, 2e-9, 55.0, 0.1, Event::Accepted}};
  const std::string csv = io::trace_to_csv(trace);
  CHECK(csv.rfind("iteration,edges,rms,kappa,epsilon,event\n", 0) == 0);
  CHECK(csv.find("3,0,inf,inf,0.14999999999999999,rejected_rms\n") != std::string::npos);
  CHECK(io::trace_from_csv(csv) == trace);
  CHECK_THROWS_AS((void)io::trace_from_csv("iteration,edges\n"), io::ParseError);
  const auto unknown = parse_error_of(
      [] { (void)io::trace_from_csv("iteration,edges,rms,kappa,epsilon,event\n1,2,0,1,0.1,bogus\n"); });
  CHECK(unknown.line() == 2);
  CHECK(unknown.column() == 13);

  const std::string json = io::trace_to_json(trace);
  CHECK(json.find("\"rms\":null") != std::string::npos);
}

TEST_CASE("trace table") {
  const RecoveryTrace trace{{1, 15, 1e-9, 1234.5, 0.1, Event::Initial},
                            {2, 15, 1e-9, 1234.5, 0.1, Event::NoEdgeReduction},
                            {3, 8, 2e-9, 55.0, 0.15, Event::Accepted}};
  const std::string table = io::render_trace_table(trace);
  CHECK(table.find("Iteration |   |E| | rms") == 0);
  CHECK(std::count(table.begin(), table.end(), '\n') == 4);
  CHECK(table.find("        3 |     8 | 2.000e-09") != std::string::npos);
  const std::string all = io::render_trace_table(trace, true);
  CHECK(std::count(all.begin(), all.end(), '\n') == 5);
  CHECK(all.find("no_edge_reduction") != std::string::npos);
}

TEST_CASE("reports") {
  const WeightedGraph g(3, {{1, 2, 1.0}, {1, 3, 1.0}, {2, 3, 1.0}});
  const std::string csv = io::edge_statistics_to_csv(effective_resistances(g));
  CHECK(csv.rfind("j,k,weight,r_eff,leverage,p\n1,2,1,", 0) == 0);
  BoundReport r;
  r.bound_term = 2.5;
  CHECK(io::bound_report_to_json(r).find("\"bound_term\":2.5") != std::string::npos);
}
