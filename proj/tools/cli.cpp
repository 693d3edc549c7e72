#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "gridrecover/bounds.hpp"
#include "gridrecover/builtin.hpp"
#include "gridrecover/io.hpp"
#include "gridrecover/nnls.hpp"
#include "gridrecover/random.hpp"
#include "gridrecover/recovery.hpp"
#include "gridrecover/sparsifier.hpp"
#include "gridrecover/vandermonde.hpp"

namespace gridrecover::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

struct Options {
  std::string network;
  std::string states;
  std::string builtin;
  std::string out_dir = ".";
  std::string variant;
  std::string trace;
  std::string dump_system;
  std::size_t m = 200;
  std::uint64_t seed = 0;
  double eps = 0.1;
  double psi = 1.5;
  double tol = 1e-5;
  double noise = 0.0;
  double vmin = 0.9;
  double vmax = 1.1;
  double max_time = 600.0;
  int max_iterations = 0;
  int max_stale = 30;
  int trials = 1;
  bool stop_on_tree = false;
  bool complete = false;
  bool all_rows = false;
};

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto log = std::make_shared<spdlog::logger>("gridrecover", sink);
  log->set_pattern("[%l] %v");
  log->set_level(spdlog::level::warn);
  if (const char* level = std::getenv("GRIDRECOVER_LOG")) {
    log->set_level(spdlog::level::from_str(level));
  }
  return log;
}

// nlohmann renders non-finite doubles as null; keep that explicit.
ordered_json number(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

ordered_json network_json(const Network& net) { return ordered_json::parse(io::network_to_json(net)); }

void write_json(const fs::path& path, const ordered_json& doc) { io::write_file(path, doc.dump(2) + "\n"); }

struct Data {
  StateSet states;
  std::optional<Network> truth;
  std::string source;
  std::string scenario;
};

// Data for one run: from --states, or sampled from --builtin / --network.
Data obtain_data(const Options& o, std::uint64_t seed, bool allow_generate) {
  Data d;
  if (!o.builtin.empty() && !o.network.empty()) {
    throw std::invalid_argument("--builtin and --network are mutually exclusive");
  }
  if (!o.states.empty()) {
    d.states = io::load_states(o.states);
    d.source = o.states;
    if (!o.network.empty()) d.truth = io::load_network(o.network);
    if (!o.builtin.empty()) d.truth = builtin::make(o.builtin, seed).network;
    return d;
  }
  if (!allow_generate) throw std::invalid_argument("--states is required");
  if (o.m < 1) throw std::invalid_argument("--m must be at least 1");
  if (!o.builtin.empty()) {
    builtin::Case c = builtin::make(o.builtin, seed);
    d.states = c.sample(o.m, derive_seed(seed, 1));
    d.truth = c.network;
    d.source = "builtin:" + c.name;
    d.scenario = c.scenario;
  } else if (!o.network.empty()) {
    d.truth = io::load_network(o.network);
    d.states = generate_voltage_driven(*d.truth, o.m, VoltageRange{o.vmin, o.vmax}, derive_seed(seed, 1));
    d.source = o.network;
    d.scenario = "voltage magnitudes uniform in [" + io::format_double(o.vmin) + ", " +
                 io::format_double(o.vmax) + "], powers from the power flow equations";
  } else {
    throw std::invalid_argument("one of --states, --builtin or --network is required");
  }
  d.states = add_noise(d.states, o.noise, derive_seed(seed, 2));
  return d;
}

int cmd_generate(const Options& o, std::ostream& out, spdlog::logger& log) {
  if (!o.states.empty()) throw std::invalid_argument("generate does not read --states");
  const Data d = obtain_data(o, o.seed, true);
  const fs::path dir = o.out_dir;
  io::write_file(dir / "network.json", io::network_to_json(*d.truth));
  io::write_file(dir / "states.csv", io::states_to_csv(d.states));
  ordered_json prov;
  prov["source"] = d.source;
  prov["scenario"] = d.scenario;
  prov["kind"] = std::string(to_string(d.states.kind()));
  prov["n"] = d.states.n();
  prov["m"] = d.states.m();
  prov["seed"] = o.seed;
  prov["state_seed"] = derive_seed(o.seed, 1);
  prov["noise"] = o.noise;
  prov["noise_seed"] = derive_seed(o.seed, 2);
  prov["true_network_rms"] = rms(*d.truth, d.states);
  write_json(dir / "provenance.json", prov);
  log.info("wrote {} states to {}", d.states.m(), dir.string());
  out << "generated " << d.states.m() << " " << to_string(d.states.kind()) << " states on "
      << d.states.n() << " nodes; rms of the true network " << io::format_double(rms(*d.truth, d.states))
      << "\n";
  return kExitOk;
}

int cmd_estimate(const Options& o, std::ostream& out, spdlog::logger& log) {
  const StateSet set = io::load_states(o.states);
  EdgeSet edges;
  if (o.complete) {
    edges = complete_edges(set.n());
  } else if (!o.network.empty()) {
    edges = io::load_network(o.network).edge_set();
  } else {
    throw std::invalid_argument("estimate needs --network (topology) or --complete");
  }
  const VandermondeSystem sys = assemble(edges, set);
  if (!o.dump_system.empty()) {
    std::ostringstream csv;
    write_csv(sys, csv);
    io::write_file(o.dump_system, csv.str());
  }
  const ParameterEstimate est = parameter_estimation(sys);
  const double kappa = condition_number(sys);
  log.info("estimated {} parameters in {} NNLS iterations", est.w.size(), est.iterations);

  const fs::path dir = o.out_dir;
  io::write_file(dir / "estimated.json", io::network_to_json(est.network));
  ordered_json doc;
  doc["network"] = network_json(est.network);
  doc["rms"] = number(est.rms);
  doc["objective"] = number(est.objective);
  doc["kkt_residual"] = number(est.kkt_residual);
  doc["iterations"] = est.iterations;
  doc["kappa"] = number(kappa);
  write_json(dir / "estimate.json", doc);
  out << "edges " << edges.size() << " rms " << io::format_double(est.rms) << " kappa "
      << io::format_double(kappa) << "\n";
  return kExitOk;
}

int cmd_sparsify(const Options& o, std::ostream& out, spdlog::logger&) {
  if (o.network.empty()) throw std::invalid_argument("sparsify needs --network");
  const Network net = io::load_network(o.network);
  const NetworkSparsifyOutcome res = sparsify_ac(net, o.eps, o.seed);
  const auto [cg, sg] = split_graphs(net);

  const fs::path dir = o.out_dir;
  io::write_file(dir / "sparsified.json", io::network_to_json(res.network));
  io::write_file(dir / "edge_stats.csv", io::edge_statistics_to_csv(effective_resistances(cg)));
  if (net.kind() == Kind::AC) {
    io::write_file(dir / "edge_stats_susceptance.csv", io::edge_statistics_to_csv(effective_resistances(sg)));
  }
  const bool approx = is_epsilon_approximation(net, res.network, o.eps);
  ordered_json doc;
  doc["epsilon"] = o.eps;
  doc["seed"] = o.seed;
  doc["samples"] = res.conductance.samples;
  doc["edges_before"] = net.size();
  doc["edges_after"] = res.network.size();
  doc["is_epsilon_approximation"] = approx;
  write_json(dir / "sparsify.json", doc);
  out << "edges " << net.size() << " -> " << res.network.size() << " (t = " << res.conductance.samples
      << ", eps-approximation: " << (approx ? "yes" : "no") << ")\n";
  return kExitOk;
}

int cmd_bound(const Options& o, std::ostream& out, spdlog::logger&) {
  if (o.network.empty()) throw std::invalid_argument("bound needs --network");
  const Network net = io::load_network(o.network);
  const StateSet set = io::load_states(o.states);
  std::string variant = o.variant;
  if (variant.empty()) variant = net.kind() == Kind::AC ? "ac" : "fine";
  BoundReport report;
  if (variant == "fine") {
    report = dc_bound(net, set, o.eps);
  } else if (variant == "coarse") {
    report = dc_bound_coarse(net, set, o.eps, o.vmin, o.vmax);
  } else if (variant == "ac") {
    report = ac_bound(net, set, o.eps);
  } else {
    throw std::invalid_argument("--variant must be fine, coarse or ac");
  }
  const std::string text = io::bound_report_to_json(report);
  io::write_file(fs::path(o.out_dir) / "bound.json", text);
  out << text;
  return kExitOk;
}

struct TrialOutcome {
  std::uint64_t seed = 0;
  std::optional<RecoveryResult> result;
  std::string error;
  bool matches_truth = false;
  double max_error = 0.0;
  std::size_t m = 0;
};

ordered_json summary_json(const Options& o, const TrialOutcome& t) {
  ordered_json doc;
  doc["seed"] = t.seed;
  if (!t.result) {
    doc["error"] = t.error;
    return doc;
  }
  const RecoveryResult& r = *t.result;
  doc["m"] = t.m;
  doc["tol"] = o.tol;
  doc["eps0"] = o.eps;
  doc["psi"] = o.psi;
  doc["stop_reason"] = r.stop_reason;
  doc["iterations"] = r.trace.empty() ? 0 : r.trace.back().iteration;
  doc["initial_edges"] = r.trace.front().edges;
  doc["initial_rms"] = number(r.trace.front().rms);
  doc["initial_kappa"] = number(r.trace.front().kappa);
  doc["initial_above_tol"] = r.initial_above_tol;
  doc["final_edges"] = r.network.size();
  doc["final_rms"] = number(r.final_rms);
  doc["final_kappa"] = number(r.final_kappa);
  doc["met_tol"] = r.final_rms <= o.tol;
  doc["matches_truth"] = t.matches_truth;
  doc["max_parameter_error"] = number(t.max_error);
  return doc;
}

void compare_truth(TrialOutcome& t, const Network& truth) {
  const Network& got = t.result->network;
  t.matches_truth = got.edge_set() == truth.normalized().edge_set();
  double worst = 0.0;
  for (const auto& e : truth.edges()) {
    const Edge* f = got.find(e.j, e.k);
    const double c = f ? f->c : 0.0, s = f ? f->s : 0.0;
    worst = std::max({worst, std::abs(c - e.c), std::abs(s - e.s)});
  }
  for (const auto& e : got.edges()) {
    if (!truth.find(e.j, e.k)) worst = std::max({worst, e.c, e.s});
  }
  t.max_error = worst;
}

void write_trial(const fs::path& dir, const Options& o, const TrialOutcome& t) {
  if (t.result) {
    io::write_file(dir / "recovered.json", io::network_to_json(t.result->network));
    io::write_file(dir / "trace.csv", io::trace_to_csv(t.result->trace));
    io::write_file(dir / "trace.json", io::trace_to_json(t.result->trace));
    io::write_file(dir / "table.txt", io::render_trace_table(t.result->trace));
  }
  write_json(dir / "summary.json", summary_json(o, t));
}

TrialOutcome run_trial(const Options& o, std::uint64_t seed, const Data* shared) {
  TrialOutcome t;
  t.seed = seed;
  const Data d = shared ? *shared : obtain_data(o, seed, true);
  t.m = d.states.m();
  RecoveryConfig cfg;
  cfg.eps0 = o.eps;
  cfg.psi = o.psi;
  cfg.tol = o.tol;
  cfg.seed = seed;
  cfg.vmin = o.vmin;
  cfg.vmax = o.vmax;
  cfg.stopping.max_wall_time = o.max_time;
  cfg.stopping.max_iterations = o.max_iterations;
  cfg.stopping.max_stale_iterations = o.max_stale;
  cfg.stopping.stop_on_tree = o.stop_on_tree;
  try {
    t.result = recover(d.states, d.states.n(), cfg);
  } catch (const RecoveryError& err) {
    t.error = err.what();
    ordered_json diag;
    diag["error"] = t.error;
    diag["trace"] = ordered_json::parse(io::trace_to_json(err.trace()));
    t.error = diag.dump();
    return t;
  }
  if (d.truth) compare_truth(t, *d.truth);
  return t;
}

int cmd_recover(const Options& o, std::ostream& out, spdlog::logger& log) {
  if (o.trials < 1) throw std::invalid_argument("--trials must be at least 1");
  // Fail fast on bad flags before spawning workers.
  RecoveryConfig probe;
  probe.eps0 = o.eps;
  probe.psi = o.psi;
  probe.tol = o.tol;
  probe.vmin = o.vmin;
  probe.vmax = o.vmax;
  probe.stopping = {o.max_time, o.max_iterations, o.max_stale, o.stop_on_tree};
  probe.validate();

  std::optional<Data> shared;
  if (!o.states.empty()) shared = obtain_data(o, o.seed, false);

  const fs::path dir = o.out_dir;
  if (o.trials == 1) {
    TrialOutcome t = run_trial(o, o.seed, shared ? &*shared : nullptr);
    if (!t.result) {
      io::write_file(dir / "error.json", t.error + "\n");
      log.error("recovery failed; diagnostics in {}", (dir / "error.json").string());
      return kExitFailure;
    }
    write_trial(dir, o, t);
    const RecoveryResult& r = *t.result;
    out << io::render_trace_table(r.trace);
    out << "final |E| " << r.network.size() << ", rms " << io::format_double(r.final_rms) << ", stop: "
        << r.stop_reason << "\n";
    if (r.initial_above_tol) log.warn("complete-graph fit rms exceeds tol");
    return r.final_rms <= o.tol ? kExitOk : kExitFailure;
  }

  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(o.trials));
  std::atomic<int> next{0};
  const unsigned workers =
      std::max(1u, std::min(std::thread::hardware_concurrency(), static_cast<unsigned>(o.trials)));
  auto work = [&] {
    for (int i = next++; i < o.trials; i = next++) {
      const std::uint64_t seed = derive_seed(o.seed, static_cast<std::uint64_t>(i) + 1000);
      try {
        outcomes[static_cast<std::size_t>(i)] = run_trial(o, seed, shared ? &*shared : nullptr);
      } catch (const std::exception& e) {
        outcomes[static_cast<std::size_t>(i)].seed = seed;
        outcomes[static_cast<std::size_t>(i)].error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();

  ordered_json all = ordered_json::array();
  int met = 0, matched = 0;
  for (int i = 0; i < o.trials; ++i) {
    const TrialOutcome& t = outcomes[static_cast<std::size_t>(i)];
    write_trial(dir / ("trial_" + std::to_string(i)), o, t);
    all.push_back(summary_json(o, t));
    if (t.result && t.result->final_rms <= o.tol) ++met;
    if (t.result && t.matches_truth) ++matched;
    log.info("trial {}: {}", i, t.result ? t.result->stop_reason : t.error);
  }
  ordered_json doc;
  doc["trials"] = o.trials;
  doc["met_tol"] = met;
  doc["matched_truth"] = matched;
  doc["runs"] = all;
  write_json(dir / "trials.json", doc);
  out << met << "/" << o.trials << " trials met tol";
  if (!o.network.empty() || !o.builtin.empty()) out << ", " << matched << " matched the true topology";
  out << "\n";
  return met == o.trials ? kExitOk : kExitFailure;
}

int cmd_report(const Options& o, std::ostream& out, spdlog::logger&) {
  if (o.trace.empty()) throw std::invalid_argument("report needs --trace");
  const RecoveryTrace trace = io::trace_from_csv(io::read_file(o.trace), o.trace);
  const std::string table = io::render_trace_table(trace, o.all_rows);
  out << table;
  if (o.out_dir != ".") {
    std::string series = "iteration,epsilon,event\n";
    for (const auto& r : trace) {
      series += std::to_string(r.iteration) + "," + io::format_double(r.epsilon) + "," +
                std::string(to_string(r.event)) + "\n";
    }
    io::write_file(fs::path(o.out_dir) / "epsilon.csv", series);
    io::write_file(fs::path(o.out_dir) / "table.txt", table);
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse electrical network recovery from voltage and power measurements", "gridrecover"};
  app.require_subcommand(1);
  Options o;

  auto data_flags = [&](CLI::App* cmd) {
    cmd->add_option("--network", o.network, "Network JSON file");
    cmd->add_option("--builtin", o.builtin, "Builtin case")
        ->check(CLI::IsMember(builtin::names()));
    cmd->add_option("--m", o.m, "Number of states to sample");
    cmd->add_option("--noise", o.noise, "Gaussian noise sigma added to e, P (and f, Q)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--vmin", o.vmin, "Lower voltage magnitude");
    cmd->add_option("--vmax", o.vmax, "Upper voltage magnitude");
  };
  auto seed_flag = [&](CLI::App* cmd) { cmd->add_option("--seed", o.seed, "Random seed"); };
  auto out_flag = [&](CLI::App* cmd) { cmd->add_option("--out-dir", o.out_dir, "Output directory"); };

  CLI::App* generate = app.add_subcommand("generate", "Write a network and sampled states");
  data_flags(generate);
  seed_flag(generate);
  out_flag(generate);

  CLI::App* estimate = app.add_subcommand("estimate", "Fit line parameters on a fixed topology");
  estimate->add_option("--states", o.states, "State CSV or JSON")->required();
  estimate->add_option("--network", o.network, "Topology to fit (its parameters are ignored)");
  estimate->add_flag("--complete", o.complete, "Fit on the complete graph");
  estimate->add_option("--dump-system", o.dump_system, "Write the linear system as CSV");
  out_flag(estimate);

  CLI::App* sparsify = app.add_subcommand("sparsify", "Spectrally sparsify a network");
  sparsify->add_option("--network", o.network, "Network JSON file")->required();
  sparsify->add_option("--eps", o.eps, "Approximation parameter epsilon")->check(CLI::PositiveNumber);
  seed_flag(sparsify);
  out_flag(sparsify);

  CLI::App* bound = app.add_subcommand("bound", "Certificate on rms after sparsification");
  bound->add_option("--network", o.network, "Network JSON file")->required();
  bound->add_option("--states", o.states, "State CSV or JSON")->required();
  bound->add_option("--eps", o.eps, "Approximation parameter epsilon")->check(CLI::NonNegativeNumber);
  bound->add_option("--variant", o.variant, "fine, coarse or ac");
  bound->add_option("--vmin", o.vmin, "Lower voltage magnitude (coarse)");
  bound->add_option("--vmax", o.vmax, "Upper voltage magnitude (coarse)");
  out_flag(bound);

  CLI::App* recover_cmd = app.add_subcommand("recover", "Recover a sparse network from states");
  recover_cmd->add_option("--states", o.states, "State CSV or JSON");
  data_flags(recover_cmd);
  seed_flag(recover_cmd);
  out_flag(recover_cmd);
  recover_cmd->add_option("--eps", o.eps, "Initial epsilon");
  recover_cmd->add_option("--psi", o.psi, "Epsilon growth factor (> 1)");
  recover_cmd->add_option("--tol", o.tol, "rms tolerance");
  recover_cmd->add_option("--trials", o.trials, "Independent seeded recoveries");
  recover_cmd->add_option("--max-time", o.max_time, "Wall-time limit in seconds (0 disables)");
  recover_cmd->add_option("--max-iterations", o.max_iterations, "Iteration cap (0 disables)");
  recover_cmd->add_option("--max-stale", o.max_stale, "Stop after this many iterations without progress (0 disables)");
  recover_cmd->add_flag("--stop-on-tree", o.stop_on_tree, "Stop once the network is a spanning tree");

  CLI::App* report = app.add_subcommand("report", "Render a trace CSV as a table");
  report->add_option("--trace", o.trace, "Trace CSV")->required();
  report->add_flag("--all", o.all_rows, "Include iterations that did not change the network");
  out_flag(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto log = make_logger(err);
  try {
    if (generate->parsed()) return cmd_generate(o, out, *log);
    if (estimate->parsed()) return cmd_estimate(o, out, *log);
    if (sparsify->parsed()) return cmd_sparsify(o, out, *log);
    if (bound->parsed()) return cmd_bound(o, out, *log);
    if (recover_cmd->parsed()) return cmd_recover(o, out, *log);
    if (report->parsed()) return cmd_report(o, out, *log);
  } catch (const io::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ScenarioError& e) {
    err << "error: infeasible scenario: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace gridrecover::cli
