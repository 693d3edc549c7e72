#include "gridrecover/recovery.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

#include "gridrecover/random.hpp"
#include "gridrecover/sparsifier.hpp"
#include "gridrecover/vandermonde.hpp"

namespace gridrecover {

void RecoveryConfig::validate() const {
  if (!(eps0 > 0.0) || !std::isfinite(eps0)) throw std::invalid_argument("eps0 must be positive");
  if (!(psi > 1.0) || !std::isfinite(psi)) throw std::invalid_argument("psi must exceed 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (!(nnls_tol > 0.0)) throw std::invalid_argument("nnls_tol must be positive");
  if (!(vmin > 0.0) || !(vmax >= vmin)) throw std::invalid_argument("need 0 < vmin <= vmax");
  const auto& s = stopping;
  if (!(s.max_wall_time > 0.0) && s.max_iterations <= 0 && s.max_stale_iterations <= 0 &&
      !s.stop_on_tree) {
    throw std::invalid_argument("at least one stopping criterion must be enabled");
  }
}

int stale_iterations(const RecoveryTrace& trace) noexcept {
  int count = 0;
  for (auto it = trace.rbegin(); it != trace.rend(); ++it) {
    if (it->event == Event::Initial || it->event == Event::Accepted) break;
    ++count;
  }
  return count;
}

StopDecision should_stop(const RecoveryTrace& trace, const RecoveryConfig& cfg,
                         const Network& current, double elapsed_seconds) {
  const auto& s = cfg.stopping;
  if (s.stop_on_tree && current.n() > 0 && connectivity(current).is_spanning_tree()) {
    return {true, "tree"};
  }
  if (s.max_iterations > 0 && !trace.empty() && trace.back().iteration >= s.max_iterations) {
    return {true, "iterations"};
  }
  if (s.max_stale_iterations > 0 && stale_iterations(trace) >= s.max_stale_iterations) {
    return {true, "stale"};
  }
  if (s.max_wall_time > 0.0 && elapsed_seconds >= s.max_wall_time) return {true, "time"};
  return {};
}

namespace {

bool usable(const Network& candidate) {
  if (candidate.size() == 0) return false;
  for (const auto& e : candidate.edges())
    if (e.c > 0.0) return true;
  return false;
}

}  // namespace

RecoveryResult recover(const StateSet& set, int n, const RecoveryConfig& cfg) {
  cfg.validate();
  if (n < 2) throw std::invalid_argument("recovery needs n >= 2");
  if (set.n() != n) throw std::invalid_argument("state set size differs from n");

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  RecoveryResult result;
  RecoveryTrace& trace = result.trace;
  const VandermondeSystem full = assemble(complete_edges(n), set);

  auto estimate = [&](const VandermondeSystem& sys) {
    try {
      return parameter_estimation(sys, cfg.nnls_tol);
    } catch (const NnlsError& err) {
      throw RecoveryError(err.what(), trace);
    }
  };

  double eps = cfg.eps0;
  ParameterEstimate held = estimate(full);
  double held_kappa = condition_number(full);
  trace.push_back({1, held.network.size(), held.rms, held_kappa, eps, Event::Initial});
  result.initial_above_tol = held.rms > cfg.tol;

  for (int iteration = 2;; ++iteration) {
    const StopDecision stop = should_stop(trace, cfg, held.network, elapsed());
    if (stop.stop) {
      result.stop_reason = stop.reason;
      break;
    }
    const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(iteration));
    std::optional<Network> candidate;
    try {
      candidate = sparsify_ac(held.network, eps, seed).network;
    } catch (const std::invalid_argument&) {
      // no positive edge left to sample from
    }

    if (!candidate || !usable(*candidate)) {
      constexpr double inf = std::numeric_limits<double>::infinity();
      trace.push_back({iteration, 0, inf, inf, eps, Event::RejectedRms});
      eps /= cfg.psi;
      continue;
    }
    if (candidate->size() >= held.network.size()) {
      trace.push_back(
          {iteration, held.network.size(), held.rms, held_kappa, eps, Event::NoEdgeReduction});
      eps *= cfg.psi;
      continue;
    }

    const VandermondeSystem sub = full.restrict_to(candidate->edge_set());
    ParameterEstimate next = estimate(sub);
    const double kappa = condition_number(sub);
    if (next.rms <= cfg.tol) {
      trace.push_back({iteration, next.network.size(), next.rms, kappa, eps, Event::Accepted});
      held = std::move(next);
      held_kappa = kappa;
    } else {
      trace.push_back({iteration, next.network.size(), next.rms, kappa, eps, Event::RejectedRms});
      eps /= cfg.psi;
    }
  }

  result.network = held.network.normalized();
  result.final_rms = rms(result.network, set);
  result.final_kappa = result.network.size() > 0
                           ? condition_number(assemble(result.network.edge_set(), set))
                           : std::numeric_limits<double>::infinity();
  return result;
}

}  // namespace gridrecover
