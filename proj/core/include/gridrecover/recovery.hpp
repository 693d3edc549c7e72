#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gridrecover/network.hpp"
#include "gridrecover/nnls.hpp"
#include "gridrecover/states.hpp"

namespace gridrecover {

/// Numeric criteria are disabled when <= 0.
struct StoppingCriteria {
  double max_wall_time = 600.0;  // seconds
  int max_iterations = 0;
  int max_stale_iterations = 30;
  bool stop_on_tree = false;
};

struct RecoveryConfig {
  double eps0 = 0.1;
  double psi = 1.5;
  double tol = 1e-5;
  StoppingCriteria stopping{};
  std::uint64_t seed = 0;
  double vmin = 0.9;  // diagnostics only
  double vmax = 1.1;
  double nnls_tol = kDefaultNnlsTolerance;

  /// Throws std::invalid_argument on eps0 <= 0, psi <= 1, tol <= 0, no
  /// enabled stopping criterion, or a bad voltage range.
  void validate() const;
};

enum class Event { Initial, Accepted, RejectedRms, NoEdgeReduction };

[[nodiscard]] constexpr std::string_view to_string(Event e) noexcept {
  switch (e) {
    case Event::Initial: return "initial";
    case Event::Accepted: return "accepted";
    case Event::RejectedRms: return "rejected_rms";
    case Event::NoEdgeReduction: return "no_edge_reduction";
  }
  return "unknown";
}

/// One iteration. `epsilon` is the value used by that iteration's Sparsify.
/// Initial and accepted rows describe the new held network, rejected_rms rows
/// the rejected candidate, no_edge_reduction rows the unchanged held network.
struct TraceRow {
  int iteration = 0;
  std::size_t edges = 0;
  double rms = 0.0;
  double kappa = 0.0;
  double epsilon = 0.0;
  Event event = Event::Initial;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

using RecoveryTrace = std::vector<TraceRow>;

struct StopDecision {
  bool stop = false;
  std::string reason;  // "tree", "iterations", "stale", "time" or empty
};

/// Iterations logged since the last initial or accepted row.
[[nodiscard]] int stale_iterations(const RecoveryTrace& trace) noexcept;

[[nodiscard]] StopDecision should_stop(const RecoveryTrace& trace, const RecoveryConfig& cfg,
                                       const Network& current, double elapsed_seconds);

struct RecoveryResult {
  Network network;  // held network with zero-weight edges removed
  RecoveryTrace trace;
  std::string stop_reason;
  double final_rms = 0.0;    // recomputed from the returned network
  double final_kappa = 0.0;  // condition number of the returned network's system
  bool initial_above_tol = false;
};

/// Raised when parameter estimation fails mid-run; carries the trace so far.
class RecoveryError : public std::runtime_error {
 public:
  RecoveryError(const std::string& what, RecoveryTrace trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  [[nodiscard]] const RecoveryTrace& trace() const noexcept { return trace_; }

 private:
  RecoveryTrace trace_;
};

/// Alternates sparsification and re-estimation starting from the complete
/// graph fit, widening epsilon when no edge is removed and narrowing it when
/// the candidate misses tol.
[[nodiscard]] RecoveryResult recover(const StateSet& set, int n, const RecoveryConfig& cfg);

}  // namespace gridrecover
