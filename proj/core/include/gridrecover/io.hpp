#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gridrecover/bounds.hpp"
#include "gridrecover/network.hpp"
#include "gridrecover/recovery.hpp"
#include "gridrecover/sparsifier.hpp"
#include "gridrecover/states.hpp"

namespace gridrecover::io {

/// Malformed input. line and column are 1-based; 0 means unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, std::size_t column,
             const std::string& what);
  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Network: {"kind":"dc"|"ac","n":int,"edges":[{"j":int,"k":int,"c":float,"s":float}]}
[[nodiscard]] std::string network_to_json(const Network& net);
[[nodiscard]] Network network_from_json(std::string_view text, const std::string& source = "<network>");

// StateSet CSV: header e_1,f_1,P_1,Q_1,...; DC has e_1,P_1,... only.
[[nodiscard]] std::string states_to_csv(const StateSet& set);
[[nodiscard]] StateSet states_from_csv(std::string_view text, const std::string& source = "<states>");

// StateSet JSON: {"kind","n","states":[{"e":[..],"P":[..],"f":[..],"Q":[..]}]}
[[nodiscard]] std::string states_to_json(const StateSet& set);
[[nodiscard]] StateSet states_from_json(std::string_view text, const std::string& source = "<states>");

/// Columns: iteration,edges,rms,kappa,epsilon,event.
[[nodiscard]] std::string trace_to_csv(const RecoveryTrace& trace);
[[nodiscard]] std::string trace_to_json(const RecoveryTrace& trace);
[[nodiscard]] RecoveryTrace trace_from_csv(std::string_view text, const std::string& source = "<trace>");

/// Fixed-width table with the columns Iteration, |E|, rms, kappa, epsilon.
/// Unless `all_rows`, only iterations that changed the network are shown.
[[nodiscard]] std::string render_trace_table(const RecoveryTrace& trace, bool all_rows = false);

/// Columns: j,k,weight,r_eff,leverage,p.
[[nodiscard]] std::string edge_statistics_to_csv(const EdgeStatistics& stats);

[[nodiscard]] std::string bound_report_to_json(const BoundReport& report);

/// Reads a whole file; throws std::runtime_error naming the path on failure.
[[nodiscard]] std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Dispatch on extension: .json is JSON, anything else CSV.
[[nodiscard]] StateSet load_states(const std::filesystem::path& path);
[[nodiscard]] Network load_network(const std::filesystem::path& path);

/// "%.17g", with inf/-inf/nan spelled that way.
[[nodiscard]] std::string format_double(double x);

}  // namespace gridrecover::io
