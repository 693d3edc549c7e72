#pragma once

#include <string_view>

#include <Eigen/Dense>

#include "gridrecover/network.hpp"
#include "gridrecover/states.hpp"

namespace gridrecover {

enum class BoundVariant { Fine, Coarse, AC };

[[nodiscard]] constexpr std::string_view to_string(BoundVariant v) noexcept {
  switch (v) {
    case BoundVariant::Fine: return "fine";
    case BoundVariant::Coarse: return "coarse";
    case BoundVariant::AC: return "ac";
  }
  return "unknown";
}

/// Certificate rms(G', Omega) <= rms_base + epsilon * bound_term for every
/// epsilon-approximation G' of the network.
struct BoundReport {
  BoundVariant variant = BoundVariant::Fine;
  double rms_base = 0.0;
  double epsilon = 0.0;
  double bound_term = 0.0;
  double bound_total = 0.0;
};

/// Length-mn vector, block k constant at Tr(V_k^-1) / Tr(V_k^-2). DC only.
[[nodiscard]] Eigen::VectorXd phi_vector(const StateSet& set);

/// ||1 - V^-1 lambda|| for a block-constant lambda given by one value per state.
[[nodiscard]] double kernel_shift_norm(const StateSet& set, const Eigen::VectorXd& lambda_per_state);

/// bound_term = ||V L V|| * ||1 - V^-1 phi_V|| / sqrt(mn), spectral norm taken
/// as the max over the per-state blocks V_k L V_k.
[[nodiscard]] BoundReport dc_bound(const Network& net, const StateSet& set, double eps);

/// bound_term = vmax^2 * rho * ||L||, rho = max((1 - vmin)/vmin, (vmax - 1)/vmax).
/// Throws std::invalid_argument if any voltage lies outside [vmin, vmax].
[[nodiscard]] BoundReport dc_bound_coarse(const Network& net, const StateSet& set, double eps,
                                          double vmin, double vmax);

/// Delta(Omega, Gamma) for AC networks.
[[nodiscard]] double ac_delta(const Network& net, const StateSet& set);

/// bound_term = Delta / sqrt(2mn).
[[nodiscard]] BoundReport ac_bound(const Network& net, const StateSet& set, double eps);

}  // namespace gridrecover
