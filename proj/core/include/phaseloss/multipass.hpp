#pragma once

// Multi-pass interrogation: the probe traverses the sample k times, possibly
// through lossy preparation, detection and round-trip optics.

#include <cstdint>

#include "phaseloss/gaussian.hpp"

namespace phaseloss {

struct MultipassSetup {
  std::int64_t passes = 1;
  double eta_prep = 1.0;
  double eta_det = 1.0;
  double eta_round = 1.0;

  /// Throws DomainError unless passes >= 1 and every transmissivity is in (0, 1].
  void validate() const;
  /// eta_p eta_d eta_r^{k-1}
  double component_factor() const;
};

/// |d_chi T(k)|^2 for T(k) = (sqrt(eta) e^{i theta})^k with ideal optics:
///   eta^{k-1} k^2 [eta'^2 / (4 eta) + eta theta'^2].
double multipass_amplitude_speed_sq(const ChannelPoint& ch, std::int64_t passes);

/// Single-pass channel seen by the probe after k passes through the sample
/// and the lossy components.
ChannelPoint multipass_channel(const ChannelPoint& ch, const MultipassSetup& setup);

struct MultipassBounds {
  double eta_eff = 0.0;
  double sql_k = 0.0;  ///< classical (coherent-state) Fisher information
  double q_k = 0.0;    ///< quantum limit at the effective channel
};

MultipassBounds multipass_bounds(const ChannelPoint& ch, double n_mean, const MultipassSetup& setup);

/// Photons incident on the sample summed over k passes, n (1 - eta^k) / (1 - eta).
double incident_photons(double eta, double n_mean, std::int64_t passes);
/// Photons absorbed by the sample over k passes, n (1 - eta^k).
double lost_photons(double eta, double n_mean, std::int64_t passes);

enum class PassObjective { PerIncidentPhoton, PerLostPhoton };

struct PassSearch {
  std::int64_t k_opt = 1;
  std::int64_t k_max = 1;   ///< upper end of the scanned range
  bool capped = false;      ///< the optimum sits on k_max because the search limit was reached
  double objective = 0.0;   ///< sql_k divided by the chosen photon count, at k_opt
};

/// Exhaustive integer search over k in [1, k_max], where k_max is the first k
/// with eta_eff < 1e-6, clipped to max_passes. Ties go to the smaller k.
PassSearch optimal_passes(const ChannelPoint& ch, const MultipassSetup& setup,
                          PassObjective objective, std::int64_t max_passes = 1'000'000);

/// Computed, not asserted: best classical multi-pass FI per incident photon as
/// a fraction of the best quantum-limited multi-pass FI per incident photon,
/// and the corresponding RMSE reduction 1 - sqrt(fraction).
struct MultipassDiagnostics {
  double classical_fraction = 0.0;
  double rmse_reduction = 0.0;
  /// eta_r >= eta_p eta_d, including perfect components: the regime in which
  /// quantum probes cannot reduce the RMSE by much more than about 20%.
  bool round_trip_dominated = false;
};

MultipassDiagnostics multipass_diagnostics(const ChannelPoint& ch, const MultipassSetup& setup,
                                           std::int64_t max_passes = 1'000'000);

}  // namespace phaseloss
