#include "phaseloss/multipass.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "phaseloss/bounds.hpp"
#include "phaseloss/error.hpp"

namespace phaseloss {
namespace {

void require_component(double value, const char* name) {
  if (!(value > 0.0 && value <= 1.0)) {
    throw DomainError(std::string(name) + " must lie in (0, 1], got " + std::to_string(value));
  }
}

void require_sample_eta(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw DomainError("per-pass transmissivity must lie in (0, 1], got " + std::to_string(eta));
  }
}

double power(double base, std::int64_t exponent) {
  return std::pow(base, static_cast<double>(exponent));
}

}  // namespace

void MultipassSetup::validate() const {
  if (passes < 1) throw DomainError("passes must be >= 1, got " + std::to_string(passes));
  require_component(eta_prep, "eta_prep");
  require_component(eta_det, "eta_det");
  require_component(eta_round, "eta_round");
}

double MultipassSetup::component_factor() const {
  return eta_prep * eta_det * power(eta_round, passes - 1);
}

double multipass_amplitude_speed_sq(const ChannelPoint& ch, std::int64_t passes) {
  if (passes < 1) throw DomainError("passes must be >= 1, got " + std::to_string(passes));
  require_sample_eta(ch.eta);
  const double eta = ch.eta;
  const double single =
      ch.deta_dchi * ch.deta_dchi / (4.0 * eta) + eta * ch.dtheta_dchi * ch.dtheta_dchi;
  const double k = static_cast<double>(passes);
  return power(eta, passes - 1) * k * k * single;
}

ChannelPoint multipass_channel(const ChannelPoint& ch, const MultipassSetup& setup) {
  setup.validate();
  require_sample_eta(ch.eta);
  const double c = setup.component_factor();
  const double k = static_cast<double>(setup.passes);
  ChannelPoint out;
  out.eta = c * power(ch.eta, setup.passes);
  out.theta = k * ch.theta;
  out.dtheta_dchi = k * ch.dtheta_dchi;
  out.deta_dchi = c * k * power(ch.eta, setup.passes - 1) * ch.deta_dchi;
  return out;
}

MultipassBounds multipass_bounds(const ChannelPoint& ch, double n_mean, const MultipassSetup& setup) {
  const ChannelPoint eff = multipass_channel(ch, setup);
  if (eff.eta >= 1.0) {
    throw SingularChannel("multipass: effective transmissivity is 1, quantum limit diverges");
  }
  if (eff.eta <= 0.0) {
    throw SingularChannel("multipass: effective transmissivity underflowed to 0");
  }
  MultipassBounds out;
  out.eta_eff = eff.eta;
  out.sql_k = sql_cple(eff, n_mean);
  out.q_k = quantum_limit_cple(eff, n_mean);
  return out;
}

double incident_photons(double eta, double n_mean, std::int64_t passes) {
  require_sample_eta(eta);
  if (passes < 1) throw DomainError("passes must be >= 1");
  if (eta == 1.0) return n_mean * static_cast<double>(passes);
  // n (1 - eta^k) / (1 - eta)
  return n_mean * -std::expm1(static_cast<double>(passes) * std::log(eta)) / (1.0 - eta);
}

double lost_photons(double eta, double n_mean, std::int64_t passes) {
  require_sample_eta(eta);
  if (passes < 1) throw DomainError("passes must be >= 1");
  return n_mean * -std::expm1(static_cast<double>(passes) * std::log(eta));
}

PassSearch optimal_passes(const ChannelPoint& ch, const MultipassSetup& setup,
                          PassObjective objective, std::int64_t max_passes) {
  setup.validate();
  require_sample_eta(ch.eta);
  if (max_passes < 1) throw DomainError("max_passes must be >= 1");
  if (ch.deta_dchi == 0.0 && ch.dtheta_dchi == 0.0) {
    throw DomainError("optimal_passes: channel does not depend on chi");
  }
  if (objective == PassObjective::PerLostPhoton && ch.eta == 1.0) {
    throw DomainError("optimal_passes: no photons are lost at eta = 1, per-lost-photon objective undefined");
  }

  PassSearch out;
  out.objective = -1.0;
  MultipassSetup trial = setup;
  std::int64_t k = 1;
  for (; k <= max_passes; ++k) {
    trial.passes = k;
    const ChannelPoint eff = multipass_channel(ch, trial);
    // unit photon number: every objective is linear in n
    const double info = sql_cple(eff, 1.0);
    const double photons = objective == PassObjective::PerIncidentPhoton
                               ? incident_photons(ch.eta, 1.0, k)
                               : lost_photons(ch.eta, 1.0, k);
    const double value = info / photons;
    if (value > out.objective) {
      out.objective = value;
      out.k_opt = k;
    }
    if (eff.eta < 1e-6) break;
  }
  out.k_max = std::min(k, max_passes);
  out.capped = k > max_passes && out.k_opt == max_passes;
  return out;
}

MultipassDiagnostics multipass_diagnostics(const ChannelPoint& ch, const MultipassSetup& setup,
                                           std::int64_t max_passes) {
  setup.validate();
  require_sample_eta(ch.eta);
  MultipassDiagnostics out;
  out.round_trip_dominated = setup.eta_round >= setup.eta_prep * setup.eta_det;

  double best_classical = 0.0;
  double best_quantum = 0.0;
  MultipassSetup trial = setup;
  for (std::int64_t k = 1; k <= max_passes; ++k) {
    trial.passes = k;
    const ChannelPoint eff = multipass_channel(ch, trial);
    if (eff.eta >= 1.0) {
      if (ch.eta == 1.0 && setup.eta_round == 1.0) break;
      continue;
    }
    const double photons = incident_photons(ch.eta, 1.0, k);
    best_classical = std::max(best_classical, sql_cple(eff, 1.0) / photons);
    best_quantum = std::max(best_quantum, quantum_limit_cple(eff, 1.0) / photons);
    if (eff.eta < 1e-6) break;
  }
  if (best_quantum > 0.0) {
    out.classical_fraction = best_classical / best_quantum;
    out.rmse_reduction = 1.0 - std::sqrt(out.classical_fraction);
  }
  return out;
}

}  // namespace phaseloss
