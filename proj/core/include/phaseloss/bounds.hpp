#pragma once

// Closed-form information quantities for correlated phase-and-loss estimation
// (CPLE) and direct absorption estimation (DAE).
//
// All quantities are Fisher informations per unit chi^2 for a single probe.
// The parameter chi enters only through the local ChannelPoint; operations
// that diverge at eta = 0 or eta = 1 throw SingularChannel instead of
// returning infinity.

#include "phaseloss/gaussian.hpp"

namespace phaseloss {

/// Additive split of a bound into its phase-driven and loss-driven parts.
struct InfoBreakdown {
  double phase_term = 0.0;
  double loss_term = 0.0;
  double total = 0.0;
};

/// Quantum limit Q_chi = n [4 eta^2 theta'^2 + eta'^2] / (eta (1 - eta)).
double quantum_limit_cple(const ChannelPoint& ch, double n_mean);

/// Bound obtained with the optimal dilation phase for a probe with the given
/// photon-number mean and variance; never exceeds quantum_limit_cple.
InfoBreakdown quantum_limit_intermediate(const ChannelPoint& ch, double n_mean, double var_n);

/// Environment phase ratio minimising the dilated pure-state QFI:
///   1 - Var / ((1 - eta) Var + eta n).
double varsigma_opt(double eta, double n_mean, double var_n);

/// Standard quantum limit S_chi = n [4 eta^2 theta'^2 + eta'^2] / eta. Equals (1 - eta) Q_chi.
double sql_cple(const ChannelPoint& ch, double n_mean);

/// Squeezing angle phi that aligns the squeezed quadrature of the output with
/// the direction in which the displacement moves, 2 atan2(2 eta theta', eta').
double optimal_squeeze_angle(const ChannelPoint& ch);

/// Information carried by the displacement vector of an optimally aligned
/// squeezed coherent probe:
///   D = (n - n_sq) [4 eta^2 theta'^2 + eta'^2] / (eta [e^{-2r} eta + 1 - eta]).
double displacement_info(const ChannelPoint& ch, const ProbeSpec& spec);

/// Variance of the optimally squeezed output quadrature, [e^{-2r} eta + 1 - eta] / 4.
double output_min_variance(double eta, double n_sq);

struct CpleSqueezing {
  double n_sq = 0.0;          ///< reported optimum (closed form unless the guard disagrees)
  double efficiency = 0.0;    ///< D_opt / Q_chi
  double closed_form_n_sq = 0.0;
  double numeric_n_sq = 0.0;  ///< golden-section maximiser of D over n_sq
  bool mismatch = false;      ///< closed form and numeric maximiser disagree beyond tolerance
};

/// Optimal squeezing photon number for CPLE at fixed total photon number,
/// guarded by a golden-section maximisation of displacement_info.
CpleSqueezing optimal_squeezing_cple(double eta, double n_mean);

/// D_opt / Q_chi from the closed form
///   [2(eta-1) n + sqrt(1 - 4(eta-1) eta n) - 1] / [2 (eta - 1) n].
double optimal_cple_efficiency(double eta, double n_mean);

/// D at the optimal squeezing for the given channel.
double optimal_displacement_info(const ChannelPoint& ch, double n_mean);

/// Fisher information of homodyne detection at the optimal local-oscillator
/// angle: D + (dV_min/dchi)^2 / (2 V_min^2).
double homodyne_fi(const ChannelPoint& ch, const ProbeSpec& spec);

/// The three contributions to the QFI of the output Gaussian state.
struct GaussianQfiTerms {
  double covariance = 0.0;   ///< tr[(G^-1 dG)^2] / (2 (1 + P^2))
  double purity = 0.0;       ///< 2 (dP)^2 / (1 - P^4)
  double displacement = 0.0; ///< dd^T G^-1 dd
  double total = 0.0;
};

/// Single-mode Gaussian QFI of the probe after the channel, with the chi
/// derivatives assembled from the ChannelPoint by the chain rule.
GaussianQfiTerms gaussian_qfi_terms(const ChannelPoint& ch, const ProbeSpec& spec);
double gaussian_qfi(const ChannelPoint& ch, const ProbeSpec& spec);

/// Information in the mean detected intensity:
///   N = n^2 / (eta^2 Var + eta (1 - eta) n).
double dae_info(double eta, double n_mean, double var_n);

/// Photon-number variance of an amplitude-squeezed pure Gaussian probe.
double dae_number_variance(double n_mean, double n_sq);

/// Mean photon number at which n_sq minimises dae_number_variance:
///   (2 s + 2 sqrt(s (s + 1)) + 1) (s (4 s + 3) + sqrt(s (s + 1))).
double dae_optimal_photons(double n_sq);

/// Inverse of dae_optimal_photons by bracketed bisection on [0, n_mean].
double dae_optimal_squeezing(double n_mean);

/// N_opt / Q_eta at the DAE-optimal squeezing (or at a fixed n_sq).
double dae_efficiency(double eta, double n_mean, double n_sq);
double optimal_dae_efficiency(double eta, double n_mean);

/// Q_eta = n / (eta (1 - eta)).
double quantum_limit_dae(double eta, double n_mean);
/// S_eta = n / eta.
double sql_dae(double eta, double n_mean);

/// Large-amplitude advantage of squeezing, 1 / (e^{-2r} eta + 1 - eta).
double large_alpha_advantage(double r, double eta);

}  // namespace phaseloss
