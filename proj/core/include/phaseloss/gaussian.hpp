#pragma once

// Single-mode Gaussian states in the quadrature convention
//   x1 = (a^dag + a) / 2,   x2 = i (a^dag - a) / 2,
// so the vacuum covariance matrix is I/4 and a coherent state |alpha> has
// displacement (Re alpha, Im alpha).

#include <Eigen/Core>

namespace phaseloss {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Displacement vector and covariance matrix of one optical mode.
struct GaussianState {
  Vec2 d = Vec2::Zero();
  Mat2 gamma = 0.25 * Mat2::Identity();

  static GaussianState vacuum() { return {}; }
};

/// Squeezed, displaced and rotated vacuum R(rotation) D(alpha) S(r, squeeze_angle)|0>
/// parameterised by its photon budget.
struct ProbeSpec {
  double n_mean = 0.0;         ///< total mean photon number
  double n_sq = 0.0;           ///< photons spent on squeezing, sinh^2(r)
  double squeeze_angle = 0.0;  ///< phi; the squeezed quadrature lies at angle phi/2
  double rotation = 0.0;       ///< global phase-space rotation

  /// Real coherent amplitude sqrt(n_mean - n_sq).
  double alpha() const;
  /// Squeezing parameter asinh(sqrt(n_sq)).
  double squeeze_r() const;

  /// Throws InvalidProbe unless 0 <= n_sq <= n_mean and all fields are finite.
  void validate() const;
};

/// Local model of the channel at the operating point chi0: transmissivity,
/// phase and their first derivatives with respect to the estimated parameter.
struct ChannelPoint {
  double eta = 1.0;
  double theta = 0.0;
  double deta_dchi = 0.0;
  double dtheta_dchi = 0.0;
};

struct PhotonMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Counter-clockwise rotation matrix R(angle).
Mat2 rotation(double angle);

GaussianState make_probe(const ProbeSpec& spec);

/// Loss eta followed by phase shift theta:
///   d -> sqrt(eta) R d,   gamma -> eta R gamma R^T + (1 - eta) I/4.
GaussianState apply_channel(const GaussianState& state, double eta, double theta);

/// tr(rho^2) = 1 / (4 sqrt(det gamma)).
double purity(const GaussianState& state);

PhotonMoments photon_moments(const GaussianState& state);

/// Smallest eigenvalue of the covariance matrix and the angle of its eigenvector.
struct MinQuadrature {
  double variance;
  double angle;
};
MinQuadrature min_quadrature(const GaussianState& state);

// Squeezing unit conversions. Decibels are 10 log10(e^{2r}).
double squeeze_r_from_photons(double n_sq);
double squeeze_photons_from_r(double r);
double squeeze_r_from_db(double db);
double squeeze_db_from_r(double r);

/// e^{-2r} evaluated from n_sq without cancellation: 1 / (sqrt(n_sq + 1) + sqrt(n_sq))^2.
double squeezed_variance_factor(double n_sq);

}  // namespace phaseloss
