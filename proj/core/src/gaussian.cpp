#include "phaseloss/gaussian.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "phaseloss/error.hpp"

namespace phaseloss {

double ProbeSpec::alpha() const { return std::sqrt(n_mean - n_sq); }

double ProbeSpec::squeeze_r() const { return squeeze_r_from_photons(n_sq); }

void ProbeSpec::validate() const {
  if (!std::isfinite(n_mean) || !std::isfinite(n_sq) || !std::isfinite(squeeze_angle) ||
      !std::isfinite(rotation)) {
    throw InvalidProbe("probe parameters must be finite");
  }
  if (n_sq < 0.0) throw InvalidProbe("n_sq must be non-negative");
  if (n_sq > n_mean) {
    throw InvalidProbe("n_sq (" + std::to_string(n_sq) + ") exceeds n_mean (" +
                       std::to_string(n_mean) + ")");
  }
}

Mat2 rotation(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

GaussianState make_probe(const ProbeSpec& spec) {
  spec.validate();
  const double r = spec.squeeze_r();

  GaussianState out;
  out.d = rotation(spec.rotation) * Vec2(spec.alpha(), 0.0);

  Mat2 diag = Mat2::Zero();
  diag(0, 0) = 0.25 * std::exp(-2.0 * r);
  diag(1, 1) = 0.25 * std::exp(2.0 * r);
  const Mat2 axis = rotation(spec.rotation + 0.5 * spec.squeeze_angle);
  out.gamma = axis * diag * axis.transpose();
  // exact symmetry; the rotation sandwich can leave a 1-ulp asymmetry
  out.gamma(1, 0) = out.gamma(0, 1);
  return out;
}

GaussianState apply_channel(const GaussianState& state, double eta, double theta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw DomainError("transmissivity must lie in [0, 1], got " + std::to_string(eta));
  }
  const Mat2 rot = rotation(theta);
  GaussianState out;
  out.d = std::sqrt(eta) * (rot * state.d);
  out.gamma = eta * (rot * state.gamma * rot.transpose()) + 0.25 * (1.0 - eta) * Mat2::Identity();
  out.gamma(1, 0) = out.gamma(0, 1);
  return out;
}

double purity(const GaussianState& state) {
  return 1.0 / (4.0 * std::sqrt(state.gamma.determinant()));
}

PhotonMoments photon_moments(const GaussianState& state) {
  const Mat2& g = state.gamma;
  const Vec2& d = state.d;
  PhotonMoments m;
  m.mean = g.trace() + d.squaredNorm() - 0.5;
  m.variance = 2.0 * (g * g).trace() + 4.0 * d.dot(g * d) - 0.25;
  return m;
}

MinQuadrature min_quadrature(const GaussianState& state) {
  Eigen::SelfAdjointEigenSolver<Mat2> eig(state.gamma);
  const Vec2 v = eig.eigenvectors().col(0);
  return {eig.eigenvalues()(0), std::atan2(v(1), v(0))};
}

double squeeze_r_from_photons(double n_sq) { return std::asinh(std::sqrt(n_sq)); }

double squeeze_photons_from_r(double r) {
  const double s = std::sinh(r);
  return s * s;
}

double squeeze_r_from_db(double db) { return 0.5 * db * std::log(10.0) / 10.0; }

double squeeze_db_from_r(double r) { return 20.0 * r / std::log(10.0); }

double squeezed_variance_factor(double n_sq) {
  const double s = std::sqrt(n_sq + 1.0) + std::sqrt(n_sq);
  return 1.0 / (s * s);
}

}  // namespace phaseloss
