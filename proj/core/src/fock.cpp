#include "phaseloss/fock.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "phaseloss/error.hpp"

namespace phaseloss {
namespace {

using cd = std::complex<double>;

int padded_dim(int dim) { return dim + std::max(20, dim / 4); }

void require_dim(int dim) {
  if (dim < 2) throw DomainError("Fock truncation dimension must be >= 2, got " + std::to_string(dim));
}

// exp[(zeta^* a^2 - zeta a^dag^2) / 2]
CMatrix squeeze_operator(double r, double phi, int dim) {
  const CMatrix a = annihilation(dim);
  const CMatrix ad = creation(dim);
  const cd zeta = std::polar(r, phi);
  const CMatrix gen = 0.5 * (std::conj(zeta) * (a * a) - zeta * (ad * ad));
  return gen.exp();
}

// exp(beta a^dag - beta^* a)
CMatrix displacement_operator(cd beta, int dim) {
  const CMatrix gen = beta * creation(dim) - std::conj(beta) * annihilation(dim);
  return gen.exp();
}

}  // namespace

CMatrix annihilation(int dim) {
  require_dim(dim);
  CMatrix a = CMatrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

CMatrix creation(int dim) { return annihilation(dim).adjoint(); }

CMatrix number_operator(int dim) {
  require_dim(dim);
  CMatrix n = CMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) n(k, k) = k;
  return n;
}

FockVector number_state(int n, int dim) {
  require_dim(dim);
  if (n < 0 || n >= dim) {
    throw TruncationError("number state |" + std::to_string(n) + "> does not fit in dim " +
                              std::to_string(dim),
                          1.0);
  }
  FockVector out;
  out.dim = dim;
  out.amplitudes = CVector::Zero(dim);
  out.amplitudes(n) = 1.0;
  out.tail_mass = top_level_mass(out.amplitudes);
  return out;
}

double top_level_mass(const CVector& amplitudes, int levels) {
  const Eigen::Index n = amplitudes.size();
  const Eigen::Index k = std::min<Eigen::Index>(levels, n);
  return amplitudes.tail(k).squaredNorm();
}

FockVector fock_probe(const ProbeSpec& spec, int dim, double tail_threshold) {
  spec.validate();
  require_dim(dim);
  const int work = padded_dim(dim);

  CVector psi = CVector::Zero(work);
  psi(0) = 1.0;
  if (spec.n_sq > 0.0) psi = squeeze_operator(spec.squeeze_r(), spec.squeeze_angle, work).col(0);
  if (spec.alpha() > 0.0) psi = displacement_operator(spec.alpha(), work) * psi;
  for (int n = 0; n < work; ++n) psi(n) *= std::polar(1.0, spec.rotation * n);

  FockVector out;
  out.dim = dim;
  out.amplitudes = psi.head(dim);
  const double discarded = psi.tail(work - dim).squaredNorm();
  out.tail_mass = top_level_mass(out.amplitudes) + discarded;
  if (out.tail_mass > tail_threshold) {
    throw TruncationError("probe tail mass " + std::to_string(out.tail_mass) +
                              " exceeds threshold at dim " + std::to_string(dim),
                          out.tail_mass);
  }
  return out;
}

int recommended_dim(const ProbeSpec& spec, double tail_threshold) {
  spec.validate();
  const double n = spec.n_mean;
  double levels = n + 10.0 * std::sqrt(n) + 20.0;
  if (spec.n_sq > 0.0) {
    // squeezed-vacuum populations fall off as tanh^2(r) per photon pair
    const double t = spec.n_sq / (spec.n_sq + 1.0);
    const double pairs = std::log(tail_threshold) / std::log(t);
    levels = std::max(levels, 2.0 * pairs + 10.0 * std::sqrt(n));
  }
  return static_cast<int>(std::ceil(levels)) + 1;
}

FockVector fock_probe_auto(const ProbeSpec& spec, double tail_threshold, int max_dim) {
  int dim = std::min(recommended_dim(spec, tail_threshold), max_dim);
  for (;;) {
    try {
      return fock_probe(spec, dim, tail_threshold);
    } catch (const TruncationError&) {
      if (dim >= max_dim) throw;
      dim = std::min(max_dim, dim + std::max(8, dim / 4));
    }
  }
}

FockOperator fock_density(const GaussianState& state, int dim, double tail_threshold) {
  require_dim(dim);
  Eigen::SelfAdjointEigenSolver<Mat2> eig(state.gamma);
  const double lo = eig.eigenvalues()(0);
  const double hi = eig.eigenvalues()(1);
  if (!(lo > 0.0)) throw DomainError("covariance matrix must be positive definite");
  const double nu = 4.0 * std::sqrt(lo * hi);
  if (nu < 1.0 - 1e-12) throw DomainError("covariance matrix violates the uncertainty principle");
  const double n_th = std::max(0.0, 0.5 * (nu - 1.0));
  const double r = 0.25 * std::log(hi / lo);
  const Vec2 axis = eig.eigenvectors().col(0);
  const double phi = 2.0 * std::atan2(axis(1), axis(0));

  const int work = padded_dim(dim);
  CMatrix rho = CMatrix::Zero(work, work);
  double p = 1.0 / (n_th + 1.0);
  const double ratio = n_th / (n_th + 1.0);
  for (int n = 0; n < work; ++n, p *= ratio) rho(n, n) = p;

  CMatrix u = CMatrix::Identity(work, work);
  if (r > 0.0) u = squeeze_operator(r, phi, work);
  const cd beta(state.d(0), state.d(1));
  if (std::abs(beta) > 0.0) u = displacement_operator(beta, work) * u;
  rho = u * rho * u.adjoint();

  FockOperator out;
  out.dim = dim;
  out.hermitian = true;
  out.matrix = rho.topLeftCorner(dim, dim);
  const double kept = out.matrix.diagonal().real().sum();
  double top = 0.0;
  for (int n = std::max(0, dim - 5); n < dim; ++n) top += out.matrix(n, n).real();
  const double tail = top + std::max(0.0, 1.0 - kept);
  if (tail > tail_threshold) {
    throw TruncationError("Gaussian state tail mass " + std::to_string(tail) +
                              " exceeds threshold at dim " + std::to_string(dim),
                          tail);
  }
  return out;
}

GaussianState quadrature_moments(const CVector& psi) {
  const Eigen::Index dim = psi.size();
  cd a1(0.0), a2(0.0);
  double n = 0.0;
  for (Eigen::Index k = 0; k < dim; ++k) {
    n += static_cast<double>(k) * std::norm(psi(k));
    if (k + 1 < dim) a1 += std::conj(psi(k)) * psi(k + 1) * std::sqrt(static_cast<double>(k + 1));
    if (k + 2 < dim) {
      a2 += std::conj(psi(k)) * psi(k + 2) * std::sqrt(static_cast<double>((k + 1) * (k + 2)));
    }
  }
  GaussianState out;
  out.d = Vec2(a1.real(), a1.imag());
  out.gamma(0, 0) = (2.0 * a2.real() + 2.0 * n + 1.0) / 4.0 - out.d(0) * out.d(0);
  out.gamma(1, 1) = (-2.0 * a2.real() + 2.0 * n + 1.0) / 4.0 - out.d(1) * out.d(1);
  out.gamma(0, 1) = out.gamma(1, 0) = a2.imag() / 2.0 - out.d(0) * out.d(1);
  return out;
}

GaussianState quadrature_moments(const CMatrix& rho) {
  const Eigen::Index dim = rho.rows();
  cd a1(0.0), a2(0.0);
  double n = 0.0;
  for (Eigen::Index k = 0; k < dim; ++k) {
    n += static_cast<double>(k) * rho(k, k).real();
    if (k + 1 < dim) a1 += rho(k + 1, k) * std::sqrt(static_cast<double>(k + 1));
    if (k + 2 < dim) a2 += rho(k + 2, k) * std::sqrt(static_cast<double>((k + 1) * (k + 2)));
  }
  GaussianState out;
  out.d = Vec2(a1.real(), a1.imag());
  out.gamma(0, 0) = (2.0 * a2.real() + 2.0 * n + 1.0) / 4.0 - out.d(0) * out.d(0);
  out.gamma(1, 1) = (-2.0 * a2.real() + 2.0 * n + 1.0) / 4.0 - out.d(1) * out.d(1);
  out.gamma(0, 1) = out.gamma(1, 0) = a2.imag() / 2.0 - out.d(0) * out.d(1);
  return out;
}

PhotonMoments number_moments(const CVector& psi) {
  double m1 = 0.0;
  double m2 = 0.0;
  for (Eigen::Index k = 0; k < psi.size(); ++k) {
    const double p = std::norm(psi(k));
    const double n = static_cast<double>(k);
    m1 += n * p;
    m2 += n * n * p;
  }
  return {m1, m2 - m1 * m1};
}

std::vector<double> photon_number_distribution(const CMatrix& rho) {
  const Eigen::Index dim = rho.rows();
  const double trace = rho.diagonal().real().sum();
  if (std::abs(trace - 1.0) > 1e-8) {
    throw TruncationError("density matrix trace " + std::to_string(trace) + " is not within 1e-8 of 1",
                          std::abs(1.0 - trace));
  }
  std::vector<double> p(static_cast<std::size_t>(dim));
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double v = rho(k, k).real();
    if (v < -1e-10) {
      throw NumericError("negative photon-number probability " + std::to_string(v) + " at n = " +
                         std::to_string(k));
    }
    p[static_cast<std::size_t>(k)] = std::max(0.0, v);
  }
  return p;
}

}  // namespace phaseloss
