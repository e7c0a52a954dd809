#include "phaseloss/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "phaseloss/error.hpp"
#include "phaseloss/numerics.hpp"

namespace phaseloss {
namespace {

void require_eta_open(double eta, const char* what) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw DomainError(std::string(what) + ": transmissivity must lie in (0, 1), got " +
                      std::to_string(eta));
  }
  if (eta == 0.0 || eta == 1.0) {
    throw SingularChannel(std::string(what) + ": bound diverges at eta = " + std::to_string(eta));
  }
}

void require_signal(const ChannelPoint& ch, const char* what) {
  if (!std::isfinite(ch.deta_dchi) || !std::isfinite(ch.dtheta_dchi) || !std::isfinite(ch.theta)) {
    throw DomainError(std::string(what) + ": channel derivatives must be finite");
  }
  if (ch.deta_dchi == 0.0 && ch.dtheta_dchi == 0.0) {
    throw DomainError(std::string(what) + ": channel does not depend on chi (both derivatives zero)");
  }
}

void require_photons(double n_mean, const char* what) {
  if (!(n_mean > 0.0) || !std::isfinite(n_mean)) {
    throw DomainError(std::string(what) + ": mean photon number must be positive");
  }
}

void require_variance(double var_n, const char* what) {
  if (!(var_n >= 0.0) || !std::isfinite(var_n)) {
    throw DomainError(std::string(what) + ": photon-number variance must be non-negative");
  }
}

// 4 eta^2 theta'^2 + eta'^2
double signal_strength(const ChannelPoint& ch) {
  return 4.0 * ch.eta * ch.eta * ch.dtheta_dchi * ch.dtheta_dchi + ch.deta_dchi * ch.deta_dchi;
}

// sqrt(1 + 4 (1 - eta) eta n)
double cple_root(double eta, double n_mean) {
  return std::sqrt(1.0 + 4.0 * (1.0 - eta) * eta * n_mean);
}

double displacement_info_unit(double eta, double n_mean, double n_sq) {
  return (n_mean - n_sq) / (eta * squeezed_variance_factor(n_sq) + (1.0 - eta));
}

}  // namespace

double quantum_limit_cple(const ChannelPoint& ch, double n_mean) {
  require_eta_open(ch.eta, "Q_chi");
  require_signal(ch, "Q_chi");
  require_photons(n_mean, "Q_chi");
  return n_mean * signal_strength(ch) / (ch.eta * (1.0 - ch.eta));
}

InfoBreakdown quantum_limit_intermediate(const ChannelPoint& ch, double n_mean, double var_n) {
  require_eta_open(ch.eta, "intermediate bound");
  require_signal(ch, "intermediate bound");
  require_photons(n_mean, "intermediate bound");
  require_variance(var_n, "intermediate bound");
  const double eta = ch.eta;
  InfoBreakdown out;
  out.phase_term = ch.dtheta_dchi * ch.dtheta_dchi * 4.0 * eta * n_mean * var_n /
                   ((1.0 - eta) * var_n + eta * n_mean);
  out.loss_term = ch.deta_dchi * ch.deta_dchi * n_mean / (eta * (1.0 - eta));
  out.total = out.phase_term + out.loss_term;
  return out;
}

double varsigma_opt(double eta, double n_mean, double var_n) {
  require_eta_open(eta, "varsigma_opt");
  if (!(n_mean >= 0.0)) throw DomainError("varsigma_opt: mean photon number must be non-negative");
  require_variance(var_n, "varsigma_opt");
  const double denom = (1.0 - eta) * var_n + eta * n_mean;
  if (denom == 0.0) throw DomainError("varsigma_opt: undefined for the vacuum (n = Var = 0)");
  return 1.0 - var_n / denom;
}

double sql_cple(const ChannelPoint& ch, double n_mean) {
  if (!(ch.eta >= 0.0 && ch.eta <= 1.0)) {
    throw DomainError("S_chi: transmissivity must lie in (0, 1], got " + std::to_string(ch.eta));
  }
  if (ch.eta == 0.0) throw SingularChannel("S_chi: bound diverges at eta = 0");
  require_signal(ch, "S_chi");
  require_photons(n_mean, "S_chi");
  return n_mean * signal_strength(ch) / ch.eta;
}

double optimal_squeeze_angle(const ChannelPoint& ch) {
  return 2.0 * std::atan2(2.0 * ch.eta * ch.dtheta_dchi, ch.deta_dchi);
}

double output_min_variance(double eta, double n_sq) {
  return 0.25 * (eta * squeezed_variance_factor(n_sq) + (1.0 - eta));
}

double displacement_info(const ChannelPoint& ch, const ProbeSpec& spec) {
  require_eta_open(ch.eta, "D");
  require_signal(ch, "D");
  spec.validate();
  if (spec.n_sq > 0.0 && spec.n_mean == spec.n_sq) {
    throw DomainError("D: probe has zero coherent amplitude, displacement carries no information");
  }
  return displacement_info_unit(ch.eta, spec.n_mean, spec.n_sq) * signal_strength(ch) / ch.eta;
}

CpleSqueezing optimal_squeezing_cple(double eta, double n_mean) {
  require_eta_open(eta, "optimal squeezing");
  require_photons(n_mean, "optimal squeezing");

  const double q = cple_root(eta, n_mean);
  // (q - 1)^2 / (4 (1 - eta) (q - eta)) with q - 1 = 4 (1 - eta) eta n / (q + 1)
  const double closed = 4.0 * (1.0 - eta) * eta * eta * n_mean * n_mean /
                        ((q + 1.0) * (q + 1.0) * (q - eta));

  const auto guard = numerics::golden_section_maximize(
      [&](double s) { return displacement_info_unit(eta, n_mean, s); }, 0.0, n_mean, 1e-13,
      1e-15 * n_mean);

  CpleSqueezing out;
  out.closed_form_n_sq = closed;
  out.numeric_n_sq = guard.x;
  out.mismatch = std::abs(closed - guard.x) > 1e-3 * std::max(1.0, closed);
  out.n_sq = out.mismatch ? guard.x : closed;
  out.efficiency = out.mismatch
                       ? displacement_info_unit(eta, n_mean, out.n_sq) * (1.0 - eta) / n_mean
                       : optimal_cple_efficiency(eta, n_mean);
  return out;
}

double optimal_cple_efficiency(double eta, double n_mean) {
  require_eta_open(eta, "optimal CPLE efficiency");
  require_photons(n_mean, "optimal CPLE efficiency");
  // [2(eta-1)n + q - 1] / [2(eta-1)n] rearranged to avoid cancellation at small n
  return 1.0 - 2.0 * eta / (1.0 + cple_root(eta, n_mean));
}

double optimal_displacement_info(const ChannelPoint& ch, double n_mean) {
  const CpleSqueezing opt = optimal_squeezing_cple(ch.eta, n_mean);
  ProbeSpec spec;
  spec.n_mean = n_mean;
  spec.n_sq = opt.n_sq;
  spec.squeeze_angle = optimal_squeeze_angle(ch);
  return displacement_info(ch, spec);
}

double homodyne_fi(const ChannelPoint& ch, const ProbeSpec& spec) {
  const double d = displacement_info(ch, spec);
  const double v_min = output_min_variance(ch.eta, spec.n_sq);
  const double dv_min = 0.25 * ch.deta_dchi * (squeezed_variance_factor(spec.n_sq) - 1.0);
  return d + dv_min * dv_min / (2.0 * v_min * v_min);
}

GaussianQfiTerms gaussian_qfi_terms(const ChannelPoint& ch, const ProbeSpec& spec) {
  require_eta_open(ch.eta, "Gaussian QFI");
  require_signal(ch, "Gaussian QFI");
  spec.validate();

  const double eta = ch.eta;
  const double alpha = spec.alpha();
  const double r = spec.squeeze_r();
  const double e_minus = std::exp(-2.0 * r);
  const double e_plus = std::exp(2.0 * r);

  Mat2 gen;  // generator of rotations, R'(x) = R(x) gen
  gen << 0.0, -1.0, 1.0, 0.0;

  const Mat2 disp_rot = rotation(spec.rotation + ch.theta);
  const Vec2 e1(1.0, 0.0);
  const Vec2 dd = ch.deta_dchi * alpha / (2.0 * std::sqrt(eta)) * (disp_rot * e1) +
                  ch.dtheta_dchi * std::sqrt(eta) * alpha * (disp_rot * gen * e1);

  const Mat2 axis = rotation(spec.rotation + 0.5 * spec.squeeze_angle + ch.theta);
  Mat2 lambda = Mat2::Zero();
  lambda(0, 0) = 0.25 * (eta * e_minus + 1.0 - eta);
  lambda(1, 1) = 0.25 * (eta * e_plus + 1.0 - eta);
  Mat2 dlambda = Mat2::Zero();
  dlambda(0, 0) = 0.25 * (e_minus - 1.0);
  dlambda(1, 1) = 0.25 * (e_plus - 1.0);

  const Mat2 g = axis * lambda * axis.transpose();
  const Mat2 dg = ch.dtheta_dchi * (gen * g - g * gen) +
                  ch.deta_dchi * (axis * dlambda * axis.transpose());
  const Mat2 g_inv = g.inverse();

  // P = 1 / (4 sqrt(det G)),  dP = -(P / 2) tr(G^-1 dG)
  const double p = 1.0 / (4.0 * std::sqrt(g.determinant()));
  const Mat2 gi_dg = g_inv * dg;
  const double dp = -0.5 * p * gi_dg.trace();

  GaussianQfiTerms out;
  out.covariance = (gi_dg * gi_dg).trace() / (2.0 * (1.0 + p * p));
  // For 0 < eta < 1 the output is pure only for an unsqueezed probe, which then
  // stays pure for every chi and the purity term vanishes identically.
  out.purity = (1.0 - p) > 1e-12 ? 2.0 * dp * dp / (1.0 - std::pow(p, 4)) : 0.0;
  out.displacement = dd.dot(g_inv * dd);
  out.total = out.covariance + out.purity + out.displacement;
  return out;
}

double gaussian_qfi(const ChannelPoint& ch, const ProbeSpec& spec) {
  return gaussian_qfi_terms(ch, spec).total;
}

double dae_info(double eta, double n_mean, double var_n) {
  require_eta_open(eta, "N");
  require_photons(n_mean, "N");
  require_variance(var_n, "N");
  return n_mean * n_mean / (eta * eta * var_n + eta * (1.0 - eta) * n_mean);
}

double dae_number_variance(double n_mean, double n_sq) {
  ProbeSpec{n_mean, n_sq, 0.0, 0.0}.validate();
  const double s = n_sq;
  const double root = std::sqrt(s * (s + 1.0));
  const double gap = std::sqrt(s + 1.0) - std::sqrt(s);
  // 2ns - 2n sqrt(s(s+1)) + n  ==  n (sqrt(s+1) - sqrt(s))^2
  return n_mean * gap * gap + 2.0 * s * root + s;
}

double dae_optimal_photons(double n_sq) {
  const double s = n_sq;
  const double root = std::sqrt(s * (s + 1.0));
  return (2.0 * s + 2.0 * root + 1.0) * (s * (4.0 * s + 3.0) + root);
}

double dae_optimal_squeezing(double n_mean) {
  require_photons(n_mean, "DAE optimal squeezing");
  // dae_optimal_photons is increasing with dae_optimal_photons(s) > s, so the
  // root lies in [0, n_mean].
  return numerics::bisect_root([&](double s) { return dae_optimal_photons(s) - n_mean; }, 0.0,
                               n_mean, 1e-15);
}

double dae_efficiency(double eta, double n_mean, double n_sq) {
  require_eta_open(eta, "N / Q_eta");
  require_photons(n_mean, "N / Q_eta");
  const double var = dae_number_variance(n_mean, n_sq);
  // n (1 - eta) / (eta Var + (1 - eta) n), written so that Var = n gives 1 - eta exactly
  return (1.0 - eta) / (1.0 + eta * (var / n_mean - 1.0));
}

double optimal_dae_efficiency(double eta, double n_mean) {
  return dae_efficiency(eta, n_mean, dae_optimal_squeezing(n_mean));
}

double quantum_limit_dae(double eta, double n_mean) {
  return quantum_limit_cple(ChannelPoint{eta, 0.0, 1.0, 0.0}, n_mean);
}

double sql_dae(double eta, double n_mean) {
  return sql_cple(ChannelPoint{eta, 0.0, 1.0, 0.0}, n_mean);
}

double large_alpha_advantage(double r, double eta) {
  if (!(r >= 0.0)) throw DomainError("large-alpha advantage: squeezing parameter must be >= 0");
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw DomainError("large-alpha advantage: transmissivity must lie in [0, 1]");
  }
  // 1 / (e^{-2r} eta + 1 - eta) = 1 / (1 - eta (1 - e^{-2r}))
  return 1.0 / (1.0 + eta * std::expm1(-2.0 * r));
}

}  // namespace phaseloss
