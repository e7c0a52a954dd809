#pragma once

// Monte Carlo estimation experiments: homodyne detection for correlated
// phase-and-loss estimation and intensity detection for absorption estimation.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "phaseloss/gaussian.hpp"

namespace phaseloss {

/// SplitMix64 generator. Stream t starts t * 2^40 steps along the seed's Weyl
/// sequence, so up to 2^24 streams of up to 2^40 draws never overlap.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

 private:
  std::uint64_t state_;
};

/// m draws of the quadrature at angle lo_angle: N(u^T d, u^T G u), u = (cos, sin).
std::vector<double> sample_homodyne(const GaussianState& state, double lo_angle, std::int64_t m,
                                    std::uint64_t seed, std::uint64_t stream = 0);

enum class IntensityMode { ExactFock, MomentMatched };

/// Photon counting on a Gaussian state. ExactFock samples the number
/// distribution of the truncated density matrix (mean photon number <= 4);
/// MomentMatched draws from a normal with the exact photon mean and variance
/// (mean photon number >= 20).
class IntensitySampler {
 public:
  IntensitySampler(const GaussianState& state, IntensityMode mode);

  std::vector<double> sample(std::int64_t m, SplitMix64& rng) const;
  IntensityMode mode() const { return mode_; }
  double mean() const { return moments_.mean; }
  double variance() const { return moments_.variance; }
  const std::vector<double>& distribution() const { return distribution_; }

 private:
  IntensityMode mode_;
  PhotonMoments moments_;
  std::vector<double> distribution_;
};

std::vector<double> sample_intensity(const GaussianState& state, std::int64_t m, std::uint64_t seed,
                                     IntensityMode mode, std::uint64_t stream = 0);

/// Sample size, mean and biased variance (1/m) of a sample.
struct SampleStats {
  std::int64_t m = 0;
  double mean = 0.0;
  double variance = 0.0;

  static SampleStats of(const std::vector<double>& samples);
};

/// Homodyne record of a probe sent through the channel, as a function of chi
/// with eta(chi) = eta + eta' chi and theta(chi) = theta + theta' chi.
struct HomodyneModel {
  ChannelPoint ch;
  ProbeSpec probe;
  double lo_angle = 0.0;
  double noise_scale = 1.0;  ///< multiplies the output covariance

  double mean(double chi) const;
  double variance(double chi) const;
  /// Fisher information of one sample at chi = 0.
  double fisher_information() const;
};

/// Maximum-likelihood chi over [-half_width, half_width]: a 64-point grid
/// followed by golden-section refinement. Returns nullopt when the maximum
/// sits on the bracket edge.
std::optional<double> estimate_chi_homodyne(const HomodyneModel& model, const SampleStats& stats,
                                            double half_width);
std::optional<double> estimate_chi_homodyne(const HomodyneModel& model,
                                            const std::vector<double>& samples, double half_width);

/// Default bracket: 12 standard deviations of the efficient estimator, clipped
/// so that eta(chi) stays inside (0, 1).
double default_half_width(const HomodyneModel& model, std::int64_t m);

/// Method-of-moments transmissivity: sample mean / n_in.
double estimate_eta_intensity(const std::vector<double>& samples, double n_in);

enum class Measurement { Homodyne, Intensity };

struct ExperimentConfig {
  ProbeSpec probe;
  ChannelPoint channel;
  Measurement measurement = Measurement::Homodyne;
  IntensityMode intensity_mode = IntensityMode::MomentMatched;
  std::int64_t samples = 10000;
  std::int64_t trials = 100;
  std::uint64_t seed = 1;
  int threads = 1;
  /// Draw the sample mean and variance from their exact joint distribution
  /// instead of drawing every sample (Gaussian records only).
  bool sufficient_statistics = false;

  void validate() const;
};

struct EstimationReport {
  std::string measurement;
  std::int64_t trials = 0;
  std::int64_t samples_per_trial = 0;
  std::vector<double> estimates;  ///< chi-hat (homodyne) or eta-hat (intensity); NaN marks a failure
  double truth = 0.0;
  double mean = 0.0;
  double empirical_variance = std::numeric_limits<double>::quiet_NaN();
  bool variance_defined = false;
  double mse = 0.0;
  double predicted_fi = 0.0;
  double saturation_ratio = std::numeric_limits<double>::quiet_NaN();
  std::int64_t failures = 0;
  std::uint64_t seed = 0;
  bool surrogate = false;          ///< moment-matched intensity samples
  bool sufficient_statistics = false;
  double lo_angle = 0.0;
  std::vector<std::string> notes;
};

void to_json(nlohmann::json& j, const EstimationReport& r);

/// Probe actually used by an experiment: homodyne runs squeeze along the
/// optimal angle, intensity runs use amplitude squeezing (angle 0).
ProbeSpec experiment_probe(const ExperimentConfig& config);

/// Local-oscillator angle of homodyne runs: the direction in which the output
/// displacement moves, which the optimal squeezing aligns with the squeezed
/// quadrature.
double experiment_lo_angle(const ExperimentConfig& config);

/// Raw samples of one trial, identical to those the experiment uses.
std::vector<double> trial_samples(const ExperimentConfig& config, std::int64_t trial);

EstimationReport run_experiment(const ExperimentConfig& config);

}  // namespace phaseloss
