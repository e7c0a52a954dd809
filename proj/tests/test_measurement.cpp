#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "phaseloss/bounds.hpp"
#include "phaseloss/error.hpp"
#include "phaseloss/measurement.hpp"

using namespace phaseloss;

namespace {

// Checks mean and variance of a sample against exact values within 5 standard errors.
void expect_moments(const std::vector<double>& x, double mean, double variance, double fourth_central) {
  const double m = static_cast<double>(x.size());
  const SampleStats s = SampleStats::of(x);
  EXPECT_NEAR(s.mean, mean, 5.0 * std::sqrt(variance / m));
  EXPECT_NEAR(s.variance, variance, 5.0 * std::sqrt((fourth_central - variance * variance) / m));
}

void expect_gaussian_moments(const std::vector<double>& x, double mean, double variance) {
  expect_moments(x, mean, variance, 3.0 * variance * variance);
}

ExperimentConfig coherent_phase_config() {
  ExperimentConfig c;
  c.probe = {100.0, 0.0, 0.0, 0.0};
  c.channel = {0.8, 0.3, 0.0, 1.0};
  c.measurement = Measurement::Homodyne;
  c.samples = 1000;
  c.trials = 20;
  c.seed = 7;
  return c;
}

}  // namespace

TEST(SplitMix64, DeterministicAndStreamSeparated) {
  SplitMix64 a(42);
  SplitMix64 b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
  std::set<std::uint64_t> first;
  for (std::uint64_t s = 0; s < 1000; ++s) first.insert(SplitMix64(42, s)());
  EXPECT_EQ(first.size(), 1000u);
}

TEST(SampleHomodyne, VacuumAnyAngle) {
  for (double angle : {0.0, 0.9, 2.5}) {
    expect_gaussian_moments(sample_homodyne(GaussianState::vacuum(), angle, 100000, 3), 0.0, 0.25);
  }
}

TEST(SampleHomodyne, CoherentMean) {
  expect_gaussian_moments(sample_homodyne(make_probe({9.0, 0.0, 0.0, 0.0}), 0.0, 100000, 4), 3.0, 0.25);
}

TEST(SampleHomodyne, LossySqueezedAtOptimalAngle) {
  const ChannelPoint ch{0.8, 0.4, 0.0, 1.0};
  const double n_sq = 2.0;
  ProbeSpec spec{6.0, n_sq, optimal_squeeze_angle(ch), 0.0};
  const GaussianState out = apply_channel(make_probe(spec), ch.eta, ch.theta);
  const double lo = ch.theta + 0.5 * spec.squeeze_angle;
  const double r = spec.squeeze_r();
  const double v_min = (std::exp(-2.0 * r) * ch.eta + 1.0 - ch.eta) / 4.0;
  const Vec2 u(std::cos(lo), std::sin(lo));
  expect_gaussian_moments(sample_homodyne(out, lo, 100000, 5), u.dot(out.d), v_min);
}

TEST(SampleHomodyne, DeterministicGivenSeed) {
  const GaussianState s = make_probe({2.0, 0.5, 0.3, 0.0});
  EXPECT_EQ(sample_homodyne(s, 0.2, 1000, 11), sample_homodyne(s, 0.2, 1000, 11));
  EXPECT_NE(sample_homodyne(s, 0.2, 1000, 11), sample_homodyne(s, 0.2, 1000, 11, 1));
}

TEST(SampleIntensity, CoherentExactFock) {
  const std::vector<double> x = sample_intensity(make_probe({3.0, 0.0, 0.0, 0.0}), 100000, 6, IntensityMode::ExactFock);
  for (double v : x) EXPECT_EQ(v, std::floor(v));
  // Poisson(3): fourth central moment 3 + 3 * 3^2
  expect_moments(x, 3.0, 3.0, 30.0);
}

TEST(SampleIntensity, VarianceAfterLoss) {
  const ProbeSpec spec{2.0, 0.5, 0.0, 0.0};
  const double eta = 0.6;
  const PhotonMoments in = photon_moments(make_probe(spec));
  const GaussianState out = apply_channel(make_probe(spec), eta, 0.0);
  const double mean = eta * in.mean;
  const double var = eta * eta * in.variance + eta * (1.0 - eta) * in.mean;
  const IntensitySampler sampler(out, IntensityMode::ExactFock);
  double mu4 = 0.0;
  for (std::size_t n = 0; n < sampler.distribution().size(); ++n) {
    mu4 += sampler.distribution()[n] * std::pow(n - mean, 4);
  }
  SplitMix64 rng(8);
  expect_moments(sampler.sample(100000, rng), mean, var, mu4);

  const ProbeSpec bright{200.0, 3.0, 0.0, 0.0};
  const PhotonMoments bin = photon_moments(make_probe(bright));
  const GaussianState bout = apply_channel(make_probe(bright), eta, 0.0);
  expect_gaussian_moments(sample_intensity(bout, 100000, 9, IntensityMode::MomentMatched), eta * bin.mean,
                          eta * eta * bin.variance + eta * (1.0 - eta) * bin.mean);
}

TEST(SampleIntensity, SqueezedVacuumOnlyEvenCounts) {
  const std::vector<double> x = sample_intensity(make_probe({1.0, 1.0, 0.0, 0.0}), 20000, 10, IntensityMode::ExactFock);
  int nonzero = 0;
  for (double v : x) {
    EXPECT_EQ(std::fmod(v, 2.0), 0.0);
    nonzero += v > 0.0;
  }
  EXPECT_GT(nonzero, 0);
}

TEST(SampleIntensity, ModeSizeMismatch) {
  EXPECT_THROW(sample_intensity(make_probe({10.0, 0.0, 0.0, 0.0}), 10, 1, IntensityMode::ExactFock), ConfigError);
  EXPECT_THROW(sample_intensity(make_probe({10.0, 0.0, 0.0, 0.0}), 10, 1, IntensityMode::MomentMatched), ConfigError);
}

TEST(EstimateChiHomodyne, ZeroNoiseRecoversTruth) {
  HomodyneModel model{{0.7, 0.2, 0.6, 1.0}, {4.0, 1.0, 0.0, 0.0}, 0.0, 1e-12};
  model.probe.squeeze_angle = optimal_squeeze_angle(model.ch);
  model.lo_angle = model.ch.theta + 0.5 * model.probe.squeeze_angle;
  const double truth = 0.003;
  std::mt19937_64 gen(12);
  std::normal_distribution<double> z;
  std::vector<double> x(100);
  for (double& v : x) v = model.mean(truth) + std::sqrt(model.variance(truth)) * z(gen);
  const auto chi = estimate_chi_homodyne(model, x, 0.01);
  ASSERT_TRUE(chi.has_value());
  EXPECT_NEAR(*chi, truth, 1e-6);
}

TEST(EstimateChiHomodyne, EdgeMaximumFlagsFailure) {
  const HomodyneModel model{{0.7, 0.0, 0.0, 1.0}, {4.0, 0.0, 0.0, 0.0}, M_PI / 2.0, 1.0};
  const std::vector<double> far(10, 5.0);
  EXPECT_FALSE(estimate_chi_homodyne(model, far, 0.01).has_value());
}

TEST(EstimateEtaIntensity, NoiselessSamples) {
  EXPECT_DOUBLE_EQ(estimate_eta_intensity(std::vector<double>(50, 0.3 * 40.0), 40.0), 0.3);
  EXPECT_THROW(estimate_eta_intensity({1.0}, 0.0), DomainError);
}

TEST(RunExperiment, BitwiseDeterministic) {
  const ExperimentConfig c = coherent_phase_config();
  const nlohmann::json a = run_experiment(c);
  const nlohmann::json b = run_experiment(c);
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(RunExperiment, ThreadCountDoesNotChangeResults) {
  ExperimentConfig c = coherent_phase_config();
  const EstimationReport one = run_experiment(c);
  c.threads = 3;
  const EstimationReport three = run_experiment(c);
  EXPECT_EQ(one.estimates, three.estimates);
  EXPECT_EQ(one.empirical_variance, three.empirical_variance);
}

TEST(RunExperiment, TrialSamplesReproduceEstimates) {
  const ExperimentConfig c = coherent_phase_config();
  const EstimationReport r = run_experiment(c);
  const HomodyneModel model{c.channel, experiment_probe(c), experiment_lo_angle(c), 1.0};
  for (std::int64_t t : {0, 5, 19}) {
    const auto chi = estimate_chi_homodyne(model, trial_samples(c, t), default_half_width(model, c.samples));
    ASSERT_TRUE(chi.has_value());
    EXPECT_EQ(*chi, r.estimates[static_cast<std::size_t>(t)]);
  }
}

TEST(RunExperiment, SingleTrialLeavesVarianceUndefined) {
  ExperimentConfig c = coherent_phase_config();
  c.trials = 1;
  const EstimationReport r = run_experiment(c);
  EXPECT_FALSE(r.variance_defined);
  EXPECT_EQ(r.estimates.size(), 1u);
  const nlohmann::json j = r;
  EXPECT_TRUE(j.at("empirical_variance").is_null());
  EXPECT_TRUE(j.at("saturation_ratio").is_null());
}

TEST(RunExperiment, InvalidConfigs) {
  ExperimentConfig c = coherent_phase_config();
  c.trials = 0;
  EXPECT_THROW(run_experiment(c), ConfigError);
  c = coherent_phase_config();
  c.channel.eta = 1.0;
  EXPECT_THROW(run_experiment(c), ConfigError);
  c = coherent_phase_config();
  c.channel.dtheta_dchi = 0.0;
  EXPECT_THROW(run_experiment(c), ConfigError);
  c = coherent_phase_config();
  c.measurement = Measurement::Intensity;
  c.intensity_mode = IntensityMode::ExactFock;
  c.sufficient_statistics = true;
  EXPECT_THROW(run_experiment(c), ConfigError);
}

TEST(RunExperiment, SufficientStatisticsMatchFullSampling) {
  // both routes estimate the same variance; compare at 5 standard errors of 400 trials
  ExperimentConfig c = coherent_phase_config();
  c.trials = 400;
  const EstimationReport full = run_experiment(c);
  c.sufficient_statistics = true;
  const EstimationReport fast = run_experiment(c);
  EXPECT_NEAR(full.saturation_ratio, 1.0, 5.0 * std::sqrt(2.0 / 399.0));
  EXPECT_NEAR(fast.saturation_ratio, 1.0, 5.0 * std::sqrt(2.0 / 399.0));
}

// With 20000 trials the saturation ratio has a standard error of 1%; bands are 5 standard errors.
TEST(CramerRao, CoherentHomodyneSaturates) {
  ExperimentConfig c = coherent_phase_config();
  c.samples = 100000;
  c.trials = 20000;
  c.sufficient_statistics = true;
  const EstimationReport r = run_experiment(c);
  EXPECT_EQ(r.failures, 0);
  EXPECT_NEAR(r.saturation_ratio, 1.0, 0.05);
}

TEST(CramerRao, SqueezedLossDrivenHomodyneSaturates) {
  ExperimentConfig c;
  c.probe = {1e4, squeeze_photons_from_r(squeeze_r_from_db(15.0)), 0.0, 0.0};
  c.channel = {0.95, 0.0, 1.0, 0.0};
  c.samples = 100000;
  c.trials = 20000;
  c.sufficient_statistics = true;
  const EstimationReport r = run_experiment(c);
  EXPECT_EQ(r.failures, 0);
  EXPECT_NEAR(r.predicted_fi, homodyne_fi(c.channel, experiment_probe(c)), 0.0);
  EXPECT_NEAR(r.saturation_ratio, 1.0, 0.05);
}

TEST(CramerRao, CoherentIntensitySaturates) {
  ExperimentConfig c;
  c.probe = {100.0, 0.0, 0.0, 0.0};
  c.channel = {0.6, 0.0, 1.0, 0.0};
  c.measurement = Measurement::Intensity;
  c.samples = 100000;
  c.trials = 20000;
  c.sufficient_statistics = true;
  const EstimationReport r = run_experiment(c);
  EXPECT_TRUE(r.surrogate);
  EXPECT_NEAR(r.predicted_fi, dae_info(0.6, 100.0, 100.0), 1e-12 * r.predicted_fi);
  EXPECT_NEAR(r.saturation_ratio, 1.0, 0.05);
}

TEST(CramerRao, DaeOptimalSqueezingReducesVarianceAsPredicted) {
  ExperimentConfig c;
  c.channel = {0.6, 0.0, 1.0, 0.0};
  c.measurement = Measurement::Intensity;
  c.samples = 100000;
  c.trials = 20000;
  c.sufficient_statistics = true;
  c.probe = {100.0, 0.0, 0.0, 0.0};
  c.seed = 21;
  const EstimationReport coherent = run_experiment(c);
  c.probe.n_sq = dae_optimal_squeezing(100.0);
  c.seed = 22;
  const EstimationReport squeezed = run_experiment(c);
  const double predicted = squeezed.predicted_fi / coherent.predicted_fi;
  EXPECT_GT(predicted, 1.0);
  EXPECT_NEAR(coherent.empirical_variance / squeezed.empirical_variance / predicted, 1.0, 0.1);
}

TEST(EstimatorConsistency, BiasShrinksAsOneOverM) {
  // coherent probe, theta-only channel, LO a sixth of a turn off the signal direction so that
  // the mean is curved in chi; delta-method bias -mu'' sigma^2 / (2 mu'^3 m). Antithetic
  // pairs of sample means cancel the odd noise terms and leave the bias.
  const HomodyneModel model{{0.9, 0.0, 0.0, 1.0}, {0.04 / 0.9, 0.0, 0.0, 0.0}, M_PI / 3.0, 1.0};
  const double h = 1e-4;
  const double d1 = (model.mean(h) - model.mean(-h)) / (2.0 * h);
  const double d2 = (model.mean(h) - 2.0 * model.mean(0.0) + model.mean(-h)) / (h * h);
  const double sigma2 = model.variance(0.0);
  const double mu = model.mean(0.0);
  std::mt19937_64 gen(31);
  std::normal_distribution<double> z;
  std::vector<double> log_m;
  std::vector<double> log_bias;
  const int pairs = 20000;
  for (std::int64_t m : {1000, 10000, 100000}) {
    const double predicted = -d2 * sigma2 / (2.0 * d1 * d1 * d1 * static_cast<double>(m));
    std::chi_squared_distribution<double> chi2(static_cast<double>(m - 1));
    double sum = 0.0;
    int ok = 0;
    for (int t = 0; t < pairs; ++t) {
      const double dev = std::sqrt(sigma2 / m) * z(gen);
      for (double sign : {1.0, -1.0}) {
        const SampleStats s{m, mu + sign * dev, sigma2 * chi2(gen) / m};
        const auto chi = estimate_chi_homodyne(model, s, 0.7);
        if (!chi) continue;
        sum += *chi;
        ++ok;
      }
    }
    EXPECT_EQ(ok, 2 * pairs) << m;
    const double bias = sum / ok;
    EXPECT_GT(bias / predicted, 1.0 / 3.0) << m;
    EXPECT_LT(bias / predicted, 3.0) << m;
    log_m.push_back(std::log10(static_cast<double>(m)));
    log_bias.push_back(std::log10(std::abs(bias)));
  }
  const double slope = (log_bias.back() - log_bias.front()) / (log_m.back() - log_m.front());
  EXPECT_NEAR(slope, -1.0, std::log10(3.0) / 2.0);
}
