#include "phaseloss/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <thread>

#include "phaseloss/bounds.hpp"
#include "phaseloss/error.hpp"
#include "phaseloss/fock.hpp"
#include "phaseloss/numerics.hpp"

namespace phaseloss {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr int kGridPoints = 64;

// Output mean and variance of the homodyne record with the probe prepared once.
class PreparedModel {
 public:
  explicit PreparedModel(const HomodyneModel& model)
      : in_(make_probe(model.probe)),
        ch_(model.ch),
        u_(std::cos(model.lo_angle), std::sin(model.lo_angle)),
        scale_(model.noise_scale) {}

  double eta(double chi) const { return ch_.eta + ch_.deta_dchi * chi; }
  double theta(double chi) const { return ch_.theta + ch_.dtheta_dchi * chi; }

  double mean(double chi) const {
    // u^T sqrt(eta) R d = sqrt(eta) (R^T u)^T d
    const Vec2 v = rotation(-theta(chi)) * u_;
    return std::sqrt(eta(chi)) * v.dot(in_.d);
  }

  double variance(double chi) const {
    const Vec2 v = rotation(-theta(chi)) * u_;
    const double e = eta(chi);
    return scale_ * (e * v.dot(in_.gamma * v) + 0.25 * (1.0 - e));
  }

  double log_likelihood(double chi, const SampleStats& s) const {
    const double var = variance(chi);
    const double dev = s.mean - mean(chi);
    return -0.5 * std::log(var) - (s.variance + dev * dev) / (2.0 * var);
  }

 private:
  GaussianState in_;
  ChannelPoint ch_;
  Vec2 u_;
  double scale_;
};

double sample_std(double variance) { return std::sqrt(std::max(0.0, variance)); }

// Welford accumulation so large records need not be stored.
struct Accumulator {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  SampleStats stats() const { return {n, mean, n > 0 ? m2 / static_cast<double>(n) : 0.0}; }
};

template <typename Sink>
void draw_normal(double mu, double sigma, std::int64_t m, SplitMix64& rng, Sink&& sink) {
  std::normal_distribution<double> dist(mu, sigma);
  for (std::int64_t i = 0; i < m; ++i) sink(dist(rng));
}

// Exact joint law of (mean, biased variance) of m normal draws.
SampleStats draw_sufficient(double mu, double sigma, std::int64_t m, SplitMix64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  SampleStats s;
  s.m = m;
  s.mean = mu + sigma / std::sqrt(static_cast<double>(m)) * z(rng);
  if (m > 1) {
    std::chi_squared_distribution<double> chi2(static_cast<double>(m - 1));
    s.variance = sigma * sigma * chi2(rng) / static_cast<double>(m);
  }
  return s;
}

const char* measurement_name(Measurement m) {
  return m == Measurement::Homodyne ? "homodyne" : "intensity";
}

}  // namespace

SplitMix64::SplitMix64(std::uint64_t seed, std::uint64_t stream)
    : state_(seed + (stream << 40) * kGolden) {}

SplitMix64::result_type SplitMix64::operator()() {
  state_ += kGolden;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<double> sample_homodyne(const GaussianState& state, double lo_angle, std::int64_t m,
                                    std::uint64_t seed, std::uint64_t stream) {
  if (m < 1) throw ConfigError("sample count must be >= 1");
  const Vec2 u(std::cos(lo_angle), std::sin(lo_angle));
  SplitMix64 rng(seed, stream);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m));
  draw_normal(u.dot(state.d), sample_std(u.dot(state.gamma * u)), m, rng,
              [&](double x) { out.push_back(x); });
  return out;
}

IntensitySampler::IntensitySampler(const GaussianState& state, IntensityMode mode)
    : mode_(mode), moments_(photon_moments(state)) {
  if (mode == IntensityMode::ExactFock) {
    if (moments_.mean > 4.0) {
      throw ConfigError("exact-fock intensity sampling requires mean photon number <= 4, got " +
                        std::to_string(moments_.mean));
    }
    int dim = 40;
    for (;;) {
      try {
        distribution_ = photon_number_distribution(fock_density(state, dim).matrix);
        break;
      } catch (const TruncationError&) {
        if (dim >= 600) throw;
        dim += dim / 2;
      }
    }
  } else if (moments_.mean < 20.0) {
    throw ConfigError("moment-matched intensity sampling requires mean photon number >= 20, got " +
                      std::to_string(moments_.mean));
  }
}

std::vector<double> IntensitySampler::sample(std::int64_t m, SplitMix64& rng) const {
  if (m < 1) throw ConfigError("sample count must be >= 1");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m));
  if (mode_ == IntensityMode::ExactFock) {
    std::discrete_distribution<int> dist(distribution_.begin(), distribution_.end());
    for (std::int64_t i = 0; i < m; ++i) out.push_back(dist(rng));
  } else {
    draw_normal(moments_.mean, sample_std(moments_.variance), m, rng,
                [&](double x) { out.push_back(x); });
  }
  return out;
}

std::vector<double> sample_intensity(const GaussianState& state, std::int64_t m, std::uint64_t seed,
                                     IntensityMode mode, std::uint64_t stream) {
  SplitMix64 rng(seed, stream);
  return IntensitySampler(state, mode).sample(m, rng);
}

SampleStats SampleStats::of(const std::vector<double>& samples) {
  Accumulator acc;
  for (double x : samples) acc.push(x);
  return acc.stats();
}

double HomodyneModel::mean(double chi) const { return PreparedModel(*this).mean(chi); }

double HomodyneModel::variance(double chi) const { return PreparedModel(*this).variance(chi); }

double HomodyneModel::fisher_information() const {
  const PreparedModel p(*this);
  const double h = 1e-6;
  const double dmu = (p.mean(h) - p.mean(-h)) / (2.0 * h);
  const double dvar = (p.variance(h) - p.variance(-h)) / (2.0 * h);
  const double var = p.variance(0.0);
  return dmu * dmu / var + dvar * dvar / (2.0 * var * var);
}

std::optional<double> estimate_chi_homodyne(const HomodyneModel& model, const SampleStats& stats,
                                            double half_width) {
  if (!(half_width > 0.0)) throw DomainError("estimation bracket must have positive width");
  if (stats.m < 1) throw DomainError("no samples to estimate from");
  const PreparedModel p(model);
  const auto ll = [&](double chi) { return p.log_likelihood(chi, stats); };

  const double step = 2.0 * half_width / (kGridPoints - 1);
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGridPoints; ++i) {
    const double v = ll(-half_width + step * i);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  if (best == 0 || best == kGridPoints - 1) return std::nullopt;
  const double lo = -half_width + step * (best - 1);
  const double hi = -half_width + step * (best + 1);
  return numerics::golden_section_maximize(ll, lo, hi, 0.0, 1e-10 * half_width).x;
}

std::optional<double> estimate_chi_homodyne(const HomodyneModel& model,
                                            const std::vector<double>& samples, double half_width) {
  return estimate_chi_homodyne(model, SampleStats::of(samples), half_width);
}

double default_half_width(const HomodyneModel& model, std::int64_t m) {
  const double fi = model.fisher_information();
  if (!(fi > 0.0)) throw DomainError("homodyne record carries no information on chi");
  double w = 12.0 / std::sqrt(static_cast<double>(m) * fi);
  if (model.ch.deta_dchi != 0.0) {
    const double room = std::min(model.ch.eta, 1.0 - model.ch.eta) / std::abs(model.ch.deta_dchi);
    w = std::min(w, 0.9 * room);
  }
  return w;
}

double estimate_eta_intensity(const std::vector<double>& samples, double n_in) {
  if (!(n_in > 0.0)) throw DomainError("incident photon number must be positive");
  if (samples.empty()) throw DomainError("no samples to estimate from");
  return SampleStats::of(samples).mean / n_in;
}

void ExperimentConfig::validate() const {
  probe.validate();
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (samples < 1) throw ConfigError("samples per trial must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (!(channel.eta > 0.0 && channel.eta < 1.0)) {
    throw ConfigError("simulation requires 0 < eta < 1");
  }
  if (measurement == Measurement::Homodyne) {
    if (channel.deta_dchi == 0.0 && channel.dtheta_dchi == 0.0) {
      throw ConfigError("homodyne estimation needs a chi-dependent channel");
    }
    if (probe.n_mean <= probe.n_sq) throw ConfigError("homodyne estimation needs a displaced probe");
  } else if (sufficient_statistics && intensity_mode == IntensityMode::ExactFock) {
    throw ConfigError("sufficient statistics are only available for Gaussian records");
  }
}

ProbeSpec experiment_probe(const ExperimentConfig& config) {
  ProbeSpec p = config.probe;
  p.squeeze_angle =
      config.measurement == Measurement::Homodyne ? optimal_squeeze_angle(config.channel) : 0.0;
  return p;
}

double experiment_lo_angle(const ExperimentConfig& config) {
  return config.probe.rotation + config.channel.theta + 0.5 * optimal_squeeze_angle(config.channel);
}

namespace {

struct TrialRunner {
  const ExperimentConfig& config;
  ProbeSpec probe;
  GaussianState output;
  HomodyneModel model;
  double half_width = 0.0;
  std::optional<IntensitySampler> sampler;

  explicit TrialRunner(const ExperimentConfig& c) : config(c), probe(experiment_probe(c)) {
    output = apply_channel(make_probe(probe), c.channel.eta, c.channel.theta);
    if (c.measurement == Measurement::Homodyne) {
      model = HomodyneModel{c.channel, probe, experiment_lo_angle(c), 1.0};
      half_width = default_half_width(model, c.samples);
    } else {
      sampler.emplace(output, c.intensity_mode);
    }
  }

  double homodyne_mean() const { return PreparedModel(model).mean(0.0); }
  double homodyne_std() const { return sample_std(PreparedModel(model).variance(0.0)); }

  std::vector<double> samples(std::int64_t trial) const {
    SplitMix64 rng(config.seed, static_cast<std::uint64_t>(trial));
    if (sampler) return sampler->sample(config.samples, rng);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(config.samples));
    draw_normal(homodyne_mean(), homodyne_std(), config.samples, rng,
                [&](double x) { out.push_back(x); });
    return out;
  }

  SampleStats stats(std::int64_t trial) const {
    SplitMix64 rng(config.seed, static_cast<std::uint64_t>(trial));
    if (config.sufficient_statistics) {
      const double mu = sampler ? sampler->mean() : homodyne_mean();
      const double sigma = sampler ? sample_std(sampler->variance()) : homodyne_std();
      return draw_sufficient(mu, sigma, config.samples, rng);
    }
    if (sampler) {
      if (sampler->mode() == IntensityMode::ExactFock) return SampleStats::of(sampler->sample(config.samples, rng));
      Accumulator acc;
      draw_normal(sampler->mean(), sample_std(sampler->variance()), config.samples, rng,
                  [&](double x) { acc.push(x); });
      return acc.stats();
    }
    Accumulator acc;
    draw_normal(homodyne_mean(), homodyne_std(), config.samples, rng, [&](double x) { acc.push(x); });
    return acc.stats();
  }

  double estimate(std::int64_t trial) const {
    const SampleStats s = stats(trial);
    if (sampler) return s.mean / probe.n_mean;
    const auto chi = estimate_chi_homodyne(model, s, half_width);
    return chi ? *chi : std::numeric_limits<double>::quiet_NaN();
  }
};

}  // namespace

std::vector<double> trial_samples(const ExperimentConfig& config, std::int64_t trial) {
  config.validate();
  if (trial < 0 || trial >= config.trials) throw ConfigError("trial index out of range");
  return TrialRunner(config).samples(trial);
}

EstimationReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const TrialRunner runner(config);

  EstimationReport r;
  r.measurement = measurement_name(config.measurement);
  r.trials = config.trials;
  r.samples_per_trial = config.samples;
  r.seed = config.seed;
  r.sufficient_statistics = config.sufficient_statistics;
  r.estimates.assign(static_cast<std::size_t>(config.trials), 0.0);

  const auto run_range = [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t t = begin; t < end; ++t) r.estimates[static_cast<std::size_t>(t)] = runner.estimate(t);
  };
  const std::int64_t workers = std::min<std::int64_t>(config.threads, config.trials);
  if (workers <= 1) {
    run_range(0, config.trials);
  } else {
    std::vector<std::thread> pool;
    const std::int64_t chunk = (config.trials + workers - 1) / workers;
    for (std::int64_t w = 0; w < workers; ++w) {
      const std::int64_t begin = w * chunk;
      const std::int64_t end = std::min(config.trials, begin + chunk);
      if (begin < end) pool.emplace_back(run_range, begin, end);
    }
    for (auto& t : pool) t.join();
  }

  if (config.measurement == Measurement::Homodyne) {
    r.truth = 0.0;
    r.lo_angle = runner.model.lo_angle;
    r.predicted_fi = homodyne_fi(config.channel, runner.probe);
  } else {
    r.truth = config.channel.eta;
    const double var_in = photon_moments(make_probe(runner.probe)).variance;
    r.predicted_fi = dae_info(config.channel.eta, runner.probe.n_mean, var_in);
    r.surrogate = config.intensity_mode == IntensityMode::MomentMatched;
    if (r.surrogate) {
      r.notes.push_back("intensity samples drawn from a moment-matched Gaussian surrogate");
    }
  }
  if (config.sufficient_statistics) {
    r.notes.push_back("sample mean and variance drawn from their exact joint distribution");
  }

  // reduction in trial order
  Accumulator acc;
  double sq = 0.0;
  for (double e : r.estimates) {
    if (std::isnan(e)) {
      ++r.failures;
      continue;
    }
    acc.push(e);
    sq += (e - r.truth) * (e - r.truth);
  }
  if (acc.n > 0) {
    r.mean = acc.mean;
    r.mse = sq / static_cast<double>(acc.n);
  }
  if (acc.n >= 2) {
    r.variance_defined = true;
    r.empirical_variance = acc.m2 / static_cast<double>(acc.n - 1);
    r.saturation_ratio =
        1.0 / (static_cast<double>(config.samples) * r.empirical_variance * r.predicted_fi);
  } else {
    r.notes.push_back("fewer than two successful trials, empirical variance undefined");
  }
  if (r.failures > 0) {
    r.notes.push_back(std::to_string(r.failures) + " trials had no likelihood maximum inside the bracket");
  }
  return r;
}

void to_json(nlohmann::json& j, const EstimationReport& r) {
  const auto number_or_null = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
  nlohmann::json estimates = nlohmann::json::array();
  for (double e : r.estimates) estimates.push_back(number_or_null(e));
  j = nlohmann::json{{"measurement", r.measurement},
                     {"trials", r.trials},
                     {"samples_per_trial", r.samples_per_trial},
                     {"seed", r.seed},
                     {"truth", r.truth},
                     {"mean", r.mean},
                     {"empirical_variance", number_or_null(r.empirical_variance)},
                     {"variance_defined", r.variance_defined},
                     {"mse", r.mse},
                     {"predicted_fi", r.predicted_fi},
                     {"saturation_ratio", number_or_null(r.saturation_ratio)},
                     {"failures", r.failures},
                     {"surrogate", r.surrogate},
                     {"sufficient_statistics", r.sufficient_statistics},
                     {"lo_angle", r.lo_angle},
                     {"notes", r.notes},
                     {"estimates", estimates}};
}

}  // namespace phaseloss
