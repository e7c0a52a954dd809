#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "phaseloss/gaussian.hpp"

namespace phaseloss::testing {

class CaseGenerator {
 public:
  explicit CaseGenerator(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

  // log-uniform on [lo, hi]
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

  ProbeSpec probe(double max_photons) {
    ProbeSpec p;
    p.n_mean = log_uniform(1e-3, max_photons);
    p.n_sq = uniform(0.0, 1.0) * p.n_mean;
    p.squeeze_angle = uniform(-M_PI, M_PI);
    p.rotation = uniform(-M_PI, M_PI);
    return p;
  }

  ChannelPoint channel(double eta_lo = 0.01, double eta_hi = 0.99) {
    ChannelPoint ch;
    ch.eta = uniform(eta_lo, eta_hi);
    ch.theta = uniform(0.0, 2.0 * M_PI);
    ch.deta_dchi = uniform(-2.0, 2.0);
    ch.dtheta_dchi = uniform(-2.0, 2.0);
    return ch;
  }

  GaussianState state(double max_photons) { return make_probe(probe(max_photons)); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace phaseloss::testing
