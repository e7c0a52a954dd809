#include "phaseloss/figures.hpp"

#include <cmath>
#include <cstdio>

#include "phaseloss/bounds.hpp"
#include "phaseloss/error.hpp"
#include "phaseloss/gaussian.hpp"

namespace phaseloss {
namespace {

std::string photon_label(double n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "n=%.6g", n);
  return buf;
}

std::vector<double> sql_line(const std::vector<double>& eta) {
  std::vector<double> out;
  out.reserve(eta.size());
  for (double e : eta) out.push_back(1.0 - e);
  return out;
}

template <typename F>
FigureData tabulate(const char* name, const std::vector<double>& eta, const std::vector<double>& params,
                    std::string (*label)(double), F&& f) {
  FigureData fig{name, eta, {}, sql_line(eta)};
  for (double p : params) {
    Curve c{label(p), p, {}};
    c.values.reserve(eta.size());
    for (double e : eta) c.values.push_back(f(e, p));
    fig.curves.push_back(std::move(c));
  }
  return fig;
}

}  // namespace

std::vector<double> open_eta_grid(int points) {
  if (points < 1) throw DomainError("eta grid needs at least one point");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(points));
  for (int i = 1; i <= points; ++i) out.push_back(static_cast<double>(i) / (points + 1));
  return out;
}

std::vector<double> default_photon_levels() {
  std::vector<double> out;
  for (int i = 0; i <= 8; ++i) out.push_back(std::pow(10.0, i));
  return out;
}

std::vector<double> default_squeezing_levels_db() { return {0.0, 3.0, 6.0, 10.0, 15.0, 20.0}; }

FigureData figure_2a(const std::vector<double>& eta, const std::vector<double>& n_values) {
  return tabulate("fig2a", eta, n_values, photon_label,
                  [](double e, double n) { return optimal_cple_efficiency(e, n); });
}

FigureData figure_2b(const std::vector<double>& eta, const std::vector<double>& n_values, bool squeezed) {
  if (squeezed) {
    return tabulate("fig2b", eta, n_values, photon_label,
                    [](double e, double n) { return optimal_dae_efficiency(e, n); });
  }
  return tabulate("fig2b", eta, n_values, photon_label,
                  [](double e, double n) { return dae_efficiency(e, n, 0.0); });
}

FigureData figure_2c(const std::vector<double>& eta, const std::vector<double>& squeezing_db) {
  return tabulate("fig2c", eta, squeezing_db,
                  [](double db) {
                    char buf[32];
                    std::snprintf(buf, sizeof buf, "dB=%.6g", db);
                    return std::string(buf);
                  },
                  [](double e, double db) { return large_alpha_advantage(squeeze_r_from_db(db), e) * (1.0 - e); });
}

}  // namespace phaseloss
