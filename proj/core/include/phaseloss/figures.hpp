#pragma once

// Curve families of the strategy-versus-quantum-limit comparison plots, each
// normalised to its quantum limit and sampled on an open transmissivity grid.

#include <string>
#include <vector>

namespace phaseloss {

struct Curve {
  std::string label;
  double parameter = 0.0;  ///< mean photon number, or squeezing in dB for fig2c
  std::vector<double> values;
};

struct FigureData {
  std::string name;
  std::vector<double> eta;
  std::vector<Curve> curves;
  std::vector<double> sql;  ///< coherent-state reference 1 - eta
};

/// points equally spaced values i / (points + 1), i = 1..points.
std::vector<double> open_eta_grid(int points);

/// 10^i photons, i = 0..8.
std::vector<double> default_photon_levels();
/// Squeezing levels of the large-amplitude plot in dB.
std::vector<double> default_squeezing_levels_db();

/// Optimal D / Q_chi per photon level.
FigureData figure_2a(const std::vector<double>& eta, const std::vector<double>& n_values);
/// N / Q_eta per photon level, with optimal squeezing or none.
FigureData figure_2b(const std::vector<double>& eta, const std::vector<double>& n_values, bool squeezed = true);
/// Large-amplitude advantage times 1 - eta per squeezing level.
FigureData figure_2c(const std::vector<double>& eta, const std::vector<double>& squeezing_db);

}  // namespace phaseloss
