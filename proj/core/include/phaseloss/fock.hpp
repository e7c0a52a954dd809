#pragma once

// Truncated number-basis oracle. Two-mode vectors and operators use the
// row-major index n_s * dim + n_e (system outer, environment inner).

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "phaseloss/gaussian.hpp"

namespace phaseloss {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

struct FockVector {
  CVector amplitudes;
  int dim = 0;
  int modes = 1;
  /// Population of the top five retained levels plus any mass discarded by
  /// the truncation.
  double tail_mass = 0.0;
};

struct FockOperator {
  CMatrix matrix;
  int dim = 0;
  int modes = 1;
  bool hermitian = false;
};

CMatrix annihilation(int dim);
CMatrix creation(int dim);
CMatrix number_operator(int dim);

FockVector number_state(int n, int dim);

/// Population of the top `levels` entries of a single-mode vector.
double top_level_mass(const CVector& amplitudes, int levels = 5);

/// R(rotation) D(alpha) S(r, phi)|0> built from matrix exponentials in a padded
/// space and truncated to dim levels. Throws TruncationError when the tail
/// mass exceeds the threshold.
FockVector fock_probe(const ProbeSpec& spec, int dim, double tail_threshold = 1e-10);

/// Starting truncation for fock_probe_auto: the larger of n + 10 sqrt(n) + 20
/// and an estimate of the squeezed-vacuum tail.
int recommended_dim(const ProbeSpec& spec, double tail_threshold = 1e-10);

/// fock_probe with the dimension grown until the tail threshold is met.
FockVector fock_probe_auto(const ProbeSpec& spec, double tail_threshold = 1e-10, int max_dim = 600);

/// Density matrix of an arbitrary single-mode Gaussian state, built as a
/// displaced squeezed thermal state.
FockOperator fock_density(const GaussianState& state, int dim, double tail_threshold = 1e-10);

/// Quadrature means and covariance of a truncated pure or mixed state.
GaussianState quadrature_moments(const CVector& psi);
GaussianState quadrature_moments(const CMatrix& rho);

/// <n> and Var(n) of a single-mode vector.
PhotonMoments number_moments(const CVector& psi);

/// Diagonal of rho in the number basis. Throws TruncationError if the trace is
/// more than 1e-8 from one and NumericError on a diagonal entry below -1e-10.
std::vector<double> photon_number_distribution(const CMatrix& rho);

/// Mixing angle of the dilation beam splitter, 2 arccos(sqrt(eta)).
double dilation_angle(double eta);

/// U2(theta, varsigma) U1(eta) on the truncated two-mode space, with U1 the
/// matrix exponential of the beam-splitter generator
///   U1 = exp[(xi/2)(a_e^dag a_s - a_s^dag a_e)],   U2 = exp[i theta (n_s + varsigma n_e)].
FockOperator dilation_unitary(double eta, double theta, double varsigma, int dim);

/// max |(U^dag U - I)_{ij}| over the retained subspace (total photons < dim).
double unitarity_defect(const FockOperator& u);

/// Tr_E of a two-mode row-major vector.
CMatrix reduced_system(const FockVector& two_mode);

/// Two-mode state stored by total photon number N: entry (N, n_e) sits at
/// N (N + 1) / 2 + n_e with n_s = N - n_e. Only N < dim is represented, so the
/// dilation acts exactly (no truncation edge).
struct BlockState {
  int dim = 0;
  CVector amplitudes;

  static std::size_t offset(int total) { return static_cast<std::size_t>(total) * (total + 1) / 2; }
  std::complex<double> at(int n_s, int n_e) const { return amplitudes(offset(n_s + n_e) + n_e); }

  /// Row-major dim x dim representation.
  FockVector to_dense() const;
  CMatrix reduced_system() const;
};

/// Dilation applied block by block through precomputed spectral
/// decompositions of the beam-splitter generator.
class Dilation {
 public:
  explicit Dilation(int dim);

  int dim() const { return dim_; }

  /// |psi>|0> in block layout.
  BlockState embed(const CVector& psi) const;
  /// U1(eta) applied to an arbitrary block state.
  BlockState apply_loss(const BlockState& state, double eta) const;
  /// In-place U2(theta, varsigma).
  void apply_phase(BlockState& state, double theta, double varsigma) const;
  BlockState apply(const CVector& psi, double eta, double theta, double varsigma) const;

 private:
  int dim_;
  std::vector<CMatrix> vectors_;       // eigenvectors of i K restricted to block N
  std::vector<Eigen::VectorXd> values_;
};

using PureFamily = std::function<CVector(double chi)>;
using DensityFamily = std::function<CMatrix(double chi)>;

/// 4 (<d psi|d psi> - |<psi|d psi>|^2) for a given state and derivative.
double pure_qfi_from_derivative(const CVector& psi, const CVector& dpsi);

/// Richardson-extrapolated central difference of a family at chi0 with step h.
CVector richardson_derivative(const PureFamily& family, double chi0, double h);
CMatrix richardson_derivative(const DensityFamily& family, double chi0, double h);

/// Pure-state QFI of a family by Richardson-refined central differences.
/// Throws NumericError unless halving the step changes the result by less
/// than 1e-6 relative (absolute below 1).
double pure_qfi(const PureFamily& family, double chi0, double dchi = 1e-5);

/// Symmetric-logarithmic-derivative QFI sum_{ij} 2 |<i|drho|j>|^2 / (l_i + l_j),
/// skipping pairs whose eigenvalues are both below 1e-12.
double sld_qfi(const CMatrix& rho, const CMatrix& drho);

/// Mixed-state QFI of a density-matrix family; same convergence rule as pure_qfi.
double mixed_qfi(const DensityFamily& family, double chi0, double dchi = 1e-3);

}  // namespace phaseloss
