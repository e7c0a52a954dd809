#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "phaseloss/error.hpp"
#include "phaseloss/fock.hpp"

namespace phaseloss {
namespace {

using cd = std::complex<double>;

void require_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw DomainError("transmissivity must lie in [0, 1], got " + std::to_string(eta));
  }
}

}  // namespace

double dilation_angle(double eta) {
  require_eta(eta);
  return 2.0 * std::acos(std::sqrt(eta));
}

FockOperator dilation_unitary(double eta, double theta, double varsigma, int dim) {
  const double xi = dilation_angle(eta);
  const CMatrix a = annihilation(dim);
  const CMatrix id = CMatrix::Identity(dim, dim);
  const CMatrix a_s = Eigen::kroneckerProduct(a, id);
  const CMatrix a_e = Eigen::kroneckerProduct(id, a);
  const CMatrix gen = a_e.adjoint() * a_s - a_s.adjoint() * a_e;
  CMatrix u = (0.5 * xi * gen).exp();

  for (int n_s = 0; n_s < dim; ++n_s) {
    for (int n_e = 0; n_e < dim; ++n_e) {
      u.row(n_s * dim + n_e) *= std::polar(1.0, theta * (n_s + varsigma * n_e));
    }
  }
  FockOperator out;
  out.matrix = std::move(u);
  out.dim = dim;
  out.modes = 2;
  return out;
}

double unitarity_defect(const FockOperator& u) {
  const int dim = u.dim;
  std::vector<Eigen::Index> kept;
  for (int n_s = 0; n_s < dim; ++n_s) {
    for (int n_e = 0; n_s + n_e < dim; ++n_e) kept.push_back(n_s * dim + n_e);
  }
  CMatrix cols(u.matrix.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) cols.col(static_cast<Eigen::Index>(j)) = u.matrix.col(kept[j]);
  const CMatrix gram = cols.adjoint() * cols;
  return (gram - CMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

CMatrix reduced_system(const FockVector& two_mode) {
  if (two_mode.modes != 2) throw DomainError("reduced_system expects a two-mode vector");
  const int dim = two_mode.dim;
  const CMatrix amps = Eigen::Map<const Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      two_mode.amplitudes.data(), dim, dim);
  return amps * amps.adjoint();
}

FockVector BlockState::to_dense() const {
  FockVector out;
  out.dim = dim;
  out.modes = 2;
  out.amplitudes = CVector::Zero(static_cast<Eigen::Index>(dim) * dim);
  for (int total = 0; total < dim; ++total) {
    for (int n_e = 0; n_e <= total; ++n_e) {
      out.amplitudes((total - n_e) * dim + n_e) = amplitudes(offset(total) + n_e);
    }
  }
  return out;
}

CMatrix BlockState::reduced_system() const {
  CMatrix amps = CMatrix::Zero(dim, dim);
  for (int total = 0; total < dim; ++total) {
    for (int n_e = 0; n_e <= total; ++n_e) amps(total - n_e, n_e) = amplitudes(offset(total) + n_e);
  }
  return amps * amps.adjoint();
}

Dilation::Dilation(int dim) : dim_(dim) {
  if (dim < 2) throw DomainError("dilation dimension must be >= 2");
  vectors_.reserve(static_cast<std::size_t>(dim));
  values_.reserve(static_cast<std::size_t>(dim));
  for (int total = 0; total < dim; ++total) {
    // i K on the block, basis index j = n_e, n_s = total - j
    CMatrix h = CMatrix::Zero(total + 1, total + 1);
    for (int j = 0; j < total; ++j) {
      const double c = std::sqrt(static_cast<double>((total - j) * (j + 1)));
      h(j + 1, j) = cd(0.0, c);
      h(j, j + 1) = cd(0.0, -c);
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
    vectors_.push_back(eig.eigenvectors());
    values_.push_back(eig.eigenvalues());
  }
}

BlockState Dilation::embed(const CVector& psi) const {
  if (psi.size() > dim_) {
    throw DomainError("state has " + std::to_string(psi.size()) + " levels, dilation holds " +
                      std::to_string(dim_));
  }
  BlockState out;
  out.dim = dim_;
  out.amplitudes = CVector::Zero(static_cast<Eigen::Index>(BlockState::offset(dim_)));
  for (Eigen::Index n = 0; n < psi.size(); ++n) {
    out.amplitudes(static_cast<Eigen::Index>(BlockState::offset(static_cast<int>(n)))) = psi(n);
  }
  return out;
}

BlockState Dilation::apply_loss(const BlockState& state, double eta) const {
  if (state.dim != dim_) throw DomainError("block state dimension does not match the dilation");
  const double t = 0.5 * dilation_angle(eta);
  BlockState out;
  out.dim = dim_;
  out.amplitudes.resize(state.amplitudes.size());
  for (int total = 0; total < dim_; ++total) {
    const auto off = static_cast<Eigen::Index>(BlockState::offset(total));
    const auto x = state.amplitudes.segment(off, total + 1);
    if (x.squaredNorm() == 0.0) {
      out.amplitudes.segment(off, total + 1).setZero();
      continue;
    }
    const CMatrix& v = vectors_[static_cast<std::size_t>(total)];
    const Eigen::VectorXd& lam = values_[static_cast<std::size_t>(total)];
    CVector y = v.adjoint() * x;
    // exp(t K) = exp(-i t (i K))
    for (int j = 0; j <= total; ++j) y(j) *= std::polar(1.0, -t * lam(j));
    out.amplitudes.segment(off, total + 1) = v * y;
  }
  return out;
}

void Dilation::apply_phase(BlockState& state, double theta, double varsigma) const {
  std::vector<cd> sys(static_cast<std::size_t>(dim_));
  std::vector<cd> env(static_cast<std::size_t>(dim_));
  for (int n = 0; n < dim_; ++n) {
    sys[static_cast<std::size_t>(n)] = std::polar(1.0, theta * n);
    env[static_cast<std::size_t>(n)] = std::polar(1.0, theta * varsigma * n);
  }
  for (int total = 0; total < dim_; ++total) {
    const auto off = static_cast<Eigen::Index>(BlockState::offset(total));
    for (int n_e = 0; n_e <= total; ++n_e) {
      state.amplitudes(off + n_e) *=
          sys[static_cast<std::size_t>(total - n_e)] * env[static_cast<std::size_t>(n_e)];
    }
  }
}

BlockState Dilation::apply(const CVector& psi, double eta, double theta, double varsigma) const {
  BlockState out = apply_loss(embed(psi), eta);
  apply_phase(out, theta, varsigma);
  return out;
}

}  // namespace phaseloss
