#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "phaseloss/error.hpp"
#include "phaseloss/fock.hpp"

namespace phaseloss {
namespace {

template <typename T, typename Family>
T central_difference(const Family& family, double chi0, double h) {
  return (family(chi0 + h) - family(chi0 - h)) / (2.0 * h);
}

void require_converged(double coarse, double fine, const char* what) {
  const double tol = 1e-6 * std::max(1.0, std::abs(fine));
  if (!(std::abs(coarse - fine) <= tol)) {
    throw NumericError(std::string(what) + ": derivative did not converge under step halving (" +
                       std::to_string(coarse) + " vs " + std::to_string(fine) + ")");
  }
}

}  // namespace

double pure_qfi_from_derivative(const CVector& psi, const CVector& dpsi) {
  const std::complex<double> overlap = psi.dot(dpsi);
  return 4.0 * (dpsi.squaredNorm() - std::norm(overlap));
}

CVector richardson_derivative(const PureFamily& family, double chi0, double h) {
  const CVector coarse = central_difference<CVector>(family, chi0, h);
  const CVector fine = central_difference<CVector>(family, chi0, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

CMatrix richardson_derivative(const DensityFamily& family, double chi0, double h) {
  const CMatrix coarse = central_difference<CMatrix>(family, chi0, h);
  const CMatrix fine = central_difference<CMatrix>(family, chi0, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

double pure_qfi(const PureFamily& family, double chi0, double dchi) {
  if (!(dchi > 0.0)) throw DomainError("pure_qfi: step must be positive");
  const CVector psi = family(chi0);
  const double coarse = pure_qfi_from_derivative(psi, richardson_derivative(family, chi0, dchi));
  const double fine = pure_qfi_from_derivative(psi, richardson_derivative(family, chi0, 0.5 * dchi));
  require_converged(coarse, fine, "pure_qfi");
  return fine;
}

double sld_qfi(const CMatrix& rho, const CMatrix& drho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(rho);
  const Eigen::VectorXd& lam = eig.eigenvalues();
  const CMatrix m = eig.eigenvectors().adjoint() * drho * eig.eigenvectors();
  double f = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    for (Eigen::Index j = 0; j < lam.size(); ++j) {
      if (lam(i) < 1e-12 && lam(j) < 1e-12) continue;
      const double s = lam(i) + lam(j);
      if (s <= 0.0) continue;
      f += 2.0 * std::norm(m(i, j)) / s;
    }
  }
  return f;
}

double mixed_qfi(const DensityFamily& family, double chi0, double dchi) {
  if (!(dchi > 0.0)) throw DomainError("mixed_qfi: step must be positive");
  const CMatrix rho = family(chi0);
  const double coarse = sld_qfi(rho, richardson_derivative(family, chi0, dchi));
  const double fine = sld_qfi(rho, richardson_derivative(family, chi0, 0.5 * dchi));
  require_converged(coarse, fine, "mixed_qfi");
  return fine;
}

}  // namespace phaseloss
