#include "piezo/linalg.h"

#include <cmath>
#include <stdexcept>

namespace piezo {

Eigen::VectorXd EnergyCoordinates::FromEnergy(const Eigen::VectorXd& z) const {
  return l.transpose().triangularView<Eigen::Upper>().solve(z);
}

Eigen::MatrixXd EnergyCoordinates::FromEnergy(const Eigen::MatrixXd& z) const {
  return l.transpose().triangularView<Eigen::Upper>().solve(z);
}

EnergyCoordinates to_energy_coordinates(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                                        const Eigen::MatrixXd& E) {
  const Eigen::MatrixXd sym = 0.5 * (E + E.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(sym);
  if (llt.info() != Eigen::Success) {
    throw std::domain_error("energy Gram matrix is not positive definite");
  }
  EnergyCoordinates ec;
  ec.l = llt.matrixL();
  const auto lt = ec.l.transpose().triangularView<Eigen::Upper>();
  // A_tilde = L^T A L^{-T}, formed as (L^{-1} (L^T A)^T)^T.
  const Eigen::MatrixXd lta = lt * A;
  ec.a_tilde = ec.l.triangularView<Eigen::Lower>().solve(lta.transpose()).transpose();
  ec.b_tilde = lt * B;
  return ec;
}

Eigen::VectorXd balance(Eigen::MatrixXd& A) {
  const Eigen::Index n = A.rows();
  Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
  constexpr double kRadix = 2.0;
  bool converged = false;
  while (!converged) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double c = A.col(i).cwiseAbs().sum() - std::abs(A(i, i));
      const double r = A.row(i).cwiseAbs().sum() - std::abs(A(i, i));
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      double cc = c;
      const double s = c + r;
      while (cc < r / kRadix) {
        cc *= kRadix;
        f *= kRadix;
      }
      while (cc >= r * kRadix) {
        cc /= kRadix;
        f /= kRadix;
      }
      if ((cc + r / f) < 0.95 * s) {
        converged = false;
        d(i) *= f;
        A.row(i) /= f;
        A.col(i) *= f;
      }
    }
  }
  return d;
}

double spectral_norm(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return 0.0;
  return Eigen::BDCSVD<Eigen::MatrixXd>(M).singularValues()(0);
}

}  // namespace piezo
