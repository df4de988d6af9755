#pragma once

#include <Eigen/Dense>

namespace piezo {

/// Coordinates z = L^T x with E = L L^T, in which H = 1/2 |z|^2. A lossless
/// model becomes exactly skew and collocated feedback becomes symmetric, so
/// eigen- and rank computations are well scaled even when the entries of A
/// span many decades.
struct EnergyCoordinates {
  Eigen::MatrixXd l;        // lower Cholesky factor of E
  Eigen::MatrixXd a_tilde;  // L^T A L^{-T}
  Eigen::VectorXd b_tilde;  // L^T B

  Eigen::VectorXd ToEnergy(const Eigen::VectorXd& x) const { return l.transpose() * x; }
  Eigen::VectorXd FromEnergy(const Eigen::VectorXd& z) const;
  Eigen::MatrixXd FromEnergy(const Eigen::MatrixXd& z) const;
};

/// Throws std::domain_error when E is not symmetric positive definite.
EnergyCoordinates to_energy_coordinates(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                                        const Eigen::MatrixXd& E);

/// Parlett-Reinsch diagonal balancing in place, powers of two only.
/// Returns d with A_out = D^{-1} A_in D.
Eigen::VectorXd balance(Eigen::MatrixXd& A);

/// Largest singular value.
double spectral_norm(const Eigen::MatrixXd& M);

}  // namespace piezo
