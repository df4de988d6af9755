#pragma once

#include <Eigen/Dense>

#include "piezo/model.h"
#include "piezo/state_space.h"

namespace piezo {

/// Global N x N matrices on the nodes z_k = k l / N, k = 1..N. The clamped
/// node z = 0 is eliminated.
struct ElementMatrices {
  FemVariant variant = FemVariant::kStandard;
  double h = 0.0;
  Eigen::MatrixXd m1;  // mass
  Eigen::MatrixXd k1;  // first derivative, K1[i][k] = int phi_k phi_i'
  Eigen::MatrixXd k2;  // stiffness
  Eigen::VectorXd b1;  // input column of the Phi_t block
  /// Consistent load -beta/(2 g_b) int phi_i. b1 = m1^{-1} load for the
  /// standard variant; unused by the paper variant.
  Eigen::VectorXd load;
};

/// Throws ValidationError for n < 1.
ElementMatrices element_matrices(int n, const CompositeParams& params,
                                 FemVariant variant);

/// A has the 6x6 block layout over x = (v, w_z, Phi, v_t, w_zt, Phi_t), each
/// block N x N. Output defaults to C = B^T E.
StateSpaceModel assemble_fem(const PhysicalSetup& setup, int n,
                             FemVariant variant = FemVariant::kStandard,
                             OutputMap output = OutputMap::kEnergyAdjoint);

/// Energy Gram with H = 1/2 x^T E x. The paper variant's M1 is not symmetric;
/// its symmetric part is used.
Eigen::MatrixXd energy_gram_fem(const CompositeParams& params, int n,
                                FemVariant variant);

}  // namespace piezo
