#pragma once

#include <string>

#include <Eigen/Dense>

#include "piezo/model.h"

namespace piezo {

enum class Scheme { kFem, kMfem };
enum class FemVariant { kStandard, kPaper };

/// How the scalar output y = C x is formed.
///   kEnergyAdjoint: C = B^T E, the adjoint of B in the energy inner product.
///   kTranspose:     C = B^T in Euclidean coordinates.
enum class OutputMap { kEnergyAdjoint, kTranspose };

/// Layout of the 6N state vector.
///   kFieldBlocks:    (c1 .. c6), each a block of N nodal values (FEM).
///   kElementStacked: six integrated fields per element, element-major (MFEM).
enum class StateOrdering { kFieldBlocks, kElementStacked };

std::string to_string(Scheme s);
std::string to_string(FemVariant v);
std::string to_string(OutputMap m);
std::string to_string(StateOrdering o);
Scheme parse_scheme(const std::string& text);
FemVariant parse_variant(const std::string& text);
OutputMap parse_output_map(const std::string& text);

/// Dense single-input single-output model x' = A x + B u, y = C x with
/// H(x) = 1/2 x^T E x. Immutable by convention once assembled.
struct StateSpaceModel {
  Scheme scheme = Scheme::kFem;
  FemVariant variant = FemVariant::kStandard;
  StateOrdering ordering = StateOrdering::kFieldBlocks;
  OutputMap output = OutputMap::kEnergyAdjoint;
  int order = 0;       // N
  double gain = 0.0;   // kappa already folded into A; 0 for open loop
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  Eigen::RowVectorXd C;
  Eigen::MatrixXd E;
  PhysicalSetup setup;

  int n() const { return static_cast<int>(A.rows()); }

  /// Scheme, N, variant and parameter hash. The gain is excluded so an
  /// open-loop snapshot restores into its closed-loop continuation.
  std::string Provenance() const;

  double Energy(const Eigen::VectorXd& x) const { return 0.5 * x.dot(E * x); }
  double Output(const Eigen::VectorXd& x) const { return C.dot(x); }

  /// Throws ValidationError on inconsistent dimensions or non-finite entries.
  void Validate() const;
};

/// Fills C from B and E according to `map`.
void set_output(StateSpaceModel& model, OutputMap map);

/// ||E A + A^T E||_F / (||E||_F ||A||_F).
double relative_skew_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& E);

}  // namespace piezo
