#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "piezo/kernels.h"
#include "piezo/state_space.h"

namespace piezo {

using Complex = std::complex<double>;

/// Eigenvalues sorted by |Im| ascending, then by Re.
struct SpectrumReport {
  Scheme scheme = Scheme::kFem;
  int order = 0;
  FemVariant variant = FemVariant::kStandard;
  double gain = 0.0;
  std::vector<Complex> eigenvalues;
  std::vector<double> residuals;  // ||A v - lambda v|| / (||A||_F ||v||)
  double spectral_radius = 0.0;

  double MaxAbsReal() const;
  double MaxReal() const;
  double MaxResidual() const;
  /// Largest distance from an eigenvalue's conjugate to its nearest
  /// eigenvalue, over eigenvalues with Im != 0.
  double ConjugateMismatch() const;
  /// Im of the first k eigenvalues with Im > 0, dropping |Im| < 1e-6.
  std::vector<double> FirstModes(int k) const;
};

/// Dense non-symmetric eigensolve. The similarity into energy coordinates is
/// applied first when E is positive definite, diagonal balancing otherwise;
/// residuals are measured on the original A. Throws std::runtime_error when
/// the QR iteration fails to converge.
SpectrumReport spectrum(const StateSpaceModel& model);

struct SweepRow {
  Scheme scheme = Scheme::kFem;
  int order = 0;
  FemVariant variant = FemVariant::kStandard;
  int k = 0;  // 1-based mode index
  double im_lambda = 0.0;
};

struct SweepItem {
  Scheme scheme;
  int order;
};

/// First four modes for every (scheme, N). Rows are ordered by scheme, then
/// N, then k regardless of execution policy.
std::vector<SweepRow> convergence_sweep(const std::vector<Scheme>& schemes,
                                        const std::vector<int>& orders,
                                        const PhysicalSetup& setup,
                                        FemVariant variant = FemVariant::kStandard,
                                        Execution exec = Execution::kParallel);

/// Rows for a single item; building block for incremental output.
std::vector<SweepRow> sweep_item(const SweepItem& item, const PhysicalSetup& setup,
                                 FemVariant variant);

/// (2k - 1)(pi/2) sqrt(beta/mu) / l.
double wave_mode_limit(int k, const CompositeParams& params);

/// Limit of f(N) = f_inf + c N^{-p} from two samples.
double richardson_limit(int n1, double f1, int n2, double f2, double p = 2.0);

struct KalmanResult {
  int n = 0;
  int rank = 0;
  double tol = 0.0;
  double threshold = 0.0;  // tol * n * ||A_tilde||_2
  double sv_gap = 0.0;     // retained / next value at the cut
  std::vector<double> subdiagonals;  // Arnoldi h_{k+1,k}, relative to ||A_tilde||_2
};

/// Controllable subspace dimension, computed in energy coordinates by
/// Arnoldi with full re-orthogonalization. Each Krylov vector is normalized,
/// so the 1e6-scale input entries cannot overflow. Throws for n > 600.
KalmanResult kalman_rank(const StateSpaceModel& model, double tol = 1e-10);

/// Orthogonal T (in energy coordinates) with A_bar = T^T A_tilde T
/// block upper triangular [[A_c, *], [0, A_u]] and B_bar = (b_c, 0).
struct Staircase {
  Eigen::MatrixXd t;
  Eigen::MatrixXd a_bar;
  Eigen::VectorXd b_bar;
  std::vector<int> block_sizes;  // {controllable, uncontrollable}, zero sizes omitted
  int controllable = 0;
  double lower_left_norm = 0.0;  // dropped coupling, before zeroing
  std::vector<Complex> uncontrollable_eigenvalues;
};

Staircase staircase_decomposition(const StateSpaceModel& model, double tol = 1e-10);

struct BrockettResult {
  bool pass = false;
  int rank = 0;
  double sv_gap = 0.0;
};

/// Rank of [A B] in energy coordinates; pass iff rank = n.
BrockettResult brockett_check(const StateSpaceModel& model, double tol = 1e-10);
/// Raw matrices, no coordinate change.
BrockettResult brockett_check(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                              double tol = 1e-10);

struct ControlReport {
  Scheme scheme = Scheme::kFem;
  int order = 0;
  int n = 0;
  int kalman_rank = 0;
  int brockett_rank = 0;
  double tol = 0.0;
  double sv_gap = 0.0;
  std::vector<int> block_sizes;
  std::vector<Complex> uncontrollable_eigenvalues;
  bool BrockettPass() const { return brockett_rank == n; }
};

ControlReport control_report(const StateSpaceModel& model, double tol = 1e-10);

/// A - kappa B C with the model's own C. kappa must be >= 0.
StateSpaceModel closed_loop(const StateSpaceModel& model, double gain);

/// Real parts near the top and bottom of the positive-imaginary spectrum.
struct AsymptoteCheck {
  double top_decile_max_real = 0.0;
  double bottom_decile_median_abs_real = 0.0;
  bool pass = false;  // top max Re > -10 * bottom median |Re|
};

AsymptoteCheck imaginary_axis_asymptote(const SpectrumReport& report);

}  // namespace piezo
