#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "piezo/state_space.h"

namespace piezo {

using InputFn = std::function<double(double)>;

class StepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProvenanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StepDiagnostics {
  long steps = 0;
  /// max_k |H_k - H_0| / H_0.
  double max_relative_drift = 0.0;
  /// max_k |(H_{k+1} - H_k) - dt y_m (u_m - kappa y_m)| / H_k. Only
  /// meaningful when C = B^T E and E A is skew.
  double max_dissipation_residual = 0.0;
  bool dissipation_checked = false;
  /// max_k (H_{k+1} - H_k) / H_0; positive values are energy increases.
  double max_energy_increase = -std::numeric_limits<double>::infinity();
};

struct Trajectory {
  Scheme scheme = Scheme::kFem;
  int order = 0;
  double gain = 0.0;
  std::string provenance;
  double dt = 0.0;
  std::vector<double> t;
  Eigen::MatrixXd states;  // n x samples
  std::vector<double> y, energy, v_tip, w_tip;
  StepDiagnostics diagnostics;

  int samples() const { return static_cast<int>(t.size()); }
};

/// Implicit midpoint x+ = P x + G u(t + dt/2), applied in energy coordinates
/// when E is positive definite. (I - dt/2 A) is factored once.
class MidpointStepper {
 public:
  MidpointStepper(const StateSpaceModel& model, double dt);

  double dt() const { return dt_; }
  double rcond() const { return rcond_; }
  bool energy_coordinates() const { return energy_; }

  /// State in working coordinates, where H = 1/2 z^T W z.
  Eigen::VectorXd ToWork(const Eigen::VectorXd& x) const;
  Eigen::VectorXd FromWork(const Eigen::VectorXd& z) const;
  double WorkEnergy(const Eigen::VectorXd& z) const;
  double WorkOutput(const Eigen::VectorXd& z) const { return c_.dot(z); }

  Eigen::VectorXd Step(const Eigen::VectorXd& z, double u_mid) const {
    return p_ * z + g_ * u_mid;
  }
  /// P^steps by repeated squaring.
  Eigen::MatrixXd Power(long steps) const;

 private:
  double dt_;
  double rcond_ = 0.0;
  bool energy_ = false;
  Eigen::MatrixXd l_;  // Cholesky factor of E (energy mode)
  Eigen::MatrixXd w_;  // E (fallback mode)
  Eigen::MatrixXd p_;
  Eigen::VectorXd g_;
  Eigen::RowVectorXd c_;
};

struct IntegrateOptions {
  int record_stride = 1;
  /// With a null input, jump between records with P^stride instead of
  /// stepping; per-step checks are then made per record.
  bool accelerate_free = false;
};

/// Integrates x' = A x + B u from t0 for `steps` steps of size dt. A null
/// `u` means u = 0.
Trajectory integrate(const StateSpaceModel& model, const InputFn& u,
                     const Eigen::VectorXd& x0, double t0, double dt, long steps,
                     const IntegrateOptions& options = {});

/// Zero-input state after `steps` steps, via P^steps.
Eigen::VectorXd advance_free(const StateSpaceModel& model, const Eigen::VectorXd& x,
                             double dt, long steps);

/// min(1e-2, 0.05 * 2 pi / max Im lambda).
double default_dt(const StateSpaceModel& model);

struct Deflections {
  Eigen::VectorXd z;  // nodes 0..N
  Eigen::VectorXd v;  // longitudinal
  Eigen::VectorXd w;  // transverse, trapezium of w_z from 0
  Eigen::VectorXd w_z;
};

/// FEM: v and w_z are nodal unknowns. MFEM: nodal values are running sums
/// of the integrated element strains; the trapezium on nodes is the
/// midpoint rule on element averages. Throws on an ordering that does not
/// belong to the scheme.
Deflections reconstruct_deflections(const StateSpaceModel& model, const Eigen::VectorXd& x);

/// Fills y, energy, v_tip and w_tip of `traj` from its states.
void fill_observables(Trajectory& traj, const StateSpaceModel& model);

struct Snapshot {
  std::string provenance;
  double t = 0.0;
  Eigen::VectorXd x;
  std::string note;  // nearest-step selection record
};

Snapshot snapshot(const Trajectory& traj, double t);
/// Throws ProvenanceError when the hashes differ.
Eigen::VectorXd restore(const Snapshot& snap, const StateSpaceModel& model);

/// u(t) = sin(omega t) sin^2(pi t / T) on [0, T], zero afterwards.
InputFn sin_burst(double omega, double length);

struct ProtocolConfig {
  double burst_frequency = 1.43;
  double burst_length = 20.0;
  double snapshot_time = 845.0;
  double gain = 3e-6;
  double duration = 1000.0;      // closed-loop run after the snapshot
  double sample_interval = 0.05;
  double window = 20.0;          // envelope comparison window
  long verify_steps = 10000;     // explicit closed-loop steps with per-step checks
  double dt = 0.0;               // 0 selects default_dt
};

struct ProtocolResult {
  double dt = 0.0;
  Trajectory burst;    // open loop, driven
  Snapshot snap;
  Trajectory verify;   // closed loop, stepped
  Trajectory closed;   // closed loop, sampled
  double v_envelope_ratio = 0.0;  // last window max / first window max
  double w_envelope_ratio = 0.0;
  bool energy_monotone = false;
};

/// Open-loop burst, free evolution to the snapshot time, restore into the
/// closed loop A - kappa B C, continue.
ProtocolResult run_restart_protocol(const StateSpaceModel& open_loop,
                                    const ProtocolConfig& config);

/// Max |s| over the last `window` divided by max |s| over the first.
double envelope_ratio(const std::vector<double>& t, const std::vector<double>& s,
                      double window);

}  // namespace piezo
