#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "piezo/model.h"
#include "piezo/state_space.h"

namespace piezo {

using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Vector6 = Eigen::Matrix<double, 6, 1>;

/// Which coupling term enters the electromagnetic momentum p3.
///   kStrain:  p3 = (A_p/beta) Phi_t + gamma (A_p v_z - I_0 w_zz). This is
///             the form whose Legendre inverse yields the printed Q2 and
///             Q1(1,1); used by derive_Q.
///   kPrinted: p3 = (A_p/beta) Phi_t + gamma (A_p v_t - I_0 w_zt), as
///             printed. Its velocity-to-momentum map is not symmetric.
enum class LegendreForm { kStrain, kPrinted };

/// Momenta (p1, p2, p3) at a point with state (v_z, w_zz, Phi_z, v_t, w_zt,
/// Phi_t).
Eigen::Vector3d legendre_momenta(const CompositeParams& params, const PointState& s,
                                 LegendreForm form = LegendreForm::kStrain);

/// H = 1/2 x^T Q x over x = (v_z, w_zz, Phi_z, p1, p2, p3).
struct CoenergyMatrix {
  Matrix6 q;

  Eigen::Matrix3d Q1() const { return q.topLeftCorner<3, 3>(); }
  Eigen::Matrix3d Q2() const { return q.topRightCorner<3, 3>(); }
  Eigen::Matrix3d Q4() const { return q.bottomRightCorner<3, 3>(); }
};

/// Derived from legendre_momenta and continuous_energy_density; no entry is
/// transcribed.
CoenergyMatrix derive_Q(const CompositeParams& params);

struct QEntryCheck {
  std::string name;
  double derived = 0.0;
  double printed = 0.0;
  bool unambiguous = false;  // printed entry is self-consistent
  bool match = false;
};

/// Derived Q against every printed entry.
std::vector<QEntryCheck> q_printed_comparison(const CompositeParams& params);
std::string q_matrix_report(const CompositeParams& params);

/// Local port-Hamiltonian element on [a, b].
///   x' = J_ab Q_ab x + B_ab (e_b, f_a)
///   y  = (e_a, -f_b) = diag(2I, -2I) Q_ab x + D_ab (f_a, e_b)
struct ElementPort {
  Matrix6 j_ab;
  Matrix6 q_ab;
  Eigen::Matrix<double, 6, 6> b_ab;
  Eigen::Matrix<double, 6, 6> d_ab;
  Vector6 b_e;  // distributed current input per unit length
  double length = 0.0;
};

ElementPort element_port(const CompositeParams& params, double h);

/// Clamped-end flows and free-end efforts, three each.
struct BoundaryPortSpec {
  static constexpr int kClampedFlows = 3;
  static constexpr int kFreeEfforts = 3;
};

/// Per-element boundary port values for a given global state.
struct PortValues {
  Eigen::MatrixXd f_a, e_a, f_b, e_b;  // 3 x N each
};

/// Port interconnection of N elements. Inputs u_j = (f_a, e_b) are solved
/// from flow continuity f_a(j) = f_b(j-1), effort continuity e_b(j) =
/// e_a(j+1), and the boundary closure f_a(1) = 0, e_b(N) = 0.
class MfemInterconnection {
 public:
  MfemInterconnection(const CompositeParams& params, int n);

  int order() const { return n_; }
  const ElementPort& port() const { return port_; }
  /// Maps stacked efforts e = blockdiag(Q_ab) x to stacked inputs u.
  const Eigen::MatrixXd& input_map() const { return u_of_e_; }
  Eigen::MatrixXd GlobalA() const;
  PortValues Ports(const Eigen::VectorXd& x) const;

 private:
  int n_;
  ElementPort port_;
  Eigen::MatrixXd u_of_e_;
};

/// Global model over element-stacked integrated states. B stacks h B^e,
/// E = blockdiag(Q_ab), output defaults to C = B^T E.
StateSpaceModel assemble_mfem(const PhysicalSetup& setup, int n,
                              OutputMap output = OutputMap::kEnergyAdjoint);

}  // namespace piezo
