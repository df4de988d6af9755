#include "piezo/mfem.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace piezo {

Eigen::Vector3d legendre_momenta(const CompositeParams& p, const PointState& s,
                                 LegendreForm form) {
  const double vt = s[3], wzt = s[4], phit = s[5];
  const double strain_v = form == LegendreForm::kStrain ? s[0] : vt;
  const double strain_w = form == LegendreForm::kStrain ? s[1] : wzt;
  Eigen::Vector3d m;
  m[0] = p.rho_a * vt - p.rho_i0 * wzt;
  m[1] = p.rho_i * wzt - p.rho_i0 * vt;
  m[2] = p.piezo_area / p.impermittivity * phit +
         p.coupling * (p.piezo_area * strain_v - p.piezo_first_moment * strain_w);
  return m;
}

CoenergyMatrix derive_Q(const CompositeParams& params) {
  params.Validate();
  // p = G q + Mv qdot, probed column by column.
  Eigen::Matrix3d mv, g;
  for (int i = 0; i < 3; ++i) {
    g.col(i) = legendre_momenta(params, PointState::Unit(i));
    mv.col(i) = legendre_momenta(params, PointState::Unit(3 + i));
  }
  const Eigen::FullPivLU<Eigen::Matrix3d> lu(mv);
  if (!lu.isInvertible()) {
    throw ValidationError("velocity-to-momentum map is singular");
  }
  const Eigen::Matrix3d mv_inv = lu.inverse();

  // (q, qdot) = T (q, p).
  Matrix6 t = Matrix6::Zero();
  t.topLeftCorner<3, 3>().setIdentity();
  t.bottomLeftCorner<3, 3>() = -mv_inv * g;
  t.bottomRightCorner<3, 3>() = mv_inv;

  const Matrix6 w = energy_density_matrix(params);
  CoenergyMatrix out;
  out.q = t.transpose() * w * t;
  out.q = 0.5 * (out.q + out.q.transpose()).eval();
  return out;
}

namespace {

Matrix6 PrintedQ(const CompositeParams& p) {
  const double g2b = p.coupling * p.coupling * p.impermittivity;
  const double gb = p.coupling * p.impermittivity;
  const double ap = p.piezo_area;
  const double i0 = p.piezo_first_moment;
  const double det = p.MassDeterminant();
  Matrix6 q = Matrix6::Zero();
  q(0, 0) = p.c_a + g2b * ap;
  q(0, 1) = q(1, 0) = -(p.c_i + g2b * i0);
  q(1, 1) = p.c_i + g2b * i0 * i0 / ap;
  q(2, 2) = ap / p.permeability;
  q(0, 5) = q(5, 0) = -gb;
  q(1, 5) = q(5, 1) = gb * i0 / ap;
  q(3, 3) = p.rho_i / det;
  q(3, 4) = p.rho_i / det;
  q(4, 3) = p.rho_i / (p.rho_i0 * p.rho_i - p.rho_i0 * p.rho_i0);
  q(4, 4) = p.rho_a / det;
  q(5, 5) = p.impermittivity / ap;
  return q;
}

bool Suspect(int i, int j) {
  return (i == 0 && j == 1) || (i == 1 && j == 0) || (i == 3 && j == 4) ||
         (i == 4 && j == 3);
}

std::string EntryName(int i, int j) {
  const char* block = i < 3 ? (j < 3 ? "Q1" : "Q2") : (j < 3 ? "Q2^T" : "Q4");
  std::ostringstream os;
  os << block << "(" << (i % 3) + 1 << "," << (j % 3) + 1 << ")";
  return os.str();
}

}  // namespace

std::vector<QEntryCheck> q_printed_comparison(const CompositeParams& params) {
  const Matrix6 derived = derive_Q(params).q;
  const Matrix6 printed = PrintedQ(params);
  std::vector<QEntryCheck> out;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      QEntryCheck c;
      c.name = EntryName(i, j);
      c.derived = derived(i, j);
      c.printed = printed(i, j);
      c.unambiguous = !Suspect(i, j);
      const double scale = std::max(std::abs(c.derived), std::abs(c.printed));
      c.match = std::abs(c.derived - c.printed) <= 1e-12 * scale;
      out.push_back(c);
    }
  }
  return out;
}

std::string q_matrix_report(const CompositeParams& params) {
  std::ostringstream os;
  os.precision(17);
  const Matrix6 q = derive_Q(params).q;
  os << "# derived co-energy matrix Q (rows over v_z, w_zz, Phi_z, p1, p2, p3)\n";
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) os << (j ? " " : "") << q(i, j);
    os << "\n";
  }
  os << "# entry, derived, printed, status\n";
  int mismatches = 0;
  for (const auto& c : q_printed_comparison(params)) {
    if (c.derived == 0.0 && c.printed == 0.0) continue;
    const char* status = c.match ? "match" : (c.unambiguous ? "MISMATCH" : "mismatch-suspect-print");
    if (!c.match) ++mismatches;
    os << c.name << ", " << c.derived << ", " << c.printed << ", " << status << "\n";
  }
  os << "# mismatches: " << mismatches << "\n";
  return os.str();
}

ElementPort element_port(const CompositeParams& params, double h) {
  if (!(h > 0.0)) throw ValidationError("element length must be > 0");
  const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
  const Eigen::Matrix3d zero = Eigen::Matrix3d::Zero();
  ElementPort e;
  e.length = h;
  e.q_ab = derive_Q(params).q / h;
  e.j_ab << zero, 2.0 * id, -2.0 * id, zero;
  e.b_ab << zero, -2.0 * id, 2.0 * id, zero;
  e.d_ab << zero, -id, id, zero;
  e.b_e = Vector6::Zero();
  e.b_e[5] = -params.piezo_thickness;
  return e;
}

MfemInterconnection::MfemInterconnection(const CompositeParams& params, int n)
    : n_(n) {
  if (n < 1) throw ValidationError("invalid order N=" + std::to_string(n) + " (need N >= 1)");
  port_ = element_port(params, params.length / n);
  Matrix6 c_ab = Matrix6::Zero();
  c_ab.topLeftCorner<3, 3>() = 2.0 * Eigen::Matrix3d::Identity();
  c_ab.bottomRightCorner<3, 3>() = -2.0 * Eigen::Matrix3d::Identity();
  const auto& d = port_.d_ab;

  // Unknowns u_j = (f_a, e_b); y_j = (e_a, -f_b) = c_ab e_j + d u_j.
  const int m = 6 * n;
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < n; ++j) {
    const int r = 6 * j;
    lhs.block<3, 3>(r, r).setIdentity();
    if (j > 0) {
      // f_a(j) = f_b(j-1) = -y_{j-1}[3:6]
      lhs.block<3, 6>(r, r - 6) = d.bottomRows<3>();
      rhs.block<3, 6>(r, r - 6) = -c_ab.bottomRows<3>();
    }
    lhs.block<3, 3>(r + 3, r + 3).setIdentity();
    if (j < n - 1) {
      // e_b(j) = e_a(j+1) = y_{j+1}[0:3]
      lhs.block<3, 6>(r + 3, r + 6) = -d.topRows<3>();
      rhs.block<3, 6>(r + 3, r + 6) = c_ab.topRows<3>();
    }
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
  if (lu.rank() < m) {
    throw std::runtime_error("assembly error: interconnection closure has rank " +
                             std::to_string(lu.rank()) + " < " + std::to_string(m));
  }
  u_of_e_ = lu.solve(rhs);
}

Eigen::MatrixXd MfemInterconnection::GlobalA() const {
  const int m = 6 * n_;
  // B_ab acts on the swapped pair (e_b, f_a).
  Matrix6 swap = Matrix6::Zero();
  swap.topRightCorner<3, 3>().setIdentity();
  swap.bottomLeftCorner<3, 3>().setIdentity();
  const Matrix6 bs = port_.b_ab * swap;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < n_; ++j) {
    a.block<6, 6>(6 * j, 6 * j) = port_.j_ab;
    a.middleRows<6>(6 * j) += bs * u_of_e_.middleRows<6>(6 * j);
  }
  for (int j = 0; j < n_; ++j) {
    a.middleCols<6>(6 * j) = (a.middleCols<6>(6 * j) * port_.q_ab).eval();
  }
  return a;
}

PortValues MfemInterconnection::Ports(const Eigen::VectorXd& x) const {
  Eigen::VectorXd e(6 * n_);
  for (int j = 0; j < n_; ++j) e.segment<6>(6 * j) = port_.q_ab * x.segment<6>(6 * j);
  const Eigen::VectorXd u = u_of_e_ * e;
  PortValues pv;
  pv.f_a.resize(3, n_);
  pv.e_a.resize(3, n_);
  pv.f_b.resize(3, n_);
  pv.e_b.resize(3, n_);
  for (int j = 0; j < n_; ++j) {
    const Vector6 uj = u.segment<6>(6 * j);
    const Vector6 ej = e.segment<6>(6 * j);
    pv.f_a.col(j) = uj.head<3>();
    pv.e_b.col(j) = uj.tail<3>();
    pv.e_a.col(j) = 2.0 * ej.head<3>() - uj.tail<3>();
    pv.f_b.col(j) = 2.0 * ej.tail<3>() - uj.head<3>();
  }
  return pv;
}

StateSpaceModel assemble_mfem(const PhysicalSetup& setup, int n, OutputMap output) {
  const CompositeParams p = setup.Composite();
  const MfemInterconnection net(p, n);
  StateSpaceModel m;
  m.scheme = Scheme::kMfem;
  m.variant = FemVariant::kStandard;
  m.ordering = StateOrdering::kElementStacked;
  m.order = n;
  m.setup = setup;
  m.A = net.GlobalA();
  m.B = Eigen::VectorXd::Zero(6 * n);
  m.E = Eigen::MatrixXd::Zero(6 * n, 6 * n);
  const ElementPort& port = net.port();
  for (int j = 0; j < n; ++j) {
    m.B.segment<6>(6 * j) = port.length * port.b_e;
    m.E.block<6, 6>(6 * j, 6 * j) = port.q_ab;
  }
  set_output(m, output);
  m.Validate();
  return m;
}

}  // namespace piezo
