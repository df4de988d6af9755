#include "piezo/fem.h"

#include <string>

namespace piezo {

namespace {

void AssembleStandard(int n, ElementMatrices& em) {
  const double h = em.h;
  // Element e spans nodes e and e+1; node 0 is eliminated (index -1).
  for (int e = 0; e < n; ++e) {
    const int idx[2] = {e - 1, e};
    const double me[2][2] = {{h / 3.0, h / 6.0}, {h / 6.0, h / 3.0}};
    const double ke[2][2] = {{1.0 / h, -1.0 / h}, {-1.0 / h, 1.0 / h}};
    // int phi_b phi_a' over the element, row a.
    const double ge[2][2] = {{-0.5, -0.5}, {0.5, 0.5}};
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        if (idx[a] < 0 || idx[b] < 0) continue;
        em.m1(idx[a], idx[b]) += me[a][b];
        em.k2(idx[a], idx[b]) += ke[a][b];
        em.k1(idx[a], idx[b]) += ge[a][b];
      }
    }
  }
}

void AssemblePaper(int n, ElementMatrices& em) {
  for (int i = 0; i < n; ++i) {
    em.m1(i, i) = 4.0;
    em.k2(i, i) = 2.0;
    if (i + 1 < n) {
      em.m1(i, i + 1) = em.m1(i + 1, i) = 1.0;
      em.k2(i, i + 1) = em.k2(i + 1, i) = -1.0;
      em.k1(i, i + 1) = -0.5;
      em.k1(i + 1, i) = 0.5;
    }
  }
  // Printed boundary rows: ".. / 2,4,2 / 2,4".
  if (n >= 3) em.m1(n - 2, n - 3) = em.m1(n - 2, n - 1) = 2.0;
  if (n >= 2) em.m1(n - 1, n - 2) = 2.0;
  em.m1 *= em.h / 6.0;
  em.k2 /= em.h;
}

}  // namespace

ElementMatrices element_matrices(int n, const CompositeParams& params,
                                 FemVariant variant) {
  if (n < 1) throw ValidationError("invalid order N=" + std::to_string(n) + " (need N >= 1)");
  params.Validate();
  ElementMatrices em;
  em.variant = variant;
  em.h = params.length / n;
  em.m1 = Eigen::MatrixXd::Zero(n, n);
  em.k1 = Eigen::MatrixXd::Zero(n, n);
  em.k2 = Eigen::MatrixXd::Zero(n, n);
  const double scale = -params.impermittivity / (2.0 * params.half_width);
  em.load = Eigen::VectorXd::Constant(n, scale * em.h);
  em.load(n - 1) = scale * em.h / 2.0;

  if (variant == FemVariant::kStandard) {
    AssembleStandard(n, em);
    em.b1 = em.m1.partialPivLu().solve(em.load);
  } else {
    AssemblePaper(n, em);
    em.b1 = Eigen::VectorXd::Constant(n, scale);
  }
  return em;
}

StateSpaceModel assemble_fem(const PhysicalSetup& setup, int n, FemVariant variant,
                             OutputMap output) {
  const CompositeParams p = setup.Composite();
  const OperatorCoefficients a = operator_coefficients(p);
  const ElementMatrices em = element_matrices(n, p, variant);

  const Eigen::FullPivLU<Eigen::MatrixXd> lu(em.m1);
  if (!lu.isInvertible()) throw std::runtime_error("assembly error: M1 is singular");
  const Eigen::MatrixXd mk2 = lu.solve(em.k2);
  const Eigen::MatrixXd mk1 = lu.solve(em.k1);
  // Row 6 carries the L2 adjoint of d/dz, -K1^T; equal to K1 when K1 is skew.
  const Eigen::MatrixXd mk1t = lu.solve(Eigen::MatrixXd(-em.k1.transpose()));

  StateSpaceModel m;
  m.scheme = Scheme::kFem;
  m.variant = variant;
  m.ordering = StateOrdering::kFieldBlocks;
  m.order = n;
  m.setup = setup;
  m.A = Eigen::MatrixXd::Zero(6 * n, 6 * n);
  auto blk = [&](int i, int j) { return m.A.block(i * n, j * n, n, n); };
  for (int i = 0; i < 3; ++i) blk(i, i + 3).setIdentity();
  blk(3, 0) = -a.a41 * mk2;
  blk(3, 1) = a.a42 * mk2;
  blk(3, 5) = a.a46 * mk1;
  blk(4, 0) = a.a51 * mk2;
  blk(4, 1) = -a.a52 * mk2;
  blk(4, 5) = -a.a56 * mk1;
  blk(5, 2) = -a.a63 * mk2;
  blk(5, 3) = a.a64 * mk1t;
  blk(5, 4) = -a.a65 * mk1t;

  m.B = Eigen::VectorXd::Zero(6 * n);
  m.B.tail(n) = em.b1;
  m.E = energy_gram_fem(p, n, variant);
  set_output(m, output);
  m.Validate();
  return m;
}

Eigen::MatrixXd energy_gram_fem(const CompositeParams& p, int n, FemVariant variant) {
  const ElementMatrices em = element_matrices(n, p, variant);
  const Eigen::MatrixXd m1 = 0.5 * (em.m1 + em.m1.transpose());
  const Eigen::MatrixXd& k2 = em.k2;
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(6 * n, 6 * n);
  auto blk = [&](int i, int j) { return e.block(i * n, j * n, n, n); };
  blk(0, 0) = p.c_a * k2;
  blk(1, 1) = p.c_i * k2;
  blk(0, 1) = blk(1, 0) = -p.c_i0 * k2;
  blk(2, 2) = p.piezo_area / p.permeability * k2;
  blk(3, 3) = p.rho_a * m1;
  blk(4, 4) = p.rho_i * m1;
  blk(3, 4) = blk(4, 3) = -p.rho_i0 * m1;
  blk(5, 5) = p.piezo_area / p.impermittivity * m1;
  return e;
}

}  // namespace piezo
