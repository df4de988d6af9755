#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "piezo/model.h"

using namespace piezo;
using doctest::Approx;

namespace {

// Midpoint-rule integrals of 1, z3 and z3^2 over the rectangle
// [-g_b, g_b] x [h_a, h_b]; exact for the first two, O(h^2) for the third.
SectionProps grid_quadrature(const LayerGeometry& g, int cells) {
  SectionProps s;
  const double dy = 2.0 * g.half_width / cells;
  const double dz = (g.upper_face - g.lower_face) / cells;
  for (int i = 0; i < cells; ++i) {
    for (int k = 0; k < cells; ++k) {
      const double z = g.lower_face + (k + 0.5) * dz;
      s.area += dy * dz;
      s.first_moment += z * dy * dz;
      s.second_moment += z * z * dy * dz;
    }
  }
  return s;
}

}  // namespace

TEST_CASE("section properties of the reference layers") {
  const SectionProps p = section_props({1.0, 0.1, 0.0, 0.01});
  CHECK(p.area == Approx(2.0e-3).epsilon(1e-14));
  CHECK(p.second_moment == Approx(6.6667e-8).epsilon(1e-4));
  CHECK(p.first_moment == Approx(1.0e-5).epsilon(1e-14));

  const SectionProps s = section_props({1.0, 0.1, -0.01, 0.0});
  CHECK(s.area == Approx(2.0e-3).epsilon(1e-14));
  CHECK(s.second_moment == Approx(6.6667e-8).epsilon(1e-4));

  CHECK(section_props({1.0, 0.1, -0.01, 0.01}).first_moment == 0.0);
}

TEST_CASE("section properties agree with brute-force quadrature") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> width(0.01, 1.0), face(-0.2, 0.2), thick(1e-3, 0.1);
  for (int trial = 0; trial < 20; ++trial) {
    const double ha = face(rng);
    const LayerGeometry g{1.0, width(rng), ha, ha + thick(rng)};
    const SectionProps exact = section_props(g);
    const SectionProps quad = grid_quadrature(g, 400);
    CHECK(exact.area == Approx(quad.area).epsilon(1e-12));
    CHECK(exact.first_moment == Approx(quad.first_moment).epsilon(1e-9).scale(g.half_width * 0.04));
    // Midpoint error on z^2 is g_b (h_b - h_a)^3 / (6 cells^2) at most.
    const double bound = g.half_width * std::pow(g.upper_face - g.lower_face, 3) / (6.0 * 400 * 400);
    CHECK(std::abs(exact.second_moment - quad.second_moment) <= bound + 1e-15);
  }
}

TEST_CASE("symmetric layer has zero first moment for any width") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(1e-3, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double hb = u(rng);
    CHECK(section_props({1.0, u(rng), -hb, hb}).first_moment == 0.0);
  }
}

TEST_CASE("composite coefficients for the reference setup") {
  const CompositeParams c = PhysicalSetup{}.Composite();
  // rho_A = 7600 * 2e-3 + 5000 * 2e-3; C_A = 140e5 * 2e-3 + 1e5 * 2e-3.
  CHECK(c.rho_a == Approx(25.2).epsilon(1e-13));
  CHECK(c.rho_i == Approx(8.4e-4).epsilon(1e-12));
  CHECK(c.rho_i0 == Approx(0.076).epsilon(1e-13));
  CHECK(c.c_a == Approx(2.82e4).epsilon(1e-13));
  CHECK(c.c_i == Approx(0.94).epsilon(1e-12));
  CHECK(c.c_i0 == Approx(140.0).epsilon(1e-13));
  CHECK(c.MassDeterminant() == Approx(1.5392e-2).epsilon(1e-11));
  CHECK(c.MassDeterminant() > 0.0);
  CHECK(c.StiffnessDeterminant() > 0.0);
  CHECK(c.piezo_area == Approx(2e-3));
  CHECK(c.piezo_thickness == Approx(0.01));
}

TEST_CASE("coupling is only stored") {
  PhysicalSetup s;
  const CompositeParams a = s.Composite();
  s.material.coupling = 0.0;
  const CompositeParams b = s.Composite();
  CHECK(a.rho_a == b.rho_a);
  CHECK(a.rho_i == b.rho_i);
  CHECK(a.rho_i0 == b.rho_i0);
  CHECK(a.c_a == b.c_a);
  CHECK(a.c_i == b.c_i);
  CHECK(a.c_i0 == b.c_i0);
  CHECK(b.coupling == 0.0);
}

TEST_CASE("operator coefficients") {
  PhysicalSetup s;
  const OperatorCoefficients a = operator_coefficients(s.Composite());
  CHECK(a.a63 == Approx(0.83333).epsilon(1e-5));
  CHECK(a.a64 == Approx(1e-3 * 1e6));
  CHECK(a.a65 == Approx(1e-3 * 1e6 * 1e-5 / 2e-3));

  // The coupled mass inverse must satisfy M [a41 a51; a42 a52] patterns:
  // independent check through the 2x2 inverse of [[rho_A, -rho_I0], [-rho_I0, rho_I]].
  const CompositeParams c = s.Composite();
  Eigen::Matrix2d m;
  m << c.rho_a, -c.rho_i0, -c.rho_i0, c.rho_i;
  Eigen::Matrix2d k;
  k << c.c_a, -c.c_i0, -c.c_i0, c.c_i;
  const Eigen::Matrix2d minv_k = m.inverse() * k;
  CHECK(a.a41 == Approx(minv_k(0, 0)).epsilon(1e-12));
  CHECK(-a.a42 == Approx(minv_k(0, 1)).epsilon(1e-12));
  CHECK(-a.a51 == Approx(minv_k(1, 0)).epsilon(1e-12));
  CHECK(a.a52 == Approx(minv_k(1, 1)).epsilon(1e-12));

  s.material.coupling = 0.0;
  const OperatorCoefficients z = operator_coefficients(s.Composite());
  CHECK(z.a46 == 0.0);
  CHECK(z.a56 == 0.0);
  CHECK(z.a64 == 0.0);
  CHECK(z.a65 == 0.0);
}

TEST_CASE("centroidal piezo removes first-moment couplings") {
  PhysicalSetup s;
  s.piezo = {1.0, 0.1, -0.005, 0.005};
  s.substrate = {1.0, 0.1, -0.005, 0.005};
  const OperatorCoefficients a = operator_coefficients(s.Composite());
  CHECK(a.a65 == 0.0);
  CHECK(a.a42 == 0.0);
}

TEST_CASE("energy density examples") {
  const CompositeParams c = PhysicalSetup{}.Composite();
  PointState s = PointState::Zero();
  CHECK(continuous_energy_density(s, c) == 0.0);
  s(2) = 1.0;
  CHECK(continuous_energy_density(s, c) == Approx(0.5 * c.piezo_area / c.permeability));
  s.setZero();
  s(3) = 1.0;
  s(4) = 1.0;
  CHECK(continuous_energy_density(s, c) == Approx(0.5 * (c.rho_a + c.rho_i - 2.0 * c.rho_i0)));
}

TEST_CASE("energy density is a non-negative quadratic form") {
  const CompositeParams c = PhysicalSetup{}.Composite();
  const Eigen::Matrix<double, 6, 6> w = energy_density_matrix(c);
  CHECK((w - w.transpose()).norm() == 0.0);
  CHECK(w.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff() > 0.0);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 200; ++trial) {
    PointState s;
    for (int i = 0; i < 6; ++i) s(i) = normal(rng);
    const double e = continuous_energy_density(s, c);
    CHECK(e >= 0.0);
    CHECK(e == Approx(0.5 * s.dot(w * s)).epsilon(1e-12));
  }
}

TEST_CASE("validation rejects invalid inputs") {
  CHECK_THROWS_AS(section_props({1.0, 0.1, 0.01, 0.01}), ValidationError);
  CHECK_THROWS_AS(section_props({0.0, 0.1, 0.0, 0.01}), ValidationError);
  CHECK_THROWS_AS(section_props({1.0, -0.1, 0.0, 0.01}), ValidationError);

  PhysicalSetup s;
  s.material.coupling = -1.0;
  CHECK_THROWS_AS(s.Composite(), ValidationError);
  s = PhysicalSetup{};
  s.material.permeability = 0.0;
  CHECK_THROWS_AS(s.Composite(), ValidationError);
  s = PhysicalSetup{};
  s.substrate.length = 2.0;
  CHECK_THROWS_AS(s.Composite(), ValidationError);
  s = PhysicalSetup{};
  s.material.coupling = 0.0;
  CHECK_NOTHROW(s.Composite());
}

TEST_CASE("parameter hash is stable and sensitive") {
  PhysicalSetup a, b;
  CHECK(param_hash(a) == param_hash(b));
  CHECK(param_hash(a).size() == 16);
  b.material.coupling = std::nextafter(b.material.coupling, 1.0);
  CHECK(param_hash(a) != param_hash(b));
}
