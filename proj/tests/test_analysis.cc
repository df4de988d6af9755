#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include <Eigen/Dense>

#include "piezo/analysis.h"
#include "piezo/fem.h"
#include "piezo/mfem.h"
#include "reference_table.h"

using namespace piezo;
using doctest::Approx;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

StateSpaceModel build(Scheme s, int n) {
  return s == Scheme::kFem ? assemble_fem(PhysicalSetup{}, n) : assemble_mfem(PhysicalSetup{}, n);
}

}  // namespace

TEST_CASE("first mode against the published values") {
  CHECK(rel(spectrum(build(Scheme::kFem, 12)).FirstModes(1)[0], 1.4350) <= 1e-3);
  CHECK(rel(spectrum(build(Scheme::kFem, 100)).FirstModes(1)[0], 1.4339) <= 5e-4);
  CHECK(rel(spectrum(build(Scheme::kMfem, 12)).FirstModes(1)[0], 1.4360) <= 1e-3);
}

TEST_CASE("selected rows of the convergence table") {
  const std::vector<SweepRow> rows =
      convergence_sweep({Scheme::kFem, Scheme::kMfem}, {12, 24, 40}, PhysicalSetup{});
  CHECK(rows.size() == 24);
  for (const SweepRow& r : rows) {
    int row = 0;
    while (reference::kReferenceOrders[row] != r.order) ++row;
    const double expected = r.scheme == Scheme::kFem ? reference::kFemModes[row][r.k - 1]
                                                     : reference::kMfemModes[row][r.k - 1];
    INFO(to_string(r.scheme) << " N=" << r.order << " k=" << r.k);
    CHECK(rel(r.im_lambda, expected) <= 5e-3);
  }
}

TEST_CASE("open-loop spectra are conjugate-symmetric and imaginary") {
  for (Scheme s : {Scheme::kFem, Scheme::kMfem}) {
    for (int n : {1, 2, 5, 12}) {
      const SpectrumReport r = spectrum(build(s, n));
      INFO(to_string(s) << " N=" << n);
      CHECK(r.eigenvalues.size() == static_cast<size_t>(6 * n));
      CHECK(r.MaxResidual() <= 1e-9);
      CHECK(r.ConjugateMismatch() <= 1e-9 * r.spectral_radius);
      CHECK(r.MaxAbsReal() <= 1e-8 * r.spectral_radius);
    }
  }
}

TEST_CASE("zero-mode count is stable across N") {
  for (Scheme s : {Scheme::kFem, Scheme::kMfem}) {
    std::vector<int> counts;
    for (int n : {4, 8, 12}) {
      const SpectrumReport r = spectrum(build(s, n));
      int zeros = 0;
      for (const Complex& l : r.eigenvalues) zeros += std::abs(l.imag()) < 1e-6;
      counts.push_back(zeros);
    }
    CHECK(counts[0] == counts[1]);
    CHECK(counts[1] == counts[2]);
  }
}

TEST_CASE("refinement pattern of the sweep") {
  const std::vector<int> orders = {12, 16, 20, 24, 28, 32, 36, 40};
  const std::vector<SweepRow> rows =
      convergence_sweep({Scheme::kFem, Scheme::kMfem}, orders, PhysicalSetup{});
  std::map<std::tuple<int, int, int>, double> v;  // scheme, k, N
  for (const SweepRow& r : rows) v[{static_cast<int>(r.scheme), r.k, r.order}] = r.im_lambda;
  for (int k = 1; k <= 4; ++k) {
    for (size_t i = 1; i < orders.size(); ++i) {
      CHECK(v[{0, k, orders[i]}] < v[{0, k, orders[i - 1]}]);
      CHECK(v[{1, k, orders[i]}] < v[{1, k, orders[i - 1]}]);
    }
    for (int n : orders) CHECK(v[{1, k, n}] >= v[{0, k, n}]);
  }
}

TEST_CASE("serial and parallel sweeps agree bitwise") {
  const std::vector<int> orders = {3, 12, 7, 20};
  const auto a = convergence_sweep({Scheme::kMfem, Scheme::kFem}, orders, PhysicalSetup{},
                                   FemVariant::kStandard, Execution::kSerial);
  const auto b = convergence_sweep({Scheme::kMfem, Scheme::kFem}, orders, PhysicalSetup{},
                                   FemVariant::kStandard, Execution::kParallel);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].scheme == b[i].scheme);
    CHECK(a[i].order == b[i].order);
    CHECK(a[i].k == b[i].k);
    CHECK(a[i].im_lambda == b[i].im_lambda);
  }
  // Rows are grouped by scheme then N, whatever the input order.
  CHECK(a.front().scheme == Scheme::kMfem);
  CHECK(a.front().order == 3);
}

TEST_CASE("fixed-free wave limits") {
  const CompositeParams c = PhysicalSetup{}.Composite();
  const double expected[4] = {1.43393, 4.30180, 7.16967, 10.03754};
  for (int k = 1; k <= 4; ++k) CHECK(wave_mode_limit(k, c) == Approx(expected[k - 1]).epsilon(5e-6));
}

TEST_CASE("Richardson extrapolation removes an N^-2 error") {
  auto f = [](int n) { return 3.0 + 5.0 / (n * n); };
  CHECK(richardson_limit(10, f(10), 40, f(40)) == Approx(3.0).epsilon(1e-14));
  CHECK(richardson_limit(7, f(7), 9, f(9)) == Approx(3.0).epsilon(1e-13));
}

TEST_CASE("closed loop") {
  const StateSpaceModel m = build(Scheme::kFem, 6);
  const StateSpaceModel same = closed_loop(m, 0.0);
  CHECK((same.A - m.A).norm() == 0.0);
  CHECK(same.gain == 0.0);
  CHECK_THROWS_AS(closed_loop(m, -1.0), ValidationError);

  for (double kappa : {1e-6, 1.0}) {
    const StateSpaceModel cl = closed_loop(m, kappa);
    CHECK(cl.gain == kappa);
    const Eigen::MatrixXd eb = m.E * m.B;
    const Eigen::MatrixXd lhs = m.E * cl.A + cl.A.transpose() * m.E;
    const Eigen::MatrixXd rhs = -2.0 * kappa * eb * eb.transpose();
    CHECK((lhs - rhs).norm() <= 1e-10 * m.E.norm() * cl.A.norm());
    const SpectrumReport r = spectrum(cl);
    CHECK(r.MaxReal() <= 1e-8 * r.spectral_radius);
  }
}

TEST_CASE("closed-loop spectrum is stable for both schemes at unit gain") {
  for (Scheme s : {Scheme::kFem, Scheme::kMfem}) {
    const SpectrumReport r = spectrum(closed_loop(build(s, 8), 1.0));
    int strictly_left = 0;
    for (const Complex& l : r.eigenvalues) strictly_left += l.real() < 0.0;
    CHECK(strictly_left == static_cast<int>(r.eigenvalues.size()));
    CHECK(r.MaxResidual() <= 1e-9);
  }
}

TEST_CASE("asymptote check on synthetic spectra") {
  SpectrumReport r;
  for (int k = 1; k <= 20; ++k) {
    const double re = -1.0 / k;
    r.eigenvalues.push_back({re, static_cast<double>(k)});
    r.eigenvalues.push_back({re, -static_cast<double>(k)});
  }
  AsymptoteCheck a = imaginary_axis_asymptote(r);
  CHECK(a.pass);
  CHECK(a.top_decile_max_real == Approx(-1.0 / 20));
  CHECK(a.bottom_decile_median_abs_real == Approx(0.75));

  SpectrumReport away;
  for (int k = 1; k <= 20; ++k) away.eigenvalues.push_back({-1.0 * k * k, static_cast<double>(k)});
  CHECK_FALSE(imaginary_axis_asymptote(away).pass);
}

TEST_CASE("first modes skip near-zero imaginary parts") {
  SpectrumReport r;
  r.eigenvalues = {{0.0, 0.0}, {0.0, 1e-9}, {0.0, 2.0}, {0.0, -2.0}, {0.0, 5.0}};
  const std::vector<double> modes = r.FirstModes(4);
  REQUIRE(modes.size() == 2);
  CHECK(modes[0] == 2.0);
  CHECK(modes[1] == 5.0);
}
