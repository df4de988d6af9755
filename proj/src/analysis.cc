#include "piezo/analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "piezo/fem.h"
#include "piezo/linalg.h"
#include "piezo/mfem.h"

namespace piezo {

namespace {

constexpr double kZeroModeCutoff = 1e-6;
constexpr int kMaxKrylovOrder = 600;

bool ByImagThenReal(const Complex& a, const Complex& b) {
  const double ia = std::abs(a.imag()), ib = std::abs(b.imag());
  if (ia != ib) return ia < ib;
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

StateSpaceModel Assemble(const SweepItem& item, const PhysicalSetup& setup,
                         FemVariant variant) {
  return item.scheme == Scheme::kFem ? assemble_fem(setup, item.order, variant)
                                     : assemble_mfem(setup, item.order);
}

}  // namespace

double SpectrumReport::MaxAbsReal() const {
  double m = 0.0;
  for (const auto& l : eigenvalues) m = std::max(m, std::abs(l.real()));
  return m;
}

double SpectrumReport::MaxReal() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& l : eigenvalues) m = std::max(m, l.real());
  return m;
}

double SpectrumReport::MaxResidual() const {
  double m = 0.0;
  for (double r : residuals) m = std::max(m, r);
  return m;
}

double SpectrumReport::ConjugateMismatch() const {
  double worst = 0.0;
  for (const auto& l : eigenvalues) {
    if (l.imag() == 0.0) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& m : eigenvalues) best = std::min(best, std::abs(m - std::conj(l)));
    worst = std::max(worst, best);
  }
  return worst;
}

std::vector<double> SpectrumReport::FirstModes(int k) const {
  std::vector<double> im;
  for (const auto& l : eigenvalues) {
    if (l.imag() > kZeroModeCutoff) im.push_back(l.imag());
  }
  std::sort(im.begin(), im.end());
  if (static_cast<int>(im.size()) > k) im.resize(k);
  return im;
}

SpectrumReport spectrum(const StateSpaceModel& model) {
  model.Validate();
  const Eigen::Index n = model.n();
  Eigen::MatrixXd work;
  Eigen::MatrixXcd back;  // maps transformed eigenvectors to original ones
  bool energy = true;
  EnergyCoordinates ec;
  try {
    ec = to_energy_coordinates(model.A, model.B, model.E);
    work = ec.a_tilde;
  } catch (const std::domain_error&) {
    energy = false;
  }
  Eigen::VectorXd d;
  if (!energy) {
    work = model.A;
    d = balance(work);
  }

  Eigen::EigenSolver<Eigen::MatrixXd> es;
  es.setMaxIterations(40 * static_cast<int>(std::max<Eigen::Index>(n, 1)));
  es.compute(work, true);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigensolver did not converge: n=" + std::to_string(n) +
                             ", max iterations per eigenvalue=" +
                             std::to_string(es.getMaxIterations() / std::max<Eigen::Index>(n, 1)) +
                             ", ||A||_F=" + std::to_string(work.norm()));
  }
  Eigen::MatrixXcd vecs = es.eigenvectors();
  if (energy) {
    const Eigen::MatrixXd lt = ec.l.transpose();
    vecs = lt.cast<Complex>().triangularView<Eigen::Upper>().solve(vecs);
  } else {
    vecs = d.cast<Complex>().asDiagonal() * vecs;
  }
  const Eigen::VectorXcd vals = es.eigenvalues();
  const Eigen::MatrixXcd ac = model.A.cast<Complex>();
  const double anorm = model.A.norm();

  std::vector<Eigen::Index> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return ByImagThenReal(vals(a), vals(b));
  });

  SpectrumReport r;
  r.scheme = model.scheme;
  r.order = model.order;
  r.variant = model.variant;
  r.gain = model.gain;
  for (Eigen::Index i : order) {
    const Complex lambda = vals(i);
    const Eigen::VectorXcd v = vecs.col(i);
    const double res = (ac * v - lambda * v).norm();
    const double scale = anorm * v.norm();
    r.eigenvalues.push_back(lambda);
    r.residuals.push_back(scale > 0.0 ? res / scale : res);
    r.spectral_radius = std::max(r.spectral_radius, std::abs(lambda));
  }
  return r;
}

std::vector<SweepRow> sweep_item(const SweepItem& item, const PhysicalSetup& setup,
                                 FemVariant variant) {
  const SpectrumReport rep = spectrum(Assemble(item, setup, variant));
  const std::vector<double> modes = rep.FirstModes(4);
  std::vector<SweepRow> rows;
  for (size_t k = 0; k < modes.size(); ++k) {
    rows.push_back({item.scheme, item.order,
                    item.scheme == Scheme::kFem ? variant : FemVariant::kStandard,
                    static_cast<int>(k) + 1, modes[k]});
  }
  return rows;
}

std::vector<SweepRow> convergence_sweep(const std::vector<Scheme>& schemes,
                                        const std::vector<int>& orders,
                                        const PhysicalSetup& setup, FemVariant variant,
                                        Execution exec) {
  if (orders.empty()) throw ValidationError("sweep needs at least one N");
  std::vector<SweepItem> items;
  for (Scheme s : schemes) {
    for (int n : orders) items.push_back({s, n});
  }
  // Largest N first so dynamic scheduling balances the O(n^3) solves.
  std::vector<size_t> by_cost(items.size());
  for (size_t i = 0; i < items.size(); ++i) by_cost[i] = i;
  std::stable_sort(by_cost.begin(), by_cost.end(), [&](size_t a, size_t b) {
    return items[a].order > items[b].order;
  });
  std::vector<std::vector<SweepRow>> slots(items.size());
  for_each_index(static_cast<std::ptrdiff_t>(items.size()), exec, [&](std::ptrdiff_t i) {
    const size_t idx = by_cost[static_cast<size_t>(i)];
    slots[idx] = sweep_item(items[idx], setup, variant);
  });
  std::vector<SweepRow> rows;
  for (const auto& s : slots) rows.insert(rows.end(), s.begin(), s.end());
  return rows;
}

double wave_mode_limit(int k, const CompositeParams& params) {
  return (2.0 * k - 1.0) * std::numbers::pi / 2.0 *
         std::sqrt(params.impermittivity / params.permeability) / params.length;
}

double richardson_limit(int n1, double f1, int n2, double f2, double p) {
  const double w1 = std::pow(static_cast<double>(n1), p);
  const double w2 = std::pow(static_cast<double>(n2), p);
  return (w2 * f2 - w1 * f1) / (w2 - w1);
}

KalmanResult kalman_rank(const StateSpaceModel& model, double tol) {
  model.Validate();
  const int n = model.n();
  if (n > kMaxKrylovOrder) {
    throw ValidationError("controllability check limited to n <= " +
                          std::to_string(kMaxKrylovOrder) + " (got " + std::to_string(n) + ")");
  }
  const EnergyCoordinates ec = to_energy_coordinates(model.A, model.B, model.E);
  const double anorm = spectral_norm(ec.a_tilde);

  KalmanResult r;
  r.n = n;
  r.tol = tol;
  r.threshold = tol * n * anorm;
  const double bnorm = ec.b_tilde.norm();
  if (bnorm == 0.0) {
    r.rank = 0;
    return r;
  }
  Eigen::MatrixXd v(n, n);
  v.col(0) = ec.b_tilde / bnorm;
  r.rank = n;
  double discarded = 0.0;
  for (int k = 1; k < n; ++k) {
    Eigen::VectorXd w = ec.a_tilde * v.col(k - 1);
    for (int pass = 0; pass < 2; ++pass) {
      w -= v.leftCols(k) * (v.leftCols(k).transpose() * w);
    }
    const double h = w.norm();
    if (h <= r.threshold) {
      r.rank = k;
      discarded = h;
      break;
    }
    r.subdiagonals.push_back(anorm > 0.0 ? h / anorm : h);
    v.col(k) = w / h;
  }
  double retained = anorm;
  for (double s : r.subdiagonals) retained = std::min(retained, s * anorm);
  const double next = r.rank < n ? std::max(discarded, std::numeric_limits<double>::min())
                                 : r.threshold;
  r.sv_gap = next > 0.0 ? retained / next : std::numeric_limits<double>::infinity();
  return r;
}

Staircase staircase_decomposition(const StateSpaceModel& model, double tol) {
  model.Validate();
  const int n = model.n();
  const EnergyCoordinates ec = to_energy_coordinates(model.A, model.B, model.E);
  const double anorm = spectral_norm(ec.a_tilde);
  const double threshold = tol * n * anorm;

  // Householder reflector taking b to a multiple of e1.
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  const double bnorm = ec.b_tilde.norm();
  if (bnorm > 0.0) {
    Eigen::VectorXd u = ec.b_tilde;
    u(0) += (u(0) >= 0.0 ? bnorm : -bnorm);
    h -= 2.0 * u * u.transpose() / u.squaredNorm();
  }
  const Eigen::MatrixXd ha = h * ec.a_tilde * h;
  // The Hessenberg similarity leaves e1 fixed, so b stays on e1.
  const Eigen::HessenbergDecomposition<Eigen::MatrixXd> hd(ha);
  const Eigen::MatrixXd qh = hd.matrixQ();

  Staircase s;
  s.t = h * qh;
  s.a_bar = s.t.transpose() * ec.a_tilde * s.t;
  s.b_bar = s.t.transpose() * ec.b_tilde;
  int c = bnorm > 0.0 ? n : 0;
  for (int k = 1; k < n && bnorm > 0.0; ++k) {
    if (std::abs(s.a_bar(k, k - 1)) <= threshold) {
      c = k;
      break;
    }
  }
  s.controllable = c;
  if (c < n) {
    s.lower_left_norm = s.a_bar.bottomLeftCorner(n - c, c).norm();
    s.a_bar.bottomLeftCorner(n - c, c).setZero();
    s.b_bar.tail(n - c).setZero();
    const Eigen::MatrixXd au = s.a_bar.bottomRightCorner(n - c, n - c);
    const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(au, false).eigenvalues();
    s.uncontrollable_eigenvalues.assign(ev.data(), ev.data() + ev.size());
    std::sort(s.uncontrollable_eigenvalues.begin(), s.uncontrollable_eigenvalues.end(),
              ByImagThenReal);
  }
  if (c > 0) s.block_sizes.push_back(c);
  if (c < n) s.block_sizes.push_back(n - c);
  return s;
}

BrockettResult brockett_check(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                              double tol) {
  const Eigen::Index n = A.rows();
  Eigen::MatrixXd ab(n, n + 1);
  ab << A, B;
  BrockettResult r;
  if (n == 0) return r;
  const Eigen::VectorXd sv = Eigen::BDCSVD<Eigen::MatrixXd>(ab).singularValues();
  const double threshold = tol * static_cast<double>(n + 1) * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > threshold) ++rank;
  }
  r.rank = rank;
  r.pass = rank == n;
  if (rank == 0) {
    r.sv_gap = 0.0;
  } else if (rank < sv.size()) {
    r.sv_gap = sv(rank - 1) / std::max(sv(rank), std::numeric_limits<double>::min());
  } else {
    r.sv_gap = sv(rank - 1) / threshold;
  }
  return r;
}

BrockettResult brockett_check(const StateSpaceModel& model, double tol) {
  model.Validate();
  const EnergyCoordinates ec = to_energy_coordinates(model.A, model.B, model.E);
  return brockett_check(ec.a_tilde, ec.b_tilde, tol);
}

ControlReport control_report(const StateSpaceModel& model, double tol) {
  const KalmanResult k = kalman_rank(model, tol);
  const Staircase s = staircase_decomposition(model, tol);
  const BrockettResult b = brockett_check(model, tol);
  ControlReport r;
  r.scheme = model.scheme;
  r.order = model.order;
  r.n = model.n();
  r.kalman_rank = k.rank;
  r.brockett_rank = b.rank;
  r.tol = tol;
  r.sv_gap = k.sv_gap;
  r.block_sizes = s.block_sizes;
  r.uncontrollable_eigenvalues = s.uncontrollable_eigenvalues;
  return r;
}

StateSpaceModel closed_loop(const StateSpaceModel& model, double gain) {
  if (!(gain >= 0.0)) throw ValidationError("feedback gain must be >= 0");
  StateSpaceModel cl = model;
  if (gain > 0.0) cl.A -= gain * model.B * model.C;
  cl.gain = model.gain + gain;
  return cl;
}

AsymptoteCheck imaginary_axis_asymptote(const SpectrumReport& report) {
  std::vector<Complex> upper;
  for (const auto& l : report.eigenvalues) {
    if (l.imag() > kZeroModeCutoff) upper.push_back(l);
  }
  AsymptoteCheck a;
  if (upper.empty()) return a;
  std::sort(upper.begin(), upper.end(), ByImagThenReal);
  const size_t decile = std::max<size_t>(1, (upper.size() + 9) / 10);
  a.top_decile_max_real = -std::numeric_limits<double>::infinity();
  for (size_t i = upper.size() - decile; i < upper.size(); ++i) {
    a.top_decile_max_real = std::max(a.top_decile_max_real, upper[i].real());
  }
  std::vector<double> bottom;
  for (size_t i = 0; i < decile; ++i) bottom.push_back(std::abs(upper[i].real()));
  std::sort(bottom.begin(), bottom.end());
  const size_t m = bottom.size();
  a.bottom_decile_median_abs_real =
      m % 2 ? bottom[m / 2] : 0.5 * (bottom[m / 2 - 1] + bottom[m / 2]);
  a.pass = a.top_decile_max_real > -10.0 * a.bottom_decile_median_abs_real;
  return a;
}

}  // namespace piezo
