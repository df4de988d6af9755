#include "piezo/simulation.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "piezo/analysis.h"
#include "piezo/linalg.h"

namespace piezo {

namespace {

bool DissipationIdentityHolds(const StateSpaceModel& m) {
  return m.output == OutputMap::kEnergyAdjoint &&
         !(m.scheme == Scheme::kFem && m.variant == FemVariant::kPaper);
}

}  // namespace

MidpointStepper::MidpointStepper(const StateSpaceModel& model, double dt) : dt_(dt) {
  if (!(dt > 0.0)) throw ValidationError("time step must be > 0");
  model.Validate();
  const Eigen::Index n = model.n();
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  try {
    const EnergyCoordinates ec = to_energy_coordinates(model.A, model.B, model.E);
    energy_ = true;
    l_ = ec.l;
    a = ec.a_tilde;
    b = ec.b_tilde;
    // y = C x = C L^{-T} z.
    c_ = ec.l.triangularView<Eigen::Lower>().solve(model.C.transpose()).transpose();
  } catch (const std::domain_error&) {
    energy_ = false;
    w_ = model.E;
    a = model.A;
    b = model.B;
    c_ = model.C;
  }
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(id - 0.5 * dt * a);
  rcond_ = lu.rcond();
  if (!(rcond_ > 1e-14)) {
    std::ostringstream os;
    os << "midpoint system (I - dt/2 A) is singular to working precision: rcond ~ "
       << rcond_ << ", dt = " << dt;
    throw StepError(os.str());
  }
  p_ = lu.solve(id + 0.5 * dt * a);
  g_ = lu.solve(dt * b);
}

Eigen::VectorXd MidpointStepper::ToWork(const Eigen::VectorXd& x) const {
  return energy_ ? Eigen::VectorXd(l_.transpose() * x) : x;
}

Eigen::VectorXd MidpointStepper::FromWork(const Eigen::VectorXd& z) const {
  if (!energy_) return z;
  return l_.transpose().triangularView<Eigen::Upper>().solve(z);
}

double MidpointStepper::WorkEnergy(const Eigen::VectorXd& z) const {
  return energy_ ? 0.5 * z.squaredNorm() : 0.5 * z.dot(w_ * z);
}

Eigen::MatrixXd MidpointStepper::Power(long steps) const {
  if (steps < 0) throw ValidationError("negative step count");
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(p_.rows(), p_.cols());
  Eigen::MatrixXd base = p_;
  bool first = true;
  while (steps > 0) {
    if (steps & 1L) {
      result = first ? base : Eigen::MatrixXd(result * base);
      first = false;
    }
    steps >>= 1;
    if (steps > 0) base = base * base;
  }
  return result;
}

Trajectory integrate(const StateSpaceModel& model, const InputFn& u,
                     const Eigen::VectorXd& x0, double t0, double dt, long steps,
                     const IntegrateOptions& options) {
  if (steps < 0) throw ValidationError("negative step count");
  if (x0.size() != model.n()) throw ValidationError("initial state has wrong length");
  if (options.record_stride < 1) throw ValidationError("record stride must be >= 1");
  if (options.accelerate_free && u) {
    throw ValidationError("accelerated stepping requires zero input");
  }
  const MidpointStepper stepper(model, dt);
  const long stride = options.record_stride;

  Trajectory tr;
  tr.scheme = model.scheme;
  tr.order = model.order;
  tr.gain = model.gain;
  tr.provenance = model.Provenance();
  tr.dt = dt;
  const long records = 1 + steps / stride + (steps % stride ? 1 : 0);
  tr.states.resize(model.n(), records);
  tr.t.reserve(records);

  StepDiagnostics& dg = tr.diagnostics;
  dg.dissipation_checked = DissipationIdentityHolds(model) && !options.accelerate_free;
  Eigen::VectorXd z = stepper.ToWork(x0);
  const double h0 = stepper.WorkEnergy(z);
  double hk = h0;
  long col = 0;
  auto record = [&](long k) {
    tr.t.push_back(t0 + static_cast<double>(k) * dt);
    tr.states.col(col++) = stepper.FromWork(z);
  };
  auto track = [&](const Eigen::VectorXd& next, double um) {
    const double hn = stepper.WorkEnergy(next);
    if (h0 > 0.0) {
      dg.max_relative_drift = std::max(dg.max_relative_drift, std::abs(hn - h0) / h0);
      dg.max_energy_increase = std::max(dg.max_energy_increase, (hn - hk) / h0);
    }
    if (dg.dissipation_checked) {
      const double ym = stepper.WorkOutput(0.5 * (z + next));
      const double predicted = dt * ym * (um - model.gain * ym);
      const double denom = std::max(hk, hn);
      if (denom > 0.0) {
        dg.max_dissipation_residual = std::max(
            dg.max_dissipation_residual, std::abs((hn - hk) - predicted) / denom);
      }
    }
    hk = hn;
  };

  record(0);
  if (options.accelerate_free) {
    const Eigen::MatrixXd jump = stepper.Power(stride);
    long k = 0;
    while (k + stride <= steps) {
      const Eigen::VectorXd next = jump * z;
      track(next, 0.0);
      z = next;
      k += stride;
      record(k);
    }
    if (k < steps) {
      const Eigen::VectorXd next = stepper.Power(steps - k) * z;
      track(next, 0.0);
      z = next;
      record(steps);
    }
    dg.steps = steps;
  } else {
    for (long k = 0; k < steps; ++k) {
      const double um = u ? u(t0 + (static_cast<double>(k) + 0.5) * dt) : 0.0;
      const Eigen::VectorXd next = stepper.Step(z, um);
      track(next, um);
      z = next;
      if ((k + 1) % stride == 0 || k + 1 == steps) record(k + 1);
    }
    dg.steps = steps;
  }
  tr.states.conservativeResize(Eigen::NoChange, col);
  fill_observables(tr, model);
  return tr;
}

Eigen::VectorXd advance_free(const StateSpaceModel& model, const Eigen::VectorXd& x,
                             double dt, long steps) {
  const MidpointStepper stepper(model, dt);
  return stepper.FromWork(stepper.Power(steps) * stepper.ToWork(x));
}

double default_dt(const StateSpaceModel& model) {
  double top = 0.0;
  for (const auto& l : spectrum(model).eigenvalues) top = std::max(top, std::abs(l.imag()));
  if (top == 0.0) return 1e-2;
  return std::min(1e-2, 0.05 * 2.0 * std::numbers::pi / top);
}

Deflections reconstruct_deflections(const StateSpaceModel& model, const Eigen::VectorXd& x) {
  const int n = model.order;
  if (x.size() != 6 * n) throw ValidationError("state has wrong length for reconstruction");
  const StateOrdering expected = model.scheme == Scheme::kFem ? StateOrdering::kFieldBlocks
                                                              : StateOrdering::kElementStacked;
  if (model.ordering != expected) {
    throw ValidationError("state ordering " + to_string(model.ordering) +
                          " does not belong to scheme " + to_string(model.scheme));
  }
  const double h = model.setup.piezo.length / n;
  Deflections d;
  d.z = Eigen::VectorXd::LinSpaced(n + 1, 0.0, model.setup.piezo.length);
  d.v = Eigen::VectorXd::Zero(n + 1);
  d.w_z = Eigen::VectorXd::Zero(n + 1);
  d.w = Eigen::VectorXd::Zero(n + 1);
  for (int k = 1; k <= n; ++k) {
    if (model.scheme == Scheme::kFem) {
      d.v(k) = x(k - 1);
      d.w_z(k) = x(n + k - 1);
    } else {
      d.v(k) = d.v(k - 1) + x(6 * (k - 1));
      d.w_z(k) = d.w_z(k - 1) + x(6 * (k - 1) + 1);
    }
    d.w(k) = d.w(k - 1) + 0.5 * h * (d.w_z(k - 1) + d.w_z(k));
  }
  return d;
}

void fill_observables(Trajectory& traj, const StateSpaceModel& model) {
  const Eigen::Index m = traj.states.cols();
  traj.y.resize(m);
  traj.energy.resize(m);
  traj.v_tip.resize(m);
  traj.w_tip.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::VectorXd x = traj.states.col(i);
    traj.y[i] = model.Output(x);
    traj.energy[i] = model.Energy(x);
    const Deflections d = reconstruct_deflections(model, x);
    traj.v_tip[i] = d.v(d.v.size() - 1);
    traj.w_tip[i] = d.w(d.w.size() - 1);
  }
}

Snapshot snapshot(const Trajectory& traj, double t) {
  if (traj.t.empty()) throw ValidationError("cannot snapshot an empty trajectory");
  size_t best = 0;
  for (size_t i = 1; i < traj.t.size(); ++i) {
    if (std::abs(traj.t[i] - t) < std::abs(traj.t[best] - t)) best = i;
  }
  Snapshot s;
  s.provenance = traj.provenance;
  s.t = traj.t[best];
  s.x = traj.states.col(static_cast<Eigen::Index>(best));
  std::ostringstream os;
  os.precision(17);
  os << "requested t=" << t << ", selected t=" << s.t << " (sample " << best << ")";
  s.note = os.str();
  return s;
}

Eigen::VectorXd restore(const Snapshot& snap, const StateSpaceModel& model) {
  if (snap.provenance != model.Provenance()) {
    throw ProvenanceError("snapshot provenance '" + snap.provenance +
                          "' does not match model '" + model.Provenance() + "'");
  }
  if (snap.x.size() != model.n()) {
    throw ProvenanceError("snapshot length does not match the model dimension");
  }
  return snap.x;
}

InputFn sin_burst(double omega, double length) {
  return [omega, length](double t) {
    if (t < 0.0 || t > length) return 0.0;
    const double s = std::sin(std::numbers::pi * t / length);
    return std::sin(omega * t) * s * s;
  };
}

double envelope_ratio(const std::vector<double>& t, const std::vector<double>& s,
                      double window) {
  if (t.empty() || t.size() != s.size()) throw ValidationError("envelope needs matching series");
  const double t0 = t.front(), t1 = t.back();
  double first = 0.0, last = 0.0;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t0 + window) first = std::max(first, std::abs(s[i]));
    if (t[i] > t1 - window) last = std::max(last, std::abs(s[i]));
  }
  return first > 0.0 ? last / first : 0.0;
}

ProtocolResult run_restart_protocol(const StateSpaceModel& open_loop,
                                    const ProtocolConfig& cfg) {
  if (!(cfg.burst_length > 0.0) || !(cfg.duration > 0.0) || !(cfg.sample_interval > 0.0)) {
    throw ValidationError("protocol lengths must be > 0");
  }
  if (cfg.snapshot_time < cfg.burst_length) {
    throw ValidationError("snapshot time must not precede the end of the burst");
  }
  ProtocolResult r;
  double dt = cfg.dt > 0.0 ? cfg.dt : default_dt(open_loop);
  const long nb = static_cast<long>(std::ceil(cfg.burst_length / dt - 1e-9));
  dt = cfg.burst_length / static_cast<double>(nb);
  r.dt = dt;
  const int stride = std::max(1, static_cast<int>(std::lround(cfg.sample_interval / dt)));

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(open_loop.n());
  r.burst = integrate(open_loop, sin_burst(cfg.burst_frequency, cfg.burst_length), zero, 0.0,
                      dt, nb, {stride, false});
  const long free_steps = std::lround((cfg.snapshot_time - cfg.burst_length) / dt);
  Trajectory at_snap;
  at_snap.provenance = open_loop.Provenance();
  at_snap.t = {static_cast<double>(nb + free_steps) * dt};
  at_snap.states = advance_free(open_loop, r.burst.states.rightCols(1), dt, free_steps);
  r.snap = snapshot(at_snap, cfg.snapshot_time);

  const StateSpaceModel cl = closed_loop(open_loop, cfg.gain);
  const Eigen::VectorXd x0 = restore(r.snap, cl);
  const int verify_stride = static_cast<int>(std::max<long>(1, cfg.verify_steps / 1000));
  r.verify = integrate(cl, nullptr, x0, r.snap.t, dt, cfg.verify_steps, {verify_stride, false});
  const long samples = std::max<long>(1, std::lround(cfg.duration / (stride * dt)));
  r.closed = integrate(cl, nullptr, x0, r.snap.t, dt, samples * stride, {stride, true});

  r.v_envelope_ratio = envelope_ratio(r.closed.t, r.closed.v_tip, cfg.window);
  r.w_envelope_ratio = envelope_ratio(r.closed.t, r.closed.w_tip, cfg.window);
  r.energy_monotone = r.closed.diagnostics.max_energy_increase <= 1e-9 &&
                      r.verify.diagnostics.max_energy_increase <= 1e-9;
  return r;
}

}  // namespace piezo
