#include "piezo/cli.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "piezo/analysis.h"
#include "piezo/fem.h"
#include "piezo/mfem.h"
#include "piezo/simulation.h"

namespace piezo {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

bool CommandResult::AllPass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

namespace {

std::string Tag(Scheme s, int n) { return to_string(s) + "_N" + std::to_string(n); }

StateSpaceModel Build(const RunConfig& cfg, Scheme s, int n) {
  return s == Scheme::kFem ? assemble_fem(cfg.setup, n, cfg.variant, cfg.output)
                           : assemble_mfem(cfg.setup, n, cfg.output);
}

bool Standard(const StateSpaceModel& m) {
  return m.scheme == Scheme::kMfem || m.variant == FemVariant::kStandard;
}

class Run {
 public:
  Run(const RunConfig& cfg, std::string command, std::ostream& log)
      : cfg_(cfg), command_(std::move(command)), log_(log) {
    fs::create_directories(cfg.out);
  }

  void Write(const std::string& name, const std::string& content) {
    atomic_write((fs::path(cfg_.out) / name).string(), content);
    result_.outputs.push_back(name);
  }

  void Check(const std::string& name, bool pass, const std::string& detail) {
    result_.checks.push_back({name, pass, detail});
    log_ << (pass ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
  }

  CommandResult Finish() {
    Json j;
    j["command"] = command_;
    j["config_file"] = "resolved_config.ini";
    j["seed"] = cfg_.seed;
    j["all_pass"] = result_.AllPass();
    Json checks = Json::array();
    for (const auto& c : result_.checks) {
      checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    j["checks"] = checks;
    j["outputs"] = result_.outputs;
    atomic_write((fs::path(cfg_.out) / "resolved_config.ini").string(), config_to_ini(cfg_));
    atomic_write((fs::path(cfg_.out) / "summary.json").string(), j.dump(2) + "\n");
    return result_;
  }

  std::ostream& log() { return log_; }

 private:
  const RunConfig& cfg_;
  std::string command_;
  std::ostream& log_;
  CommandResult result_;
};

std::string Sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace

CommandResult cmd_assemble(const RunConfig& cfg, std::ostream& log) {
  Run run(cfg, "assemble", log);
  for (Scheme s : cfg.schemes) {
    for (int n : cfg.orders) {
      const StateSpaceModel m = Build(cfg, s, n);
      run.Write("model_" + Tag(s, n) + ".mtx", model_to_text(m));
      if (s == Scheme::kFem) {
        run.Write("element_matrices_" + to_string(cfg.variant) + "_N" + std::to_string(n) + ".txt",
                  element_matrices_dump(m));
      } else {
        run.Write("q_matrix_report.txt", q_matrix_report(m.setup.Composite()));
      }
      const double skew = relative_skew_residual(m.A, m.E);
      if (Standard(m)) {
        run.Check("energy skewness " + Tag(s, n), skew <= 1e-10, "||EA+A^TE||/(||E||||A||) = " + Sci(skew));
      } else {
        run.log() << "INFO energy skewness " << Tag(s, n) << " (paper variant, not asserted): "
                  << Sci(skew) << "\n";
      }
    }
  }
  return run.Finish();
}

CommandResult cmd_spectrum(const RunConfig& cfg, std::ostream& log) {
  Run run(cfg, "spectrum", log);
  for (Scheme s : cfg.schemes) {
    for (int n : cfg.orders) {
      const StateSpaceModel m = Build(cfg, s, n);
      const SpectrumReport rep = spectrum(m);
      const std::string csv = spectrum_csv(rep);
      run.Write("spectrum_" + Tag(s, n) + ".csv", csv);
      run.Write("spectrum_" + Tag(s, n) + ".svg",
                plot_spectrum(parse_csv(csv), "spectrum " + Tag(s, n)));
      std::ostringstream modes;
      for (double v : rep.FirstModes(4)) modes << fmt(v) << " ";
      run.log() << "first modes " << Tag(s, n) << ": " << modes.str() << "\n";
      run.Check("residual " + Tag(s, n), rep.MaxResidual() <= 1e-9,
                "max residual " + Sci(rep.MaxResidual()));
      run.Check("conjugate symmetry " + Tag(s, n),
                rep.ConjugateMismatch() <= 1e-9 * rep.spectral_radius,
                "mismatch " + Sci(rep.ConjugateMismatch()));
      if (Standard(m)) {
        run.Check("imaginary axis " + Tag(s, n), rep.MaxAbsReal() <= 1e-8 * rep.spectral_radius,
                  "max |Re| " + Sci(rep.MaxAbsReal()) + ", rho " + Sci(rep.spectral_radius));
      }
    }
  }
  return run.Finish();
}

CommandResult cmd_sweep(const RunConfig& cfg, std::ostream& log) {
  Run run(cfg, "sweep", log);
  const std::vector<Scheme> schemes =
      cfg.schemes_set ? cfg.schemes : std::vector<Scheme>{Scheme::kFem, Scheme::kMfem};
  std::vector<SweepItem> items;
  for (Scheme s : schemes) {
    for (int n : cfg.orders) items.push_back({s, n});
  }
  std::vector<std::vector<SweepRow>> slots(items.size());
  std::vector<std::string> errors(items.size());
  for_each_index(static_cast<std::ptrdiff_t>(items.size()), Execution::kParallel,
                 [&](std::ptrdiff_t i) {
                   try {
                     slots[i] = sweep_item(items[i], cfg.setup, cfg.variant);
                     atomic_write((fs::path(cfg.out) / "sweep_items" /
                                   (Tag(items[i].scheme, items[i].order) + ".csv"))
                                      .string(),
                                  sweep_csv(slots[i]));
                   } catch (const std::exception& e) {
                     errors[i] = e.what();
                   }
                 });
  for (size_t i = 0; i < items.size(); ++i) {
    if (!errors[i].empty()) {
      run.Check("sweep item " + Tag(items[i].scheme, items[i].order), false, errors[i]);
    }
  }
  std::vector<SweepRow> rows;
  for (const auto& s : slots) rows.insert(rows.end(), s.begin(), s.end());
  const std::string csv = sweep_csv(rows);
  run.Write("sweep.csv", csv);
  run.Write("sweep.svg", plot_sweep(parse_csv(csv)));

  std::map<std::pair<int, int>, double> fem, mfem;  // (k, N)
  for (const auto& r : rows) (r.scheme == Scheme::kFem ? fem : mfem)[{r.k, r.order}] = r.im_lambda;
  std::vector<int> sorted = cfg.orders;
  std::sort(sorted.begin(), sorted.end());
  if (!fem.empty() && sorted.size() > 1 && cfg.variant == FemVariant::kStandard) {
    for (int k = 1; k <= 4; ++k) {
      bool mono = true;
      for (size_t i = 1; i < sorted.size(); ++i) {
        if (fem.count({k, sorted[i]}) && fem.count({k, sorted[i - 1]})) {
          mono = mono && fem[{k, sorted[i]}] < fem[{k, sorted[i - 1]}];
        }
      }
      run.Check("fem k=" + std::to_string(k) + " decreasing in N", mono, mono ? "ok" : "violated");
    }
  }
  if (!fem.empty() && !mfem.empty() && cfg.variant == FemVariant::kStandard) {
    bool above = true;
    for (const auto& [key, v] : fem) {
      if (mfem.count(key)) above = above && mfem[key] >= v;
    }
    run.Check("mfem >= fem per (k, N)", above, above ? "ok" : "violated");
  }
  return run.Finish();
}

CommandResult cmd_control(const RunConfig& cfg, std::ostream& log) {
  Run run(cfg, "control", log);
  std::vector<ControlReport> reps;
  for (Scheme s : cfg.schemes) {
    for (int n : cfg.orders) {
      const ControlReport r = control_report(Build(cfg, s, n), cfg.tol);
      reps.push_back(r);
      std::ostringstream line;
      line << "scheme=" << to_string(s) << " N=" << n << " kalman_rank=" << r.kalman_rank
           << " brockett=" << (r.BrockettPass() ? "pass" : "fail")
           << " brockett_rank=" << r.brockett_rank << " blocks=";
      for (size_t i = 0; i < r.block_sizes.size(); ++i) line << (i ? "+" : "") << r.block_sizes[i];
      run.log() << line.str() << "\n";
      run.Check("brockett " + Tag(s, n), r.BrockettPass(),
                "rank " + std::to_string(r.brockett_rank) + " of " + std::to_string(r.n));
      const bool agree = !r.block_sizes.empty() && r.block_sizes.front() == r.kalman_rank;
      run.Check("staircase agrees with kalman " + Tag(s, n), agree || r.kalman_rank == 0,
                "kalman " + std::to_string(r.kalman_rank));
    }
  }
  run.Write("control.csv", control_csv(reps));
  return run.Finish();
}

CommandResult cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  Run run(cfg, "simulate", log);
  std::vector<std::pair<std::string, CsvTable>> overlay;
  for (Scheme s : cfg.schemes) {
    for (int n : cfg.orders) {
      const StateSpaceModel m = Build(cfg, s, n);
      double dt = cfg.dt > 0.0 ? cfg.dt : default_dt(m);
      Eigen::VectorXd x0 = Eigen::VectorXd::Zero(m.n());
      Trajectory driven;
      long burst_steps = 0;
      if (cfg.burst_length > 0.0) {
        burst_steps = static_cast<long>(std::ceil(cfg.burst_length / dt - 1e-9));
        dt = cfg.burst_length / static_cast<double>(burst_steps);
      } else {
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> normal;
        for (Eigen::Index i = 0; i < x0.size(); ++i) x0(i) = normal(rng);
      }
      const int stride = std::max(1, static_cast<int>(std::lround(0.05 / dt)));
      driven = integrate(m, sin_burst(cfg.burst_frequency, cfg.burst_length), x0, 0.0, dt,
                         burst_steps, {stride, false});
      const double t_start = static_cast<double>(burst_steps) * dt;
      const long free_steps =
          std::max<long>(0, std::lround((cfg.t_end - t_start) / dt / stride) * stride);
      const Trajectory free = integrate(m, nullptr, driven.states.rightCols(1), t_start, dt,
                                        free_steps, {stride, true});
      Trajectory all = driven;
      const Eigen::Index a = driven.states.cols(), b = free.states.cols() - 1;
      all.states.conservativeResize(Eigen::NoChange, a + b);
      all.states.rightCols(b) = free.states.rightCols(b);
      all.t.insert(all.t.end(), free.t.begin() + 1, free.t.end());
      fill_observables(all, m);
      const std::string csv = trajectory_csv(all);
      run.Write("trajectory_" + Tag(s, n) + ".csv", csv);
      overlay.emplace_back(Tag(s, n), parse_csv(csv));
      const double h = free.energy.front();
      double drift = 0.0;
      for (double e : free.energy) drift = std::max(drift, h > 0 ? std::abs(e - h) / h : 0.0);
      if (Standard(m)) {
        run.Check("free energy conserved " + Tag(s, n), drift <= 1e-10,
                  "max relative drift " + Sci(drift));
      }
    }
  }
  run.Write("tip_v.svg", plot_overlay(overlay, "v_tip", "tip longitudinal deflection"));
  run.Write("tip_w.svg", plot_overlay(overlay, "w_tip", "tip transverse deflection"));
  return run.Finish();
}

CommandResult cmd_closedloop(const RunConfig& cfg, std::ostream& log) {
  Run run(cfg, "closedloop", log);
  for (Scheme s : cfg.schemes) {
    for (int n : cfg.orders) {
      const StateSpaceModel m = Build(cfg, s, n);
      ProtocolConfig pc;
      pc.burst_frequency = cfg.burst_frequency;
      pc.burst_length = cfg.burst_length;
      pc.snapshot_time = cfg.snapshot_t;
      pc.gain = cfg.gain;
      pc.duration = cfg.t_end - cfg.snapshot_t;
      pc.window = cfg.window;
      pc.dt = cfg.dt;
      const ProtocolResult r = run_restart_protocol(m, pc);
      const std::string tag = Tag(s, n);
      run.log() << "snapshot " << tag << ": " << r.snap.note << ", dt " << fmt(r.dt) << "\n";
      run.Write("snapshot_" + tag + ".txt", snapshot_to_text(r.snap));
      run.Write("trajectory_burst_" + tag + ".csv", trajectory_csv(r.burst));
      const std::string csv = trajectory_csv(r.closed);
      run.Write("trajectory_closed_" + tag + ".csv", csv);
      const CsvTable table = parse_csv(csv);
      run.Write("closed_tip_v_" + tag + ".svg", plot_trajectory(table, "v_tip", "closed loop v(l,t) " + tag));
      run.Write("closed_tip_w_" + tag + ".svg", plot_trajectory(table, "w_tip", "closed loop w(l,t) " + tag));

      const StateSpaceModel cl = closed_loop(m, cfg.gain);
      const SpectrumReport rep = spectrum(cl);
      const std::string scsv = spectrum_csv(rep);
      run.Write("closedloop_spectrum_" + tag + ".csv", scsv);
      run.Write("closedloop_spectrum_" + tag + ".svg",
                plot_spectrum(parse_csv(scsv), "closed-loop spectrum " + tag));

      run.Check("energy non-increasing " + tag, r.energy_monotone,
                "max step increase / H0 " + Sci(std::max(r.closed.diagnostics.max_energy_increase,
                                                         r.verify.diagnostics.max_energy_increase)));
      if (r.verify.diagnostics.dissipation_checked) {
        run.Check("dissipation identity " + tag,
                  r.verify.diagnostics.max_dissipation_residual <= 1e-8,
                  "max residual " + Sci(r.verify.diagnostics.max_dissipation_residual));
      }
      run.Check("v envelope decay " + tag, r.v_envelope_ratio <= 0.1,
                "last/first window " + Sci(r.v_envelope_ratio));
      run.Check("w envelope decay " + tag, r.w_envelope_ratio <= 0.1,
                "last/first window " + Sci(r.w_envelope_ratio));
      run.Check("no growing mode " + tag, rep.MaxReal() <= 1e-8 * rep.spectral_radius,
                "max Re " + Sci(rep.MaxReal()));
    }
  }
  return run.Finish();
}

CommandResult cmd_report(const RunConfig& cfg, std::ostream& log) {
  if (!fs::is_directory(cfg.out)) throw ConfigError("no results directory: " + cfg.out);
  std::vector<fs::path> csvs;
  for (const auto& e : fs::directory_iterator(cfg.out)) {
    if (e.path().extension() == ".csv") csvs.push_back(e.path());
  }
  std::sort(csvs.begin(), csvs.end());
  Run run(cfg, "report", log);
  std::vector<std::pair<std::string, CsvTable>> overlay;
  for (const auto& p : csvs) {
    const std::string stem = p.stem().string();
    const CsvTable t = parse_csv(read_file(p.string()));
    if (stem == "sweep") {
      run.Write("sweep.svg", plot_sweep(t));
    } else if (stem.rfind("spectrum_", 0) == 0 || stem.rfind("closedloop_spectrum_", 0) == 0) {
      run.Write(stem + ".svg", plot_spectrum(t, stem));
    } else if (stem.rfind("trajectory_closed_", 0) == 0) {
      const std::string tag = stem.substr(18);
      run.Write("closed_tip_v_" + tag + ".svg", plot_trajectory(t, "v_tip", "closed loop v(l,t) " + tag));
      run.Write("closed_tip_w_" + tag + ".svg", plot_trajectory(t, "w_tip", "closed loop w(l,t) " + tag));
    } else if (stem.rfind("trajectory_", 0) == 0 && stem.rfind("trajectory_burst_", 0) != 0) {
      overlay.emplace_back(stem.substr(11), t);
    }
  }
  if (!overlay.empty()) {
    run.Write("tip_v.svg", plot_overlay(overlay, "v_tip", "tip longitudinal deflection"));
    run.Write("tip_w.svg", plot_overlay(overlay, "w_tip", "tip transverse deflection"));
  }
  run.log() << "regenerated " << run.Finish().outputs.size() << " plots from " << csvs.size()
            << " CSV files\n";
  return run.Finish();
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"piezo_lab: FEM and MFEM models of a current-actuated piezoelectric beam"};
  app.require_subcommand(1);
  struct Flags {
    std::string scheme, n, variant, gain, dt, t_end, snapshot_t, config, out, seed, output, tol,
        window, burst_frequency, burst_length;
  };
  Flags f;
  const std::pair<const char*, const char*> commands[] = {
      {"assemble", "assemble models and write them as matrix files"},
      {"spectrum", "eigenvalues of each model"},
      {"sweep", "first four modes over a list of N"},
      {"control", "Kalman rank, staircase and Brockett checks"},
      {"simulate", "open-loop driven run and tip deflections"},
      {"closedloop", "snapshot-restart protocol under collocated feedback"},
      {"report", "regenerate plots from the CSV files in --out"},
  };
  std::map<std::string, CLI::App*> subs;
  std::vector<std::pair<std::string, std::string*>> mapping;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--scheme", f.scheme, "fem, mfem or a comma list");
    sub->add_option("--n", f.n, "segment count or comma list");
    sub->add_option("--variant", f.variant, "FEM element variant: standard or paper");
    sub->add_option("--gain", f.gain, "feedback gain kappa");
    sub->add_option("--dt", f.dt, "time step; 0 picks the default rule");
    sub->add_option("--t-end", f.t_end, "end time of the run [s]");
    sub->add_option("--snapshot-t", f.snapshot_t, "snapshot time [s]");
    sub->add_option("--config", f.config, "INI config file");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--seed", f.seed, "seed for randomized initial states");
    sub->add_option("--output-map", f.output, "energy (C = B^T E) or transpose (C = B^T)");
    sub->add_option("--tol", f.tol, "relative rank tolerance");
    sub->add_option("--window", f.window, "envelope window [s]");
    sub->add_option("--burst-frequency", f.burst_frequency, "burst angular frequency [rad/s]");
    sub->add_option("--burst-length", f.burst_length, "burst length [s]");
    subs[name] = sub;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::ostringstream os;
    app.exit(e, os, os);
    err << os.str();
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  RunConfig cfg;
  try {
    if (!f.config.empty()) load_config_file(cfg, f.config);
    load_config_env(cfg);
    const std::pair<const char*, std::string*> flags[] = {
        {"scheme", &f.scheme},   {"n", &f.n},
        {"variant", &f.variant}, {"gain", &f.gain},
        {"dt", &f.dt},           {"t_end", &f.t_end},
        {"snapshot_t", &f.snapshot_t}, {"out", &f.out},
        {"seed", &f.seed},       {"output", &f.output},
        {"tol", &f.tol},         {"window", &f.window},
        {"burst_frequency", &f.burst_frequency}, {"burst_length", &f.burst_length}};
    for (const auto& [key, val] : flags) {
      if (!val->empty()) apply_setting(cfg, "run", key, *val);
    }
    cfg.setup.Composite();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    CommandResult r;
    if (subs["assemble"]->parsed()) r = cmd_assemble(cfg, out);
    if (subs["spectrum"]->parsed()) r = cmd_spectrum(cfg, out);
    if (subs["sweep"]->parsed()) r = cmd_sweep(cfg, out);
    if (subs["control"]->parsed()) r = cmd_control(cfg, out);
    if (subs["simulate"]->parsed()) r = cmd_simulate(cfg, out);
    if (subs["closedloop"]->parsed()) r = cmd_closedloop(cfg, out);
    if (subs["report"]->parsed()) r = cmd_report(cfg, out);
    return r.AllPass() ? 0 : 1;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace piezo
