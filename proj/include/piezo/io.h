#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "piezo/analysis.h"
#include "piezo/simulation.h"
#include "piezo/state_space.h"

namespace piezo {

/// Bad configuration input; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  PhysicalSetup setup;
  std::vector<Scheme> schemes{Scheme::kFem};
  bool schemes_set = false;  // sweep defaults to both schemes otherwise
  std::vector<int> orders{20};
  FemVariant variant = FemVariant::kStandard;
  OutputMap output = OutputMap::kEnergyAdjoint;
  double gain = 3e-6;
  double dt = 0.0;  // 0 selects default_dt
  double t_end = 1845.0;
  double snapshot_t = 845.0;
  double burst_frequency = 1.43;
  double burst_length = 20.0;
  double window = 20.0;
  double tol = 1e-10;
  unsigned seed = 1;
  std::string out = "results";
  std::string config_path;
};

/// Sets "section.key" from text. Throws ConfigError naming the key when it
/// is unknown or the value does not parse.
void apply_setting(RunConfig& cfg, const std::string& section, const std::string& key,
                   const std::string& value);

/// INI sections [geometry.piezo], [geometry.substrate], [material], [run].
void load_config_file(RunConfig& cfg, const std::string& path);
/// PIEZO_<SECTION>_<KEY>, dots mapped to '_', upper case; e.g.
/// PIEZO_MATERIAL_GAMMA, PIEZO_RUN_N.
void load_config_env(RunConfig& cfg);
std::string config_to_ini(const RunConfig& cfg);

std::vector<int> parse_int_list(const std::string& text);
std::vector<Scheme> parse_scheme_list(const std::string& text);

/// Full-precision decimal text.
std::string fmt(double v);

/// Writes to path.tmp then renames over path.
void atomic_write(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Metadata header plus A, B, C, E as coordinate blocks (1-based).
std::string model_to_text(const StateSpaceModel& model);
/// Round-trips everything except the raw physical setup; the parameter hash
/// from the header is returned in `param_hash_out`.
StateSpaceModel model_from_text(const std::string& text, std::string* param_hash_out = nullptr);

std::string element_matrices_dump(const StateSpaceModel& model);

std::string snapshot_to_text(const Snapshot& snap);
/// Throws ProvenanceError on an unknown version or malformed body.
Snapshot snapshot_from_text(const std::string& text);

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string spectrum_csv(const SpectrumReport& rep);
std::string control_csv(const std::vector<ControlReport>& reps);
std::string trajectory_csv(const Trajectory& traj);

/// Parsed numeric CSV with a header row. Non-numeric cells are kept as text.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int Column(const std::string& name) const;  // throws if absent
  std::vector<double> Numbers(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text);

struct Series {
  std::string label;
  std::vector<double> x, y;
};

/// Minimal SVG line/scatter chart.
std::string svg_chart(const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<Series>& series,
                      bool scatter = false);

/// Plots derived from CSV files alone.
std::string plot_trajectory(const CsvTable& csv, const std::string& column,
                            const std::string& title);
std::string plot_overlay(const std::vector<std::pair<std::string, CsvTable>>& runs,
                         const std::string& column, const std::string& title);
std::string plot_spectrum(const CsvTable& csv, const std::string& title);
std::string plot_sweep(const CsvTable& csv);

}  // namespace piezo
