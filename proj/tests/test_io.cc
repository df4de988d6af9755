#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "piezo/cli.h"
#include "piezo/fem.h"
#include "piezo/io.h"
#include "piezo/mfem.h"

using namespace piezo;
namespace fs = std::filesystem;
using doctest::Approx;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("piezo_io_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int cli(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
  args.insert(args.begin(), "piezo_lab");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream o, e;
  const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return rc;
}

}  // namespace

TEST_CASE("settings parse and reject unknown keys") {
  RunConfig cfg;
  apply_setting(cfg, "run", "n", "12,16");
  CHECK(cfg.orders == std::vector<int>{12, 16});
  apply_setting(cfg, "run", "scheme", "fem,mfem");
  CHECK(cfg.schemes.size() == 2);
  CHECK(cfg.schemes_set);
  apply_setting(cfg, "material", "gamma", "0");
  CHECK(cfg.setup.material.coupling == 0.0);
  apply_setting(cfg, "geometry.piezo", "h_b", "0.02");
  CHECK(cfg.setup.piezo.upper_face == 0.02);
  CHECK_THROWS_AS(apply_setting(cfg, "run", "bogus", "1"), ConfigError);
  CHECK_THROWS_AS(apply_setting(cfg, "run", "gain", "abc"), ConfigError);
  CHECK_THROWS_AS(apply_setting(cfg, "run", "scheme", "fdm"), ConfigError);
  CHECK_THROWS_AS(parse_int_list("3,,4"), ConfigError);
}

TEST_CASE("config file round trip and layering") {
  const fs::path dir = scratch("config");
  RunConfig cfg;
  cfg.gain = 0.25;
  cfg.orders = {3, 5};
  cfg.setup.material.coupling = 2e-3;
  atomic_write((dir / "a.ini").string(), config_to_ini(cfg));
  RunConfig back;
  load_config_file(back, (dir / "a.ini").string());
  CHECK(config_to_ini(back) == config_to_ini(cfg));
  CHECK(back.gain == 0.25);

  atomic_write((dir / "bad.ini").string(), "[run]\nwibble = 3\n");
  RunConfig bad;
  CHECK_THROWS_WITH_AS(load_config_file(bad, (dir / "bad.ini").string()),
                       "unknown config key: run.wibble", ConfigError);

  // Environment overrides the file; flags override both.
  ::setenv("PIEZO_RUN_GAIN", "0.5", 1);
  load_config_env(back);
  CHECK(back.gain == 0.5);
  ::unsetenv("PIEZO_RUN_GAIN");
}

TEST_CASE("model text round trip") {
  for (const StateSpaceModel& m : {assemble_fem(PhysicalSetup{}, 3, FemVariant::kPaper),
                                   assemble_mfem(PhysicalSetup{}, 2)}) {
    std::string hash;
    const StateSpaceModel back = model_from_text(model_to_text(m), &hash);
    CHECK(hash == param_hash(m.setup));
    CHECK(back.scheme == m.scheme);
    CHECK(back.variant == m.variant);
    CHECK(back.ordering == m.ordering);
    CHECK(back.order == m.order);
    CHECK((back.A.array() == m.A.array()).all());
    CHECK((back.B.array() == m.B.array()).all());
    CHECK((back.C.array() == m.C.array()).all());
    CHECK((back.E.array() == m.E.array()).all());
  }
  CHECK_THROWS(model_from_text("not a model"));
}

TEST_CASE("csv parsing") {
  const CsvTable t = parse_csv("a,b,name\n1,2.5,x\n-3,4e-3,y\n");
  CHECK(t.header.size() == 3);
  CHECK(t.Numbers("b")[1] == Approx(4e-3));
  CHECK(t.rows[1][2] == "y");
  CHECK_THROWS(t.Column("missing"));
}

TEST_CASE("full-precision numbers survive text") {
  for (double v : {1.0 / 3.0, -5e6, 1.4339489936061449, 6.02214076e23}) {
    CHECK(std::stod(fmt(v)) == v);
  }
}

TEST_CASE("CLI: unknown config key exits with 2") {
  const fs::path dir = scratch("badkey");
  atomic_write((dir / "c.ini").string(), "[material]\ndensity = 3\n");
  std::string err;
  CHECK(cli({"spectrum", "--config", (dir / "c.ini").string(), "--out", (dir / "o").string()},
            nullptr, &err) == 2);
  CHECK(err.find("material.density") != std::string::npos);
  CHECK(cli({"spectrum", "--n", "zero", "--out", (dir / "o").string()}) == 2);
  CHECK(cli({"spectrum", "--gain", "-1", "--out", (dir / "o").string()}) == 2);
  CHECK(cli({"nonsense"}) == 2);
}

#ifdef PIEZO_LAB_EXE
TEST_CASE("CLI binary exit codes") {
  const fs::path dir = scratch("binary");
  atomic_write((dir / "c.ini").string(), "[run]\nflavour = 3\n");
  const std::string base = std::string(PIEZO_LAB_EXE) + " control --n 1 --out " + (dir / "o").string();
  int status = std::system((base + " > /dev/null").c_str());
  CHECK(WEXITSTATUS(status) == 0);
  status = std::system((base + " --config " + (dir / "c.ini").string() + " > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(status) == 2);
}
#endif

TEST_CASE("CLI: control report line") {
  const fs::path dir = scratch("control");
  std::string out;
  CHECK(cli({"control", "--n", "1", "--scheme", "fem", "--out", dir.string()}, &out) == 0);
  CHECK(out.find("kalman_rank=6 brockett=pass") != std::string::npos);
  const auto summary = nlohmann::json::parse(read_file((dir / "summary.json").string()));
  CHECK(summary["all_pass"] == true);
  CHECK(summary["command"] == "control");
  CHECK(fs::exists(dir / "resolved_config.ini"));
}

TEST_CASE("CLI: assemble writes the model and the element dump") {
  const fs::path dir = scratch("assemble");
  CHECK(cli({"assemble", "--variant", "paper", "--n", "3", "--out", dir.string()}) == 0);
  const std::string dump = read_file((dir / "element_matrices_paper_N3.txt").string());
  CHECK(dump.find("M1*6/h 3 3\n4 1 0\n2 4 2\n0 2 4\n") != std::string::npos);
  CHECK(dump.find("K2*h 3 3\n2 -1 0\n-1 2 -1\n0 -1 2\n") != std::string::npos);
  const std::string model = read_file((dir / "model_fem_N3.mtx").string());
  CHECK(model.rfind("%%PiezoModel 1", 0) == 0);

  const fs::path def = scratch("assemble_default");
  CHECK(cli({"assemble", "--out", def.string()}) == 0);
  CHECK(fs::exists(def / "model_fem_N20.mtx"));
}

TEST_CASE("CLI: spectrum of the MFEM model") {
  const fs::path dir = scratch("spectrum");
  CHECK(cli({"spectrum", "--scheme", "mfem", "--n", "12", "--out", dir.string()}) == 0);
  const CsvTable t = parse_csv(read_file((dir / "spectrum_mfem_N12.csv").string()));
  double first = 0.0;
  for (double im : t.Numbers("im")) {
    if (im > 1e-6 && (first == 0.0 || im < first)) first = im;
  }
  CHECK(std::abs(first - 1.4360) / 1.4360 <= 1e-3);
}

TEST_CASE("CLI: repeated runs give byte-identical CSVs") {
  const fs::path a = scratch("repeat_a"), b = scratch("repeat_b");
  for (const fs::path& d : {a, b}) {
    CHECK(cli({"sweep", "--n", "4,8", "--out", d.string()}) == 0);
    CHECK(cli({"simulate", "--n", "3", "--t-end", "25", "--out", d.string()}) == 0);
    CHECK(cli({"simulate", "--n", "2", "--burst-length", "0", "--t-end", "5", "--seed", "9",
               "--out", (d / "random").string()}) == 0);
  }
  for (const char* f : {"sweep.csv", "trajectory_fem_N3.csv", "random/trajectory_fem_N2.csv",
                        "sweep_items/fem_N4.csv", "summary.json"}) {
    INFO(f);
    CHECK(read_file((a / f).string()) == read_file((b / f).string()));
  }
}

TEST_CASE("CLI: report regenerates plots from CSV alone") {
  const fs::path dir = scratch("report");
  CHECK(cli({"sweep", "--n", "4,6", "--out", dir.string()}) == 0);
  const std::string before = read_file((dir / "sweep.svg").string());
  fs::remove(dir / "sweep.svg");
  CHECK(cli({"report", "--out", dir.string()}) == 0);
  CHECK(read_file((dir / "sweep.svg").string()) == before);
  CHECK(cli({"report", "--out", (dir / "missing").string()}) == 2);
}
