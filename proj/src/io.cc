#include "piezo/io.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "piezo/fem.h"

namespace piezo {

namespace {

double ParseDouble(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* b = text.data();
  const char* e = b + text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(*b))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(e[-1]))) --e;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e || b == e) {
    throw ConfigError("invalid number for " + key + ": '" + text + "'");
  }
  return v;
}

std::string Trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(Trim(cur));
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

struct Key {
  const char* section;
  const char* name;
  Setter set;
  std::function<std::string(const RunConfig&)> get;
};

enum class Bound { kAny, kNonNegative, kPositive };

template <class Member>
Key Num(const char* section, const char* name, Member member, Bound bound = Bound::kAny) {
  return {section, name,
          [member, bound](RunConfig& c, const std::string& k, const std::string& v) {
            const double x = ParseDouble(k, v);
            if ((bound == Bound::kNonNegative && !(x >= 0.0)) ||
                (bound == Bound::kPositive && !(x > 0.0))) {
              throw ConfigError(k + " must be " +
                                (bound == Bound::kPositive ? "positive" : "non-negative") +
                                ", got '" + v + "'");
            }
            member(c) = x;
          },
          [member](const RunConfig& c) { return fmt(member(const_cast<RunConfig&>(c))); }};
}

const std::vector<Key>& Keys() {
  static const std::vector<Key> keys = [] {
    std::vector<Key> k;
    const std::pair<const char*, LayerGeometry PhysicalSetup::*> layers[] = {
        {"geometry.piezo", &PhysicalSetup::piezo},
        {"geometry.substrate", &PhysicalSetup::substrate}};
    for (const auto& [sec, layer] : layers) {
      k.push_back(Num(sec, "l", [layer](RunConfig& c) -> double& { return (c.setup.*layer).length; }));
      k.push_back(Num(sec, "g_b", [layer](RunConfig& c) -> double& { return (c.setup.*layer).half_width; }));
      k.push_back(Num(sec, "h_a", [layer](RunConfig& c) -> double& { return (c.setup.*layer).lower_face; }));
      k.push_back(Num(sec, "h_b", [layer](RunConfig& c) -> double& { return (c.setup.*layer).upper_face; }));
    }
    k.push_back(Num("material", "rho_s", [](RunConfig& c) -> double& { return c.setup.material.substrate_density; }));
    k.push_back(Num("material", "C11_s", [](RunConfig& c) -> double& { return c.setup.material.substrate_stiffness; }));
    k.push_back(Num("material", "rho_p", [](RunConfig& c) -> double& { return c.setup.material.piezo_density; }));
    k.push_back(Num("material", "C11_p", [](RunConfig& c) -> double& { return c.setup.material.piezo_stiffness; }));
    k.push_back(Num("material", "gamma", [](RunConfig& c) -> double& { return c.setup.material.coupling; }));
    k.push_back(Num("material", "beta", [](RunConfig& c) -> double& { return c.setup.material.impermittivity; }));
    k.push_back(Num("material", "mu", [](RunConfig& c) -> double& { return c.setup.material.permeability; }));
    k.push_back(Num("run", "gain", [](RunConfig& c) -> double& { return c.gain; }, Bound::kNonNegative));
    k.push_back(Num("run", "dt", [](RunConfig& c) -> double& { return c.dt; }, Bound::kNonNegative));
    k.push_back(Num("run", "t_end", [](RunConfig& c) -> double& { return c.t_end; }, Bound::kNonNegative));
    k.push_back(Num("run", "snapshot_t", [](RunConfig& c) -> double& { return c.snapshot_t; }, Bound::kNonNegative));
    k.push_back(Num("run", "burst_frequency", [](RunConfig& c) -> double& { return c.burst_frequency; }, Bound::kNonNegative));
    k.push_back(Num("run", "burst_length", [](RunConfig& c) -> double& { return c.burst_length; }, Bound::kNonNegative));
    k.push_back(Num("run", "window", [](RunConfig& c) -> double& { return c.window; }, Bound::kPositive));
    k.push_back(Num("run", "tol", [](RunConfig& c) -> double& { return c.tol; }, Bound::kPositive));
    k.push_back({"run", "scheme",
                 [](RunConfig& c, const std::string&, const std::string& v) {
                   c.schemes = parse_scheme_list(v);
                   c.schemes_set = true;
                 },
                 [](const RunConfig& c) {
                   std::string s;
                   for (Scheme x : c.schemes) s += (s.empty() ? "" : ",") + to_string(x);
                   return s;
                 }});
    k.push_back({"run", "n",
                 [](RunConfig& c, const std::string&, const std::string& v) {
                   c.orders = parse_int_list(v);
                 },
                 [](const RunConfig& c) {
                   std::string s;
                   for (int x : c.orders) s += (s.empty() ? "" : ",") + std::to_string(x);
                   return s;
                 }});
    k.push_back({"run", "variant",
                 [](RunConfig& c, const std::string&, const std::string& v) {
                   c.variant = parse_variant(Trim(v));
                 },
                 [](const RunConfig& c) { return to_string(c.variant); }});
    k.push_back({"run", "output",
                 [](RunConfig& c, const std::string&, const std::string& v) {
                   c.output = parse_output_map(Trim(v));
                 },
                 [](const RunConfig& c) { return to_string(c.output); }});
    k.push_back({"run", "seed",
                 [](RunConfig& c, const std::string& key, const std::string& v) {
                   const double s = ParseDouble(key, v);
                   if (s < 0 || s != std::floor(s) || s > 4294967295.0) {
                     throw ConfigError("invalid seed for " + key + ": '" + v + "'");
                   }
                   c.seed = static_cast<unsigned>(s);
                 },
                 [](const RunConfig& c) { return std::to_string(c.seed); }});
    k.push_back({"run", "out",
                 [](RunConfig& c, const std::string&, const std::string& v) { c.out = Trim(v); },
                 [](const RunConfig& c) { return c.out; }});
    return k;
  }();
  return keys;
}

std::string EnvName(const Key& k) {
  std::string s = std::string("PIEZO_") + k.section + "_" + k.name;
  for (char& c : s) {
    c = c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return s;
}

}  // namespace

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& part : Split(text, ',')) {
    if (part.empty()) throw ConfigError("empty entry in N list '" + text + "'");
    int v = 0;
    const auto res = std::from_chars(part.data(), part.data() + part.size(), v);
    if (res.ec != std::errc() || res.ptr != part.data() + part.size() || v < 1) {
      throw ConfigError("invalid N list entry '" + part + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty N list");
  return out;
}

std::vector<Scheme> parse_scheme_list(const std::string& text) {
  std::vector<Scheme> out;
  for (const auto& part : Split(text, ',')) {
    if (part.empty()) continue;
    try {
      out.push_back(parse_scheme(part));
    } catch (const ValidationError& e) {
      throw ConfigError(e.what());
    }
  }
  if (out.empty()) throw ConfigError("empty scheme list");
  return out;
}

void apply_setting(RunConfig& cfg, const std::string& section, const std::string& key,
                   const std::string& value) {
  const std::string full = section + "." + key;
  for (const auto& k : Keys()) {
    if (section == k.section && key == k.name) {
      try {
        k.set(cfg, full, value);
      } catch (const ValidationError& e) {
        throw ConfigError(full + ": " + e.what());
      }
      return;
    }
  }
  throw ConfigError("unknown config key: " + full);
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::ini_parser::read_ini(path, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("cannot read config '" + path + "': " + e.message());
  }
  for (const auto& [section, child] : pt) {
    if (child.empty()) throw ConfigError("unknown config key: " + section + " (outside a section)");
    for (const auto& [key, val] : child) apply_setting(cfg, section, key, val.data());
  }
  cfg.config_path = path;
}

void load_config_env(RunConfig& cfg) {
  for (const auto& k : Keys()) {
    if (const char* v = std::getenv(EnvName(k).c_str())) apply_setting(cfg, k.section, k.name, v);
  }
}

std::string config_to_ini(const RunConfig& cfg) {
  std::ostringstream os;
  std::string section;
  for (const auto& k : Keys()) {
    if (section != k.section) {
      section = k.section;
      os << (os.tellp() > 0 ? "\n" : "") << "[" << section << "]\n";
    }
    os << k.name << " = " << k.get(cfg) << "\n";
  }
  return os.str();
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    if (!f) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

namespace {

void WriteMatrix(std::ostringstream& os, const std::string& name, const Eigen::MatrixXd& m) {
  long nnz = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) nnz += m(i, j) != 0.0;
  }
  os << "%%matrix " << name << " coordinate real general\n";
  os << m.rows() << " " << m.cols() << " " << nnz << "\n";
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (m(i, j) != 0.0) os << i + 1 << " " << j + 1 << " " << fmt(m(i, j)) << "\n";
    }
  }
}

}  // namespace

std::string model_to_text(const StateSpaceModel& m) {
  std::ostringstream os;
  os << "%%PiezoModel 1\n";
  os << "% scheme " << to_string(m.scheme) << "\n";
  os << "% N " << m.order << "\n";
  os << "% variant " << to_string(m.variant) << "\n";
  os << "% ordering " << to_string(m.ordering) << "\n";
  os << "% output " << to_string(m.output) << "\n";
  os << "% gain " << fmt(m.gain) << "\n";
  os << "% param_hash " << param_hash(m.setup) << "\n";
  os << "% provenance " << m.Provenance() << "\n";
  os << "% n " << m.n() << "\n";
  WriteMatrix(os, "A", m.A);
  WriteMatrix(os, "B", m.B);
  WriteMatrix(os, "C", m.C);
  WriteMatrix(os, "E", m.E);
  return os.str();
}

StateSpaceModel model_from_text(const std::string& text, std::string* hash_out) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "%%PiezoModel 1") {
    throw std::runtime_error("not a model file (missing '%%PiezoModel 1')");
  }
  StateSpaceModel m;
  std::map<std::string, Eigen::MatrixXd> mats;
  while (std::getline(is, line)) {
    if (line.rfind("%%matrix ", 0) == 0) {
      std::istringstream hs(line.substr(9));
      std::string name;
      hs >> name;
      long rows = 0, cols = 0, nnz = 0;
      if (!std::getline(is, line)) throw std::runtime_error("truncated matrix " + name);
      std::istringstream ds(line);
      ds >> rows >> cols >> nnz;
      Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(rows, cols);
      for (long k = 0; k < nnz; ++k) {
        if (!std::getline(is, line)) throw std::runtime_error("truncated matrix " + name);
        std::istringstream es(line);
        long i = 0, j = 0;
        std::string v;
        es >> i >> j >> v;
        if (i < 1 || j < 1 || i > rows || j > cols) {
          throw std::runtime_error("entry out of range in matrix " + name);
        }
        mat(i - 1, j - 1) = std::strtod(v.c_str(), nullptr);
      }
      mats[name] = mat;
    } else if (line.rfind("% ", 0) == 0) {
      std::istringstream hs(line.substr(2));
      std::string key, val;
      hs >> key >> val;
      if (key == "scheme") m.scheme = parse_scheme(val);
      if (key == "N") m.order = std::stoi(val);
      if (key == "variant") m.variant = parse_variant(val);
      if (key == "ordering") {
        m.ordering = val == "field-blocks" ? StateOrdering::kFieldBlocks
                                           : StateOrdering::kElementStacked;
      }
      if (key == "output") m.output = parse_output_map(val);
      if (key == "gain") m.gain = std::strtod(val.c_str(), nullptr);
      if (key == "param_hash" && hash_out) *hash_out = val;
    }
  }
  for (const char* name : {"A", "B", "C", "E"}) {
    if (!mats.count(name)) throw std::runtime_error(std::string("model file lacks matrix ") + name);
  }
  m.A = mats["A"];
  m.B = mats["B"].col(0);
  m.C = mats["C"].row(0);
  m.E = mats["E"];
  m.Validate();
  return m;
}

std::string element_matrices_dump(const StateSpaceModel& model) {
  const ElementMatrices em =
      element_matrices(model.order, model.setup.Composite(), model.variant);
  std::ostringstream os;
  os << "# element matrices, variant " << to_string(em.variant) << ", N " << model.order
     << ", h " << fmt(em.h) << "\n";
  auto dump = [&](const char* name, const Eigen::MatrixXd& m) {
    os << name << " " << m.rows() << " " << m.cols() << "\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? " " : "") << fmt(m(i, j));
      os << "\n";
    }
  };
  dump("M1", em.m1);
  dump("K1", em.k1);
  dump("K2", em.k2);
  dump("B1", em.b1);
  // Scaled to the printed integer patterns.
  dump("M1*6/h", em.m1 * 6.0 / em.h);
  dump("K1*2", em.k1 * 2.0);
  dump("K2*h", em.k2 * em.h);
  return os.str();
}

std::string snapshot_to_text(const Snapshot& s) {
  std::ostringstream os;
  os << "# piezo-snapshot v1\n";
  os << "provenance " << s.provenance << "\n";
  os << "t " << fmt(s.t) << "\n";
  os << "n " << s.x.size() << "\n";
  for (Eigen::Index i = 0; i < s.x.size(); ++i) os << fmt(s.x(i)) << "\n";
  return os.str();
}

Snapshot snapshot_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string line, key;
  if (!std::getline(is, line) || line != "# piezo-snapshot v1") {
    throw ProvenanceError("unsupported snapshot version: '" + line + "'");
  }
  Snapshot s;
  long n = -1;
  for (int i = 0; i < 3; ++i) {
    if (!std::getline(is, line)) throw ProvenanceError("truncated snapshot header");
    std::istringstream hs(line);
    std::string val;
    hs >> key >> val;
    if (key == "provenance") s.provenance = val;
    else if (key == "t") s.t = std::strtod(val.c_str(), nullptr);
    else if (key == "n") n = std::stol(val);
    else throw ProvenanceError("unexpected snapshot header key '" + key + "'");
  }
  if (n < 0) throw ProvenanceError("snapshot header lacks n");
  s.x.resize(n);
  for (long i = 0; i < n; ++i) {
    if (!std::getline(is, line)) throw ProvenanceError("snapshot has fewer than n values");
    char* end = nullptr;
    s.x(i) = std::strtod(line.c_str(), &end);
    if (end == line.c_str()) throw ProvenanceError("malformed snapshot value '" + line + "'");
  }
  return s;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "scheme,N,variant,k,im_lambda\n";
  for (const auto& r : rows) {
    os << to_string(r.scheme) << "," << r.order << ","
       << (r.scheme == Scheme::kFem ? to_string(r.variant) : "-") << "," << r.k << ","
       << fmt(r.im_lambda) << "\n";
  }
  return os.str();
}

std::string spectrum_csv(const SpectrumReport& rep) {
  std::ostringstream os;
  os << "idx,re,im,residual\n";
  for (size_t i = 0; i < rep.eigenvalues.size(); ++i) {
    os << i << "," << fmt(rep.eigenvalues[i].real()) << "," << fmt(rep.eigenvalues[i].imag())
       << "," << fmt(rep.residuals[i]) << "\n";
  }
  return os.str();
}

std::string control_csv(const std::vector<ControlReport>& reps) {
  std::ostringstream os;
  os << "scheme,N,n,kalman_rank,brockett_rank,tol,sv_gap\n";
  for (const auto& r : reps) {
    os << to_string(r.scheme) << "," << r.order << "," << r.n << "," << r.kalman_rank << ","
       << r.brockett_rank << "," << fmt(r.tol) << "," << fmt(r.sv_gap) << "\n";
  }
  return os.str();
}

std::string trajectory_csv(const Trajectory& tr) {
  std::ostringstream os;
  os << "t,v_tip,w_tip,energy,y\n";
  for (size_t i = 0; i < tr.t.size(); ++i) {
    os << fmt(tr.t[i]) << "," << fmt(tr.v_tip[i]) << "," << fmt(tr.w_tip[i]) << ","
       << fmt(tr.energy[i]) << "," << fmt(tr.y[i]) << "\n";
  }
  return os.str();
}

int CsvTable::Column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::runtime_error("CSV lacks column '" + name + "'");
  return static_cast<int>(it - header.begin());
}

std::vector<double> CsvTable::Numbers(const std::string& name) const {
  const int c = Column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(std::strtod(r.at(c).c_str(), nullptr));
  return out;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream is(text);
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (first) {
      t.header = cells;
      first = false;
    } else {
      t.rows.push_back(cells);
    }
  }
  return t;
}

namespace {

std::string Escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

std::string Tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

std::string svg_chart(const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<Series>& series,
                      bool scatter) {
  constexpr double kW = 720, kH = 440, kL = 80, kR = 160, kT = 40, kB = 60;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5 * (std::abs(y0) + 1), y1 += 0.5 * (std::abs(y1) + 1);
  const double pw = kW - kL - kR, ph = kH - kT - kB;
  auto px = [&](double x) { return kL + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kT + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
     << Escape(title) << "</text>\n";
  os << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << kT + ph + 18
       << "\" text-anchor=\"middle\">" << Tick(xv) << "</text>\n";
    os << "<text x=\"" << kL - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
       << Tick(yv) << "</text>\n";
  }
  os << "<text x=\"" << kL + pw / 2 << "\" y=\"" << kH - 15 << "\" text-anchor=\"middle\">"
     << Escape(xlabel) << "</text>\n";
  os << "<text transform=\"translate(18," << kT + ph / 2
     << ") rotate(-90)\" text-anchor=\"middle\">" << Escape(ylabel) << "</text>\n";
  for (size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % 8];
    if (scatter) {
      for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        os << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
           << "\" r=\"2\" fill=\"" << color << "\"/>\n";
      }
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
      for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        os << px(s.x[i]) << "," << py(s.y[i]) << " ";
      }
      os << "\"/>\n";
    }
    os << "<text x=\"" << kL + pw + 10 << "\" y=\"" << kT + 16 * (k + 1) << "\" fill=\"" << color
       << "\">" << Escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string plot_trajectory(const CsvTable& csv, const std::string& column,
                            const std::string& title) {
  return svg_chart(title, "t [s]", column + " [m]",
                   {{column, csv.Numbers("t"), csv.Numbers(column)}});
}

std::string plot_overlay(const std::vector<std::pair<std::string, CsvTable>>& runs,
                         const std::string& column, const std::string& title) {
  std::vector<Series> s;
  for (const auto& [label, csv] : runs) s.push_back({label, csv.Numbers("t"), csv.Numbers(column)});
  return svg_chart(title, "t [s]", column + " [m]", s);
}

std::string plot_spectrum(const CsvTable& csv, const std::string& title) {
  return svg_chart(title, "Re lambda", "Im lambda",
                   {{"eigenvalues", csv.Numbers("re"), csv.Numbers("im")}}, true);
}

std::string plot_sweep(const CsvTable& csv) {
  const int cs = csv.Column("scheme"), cn = csv.Column("N"), ck = csv.Column("k"),
            cv = csv.Column("im_lambda");
  std::map<std::string, Series> by;
  for (const auto& r : csv.rows) {
    const std::string label = r[cs] + " k=" + r[ck];
    auto& s = by[label];
    s.label = label;
    s.x.push_back(std::strtod(r[cn].c_str(), nullptr));
    s.y.push_back(std::strtod(r[cv].c_str(), nullptr));
  }
  std::vector<Series> series;
  for (auto& [_, s] : by) series.push_back(s);
  return svg_chart("Im lambda_k versus N", "N", "Im lambda", series);
}

}  // namespace piezo
