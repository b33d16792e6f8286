#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eulerlab/diagnostics.hpp"
#include "eulerlab/integrator.hpp"

namespace eulerlab {

namespace io {

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// One retained (masked) mode per line: `xi_1 ... xi_n re im`, preceded by a
/// `# dim=<n> N=<N> field=<name> t=<time>` header.
inline void write_snapshot(std::ostream& os, const ScalarField& f, const std::string& name,
                           double t) {
  const GridSpec& g = f.grid;
  os << "# dim=" << g.dim << " N=" << g.n << " field=" << name << " t=" << format_g17(t) << "\n";
  for (std::size_t p = 0; p < g.total_samples(); ++p) {
    const auto xi = g.xi_of(p);
    if (!g.in_mask(xi)) continue;
    for (int d = 0; d < g.dim; ++d) os << xi[d] << ' ';
    os << format_g17(f.coeffs[p].real()) << ' ' << format_g17(f.coeffs[p].imag()) << "\n";
  }
}

inline void write_snapshot(const std::filesystem::path& path, const ScalarField& f,
                           const std::string& name, double t) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_snapshot(os, f, name, t);
}

struct SnapshotHeader {
  int dim = 0;
  int n = 0;
  std::string field;
  double t = 0.0;
};

inline ScalarField read_snapshot(std::istream& is, SnapshotHeader* header = nullptr,
                                 double dealias_fraction = 2.0 / 3.0) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# dim=", 0) != 0)
    throw IoError("snapshot: missing header line");
  SnapshotHeader h;
  {
    std::istringstream hs(line.substr(1));
    std::string tok;
    while (hs >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      if (key == "dim") h.dim = std::stoi(val);
      else if (key == "N") h.n = std::stoi(val);
      else if (key == "field") h.field = val;
      else if (key == "t") h.t = std::stod(val);
    }
  }
  GridSpec g = make_grid(h.dim, h.n, dealias_fraction);
  ScalarField f(g);
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::array<int, 3> xi{0, 0, 0};
    for (int d = 0; d < g.dim; ++d)
      if (!(ls >> xi[d])) throw IoError("snapshot: malformed mode line: " + line);
    double re, im;
    if (!(ls >> re >> im)) throw IoError("snapshot: malformed mode line: " + line);
    if (!g.in_lattice(xi)) throw IoError("snapshot: mode outside the grid: " + line);
    f.at(xi) = Complex(re, im);
  }
  if (header) *header = h;
  return f;
}

inline ScalarField read_snapshot(const std::filesystem::path& path, SnapshotHeader* header = nullptr,
                                 double dealias_fraction = 2.0 / 3.0) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  return read_snapshot(is, header, dealias_fraction);
}

inline std::string step_tag(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06zu", i);
  return buf;
}

/// Directory of per-step snapshot files plus meta.json.
inline void save_trajectory(const std::filesystem::path& dir, const Trajectory& traj,
                            std::uint64_t seed = 0) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const std::string tag = step_tag(i);
    write_snapshot(dir / ("step_" + tag + "_sigma.txt"), traj.states[i].sigma, "sigma",
                   traj.times[i]);
    for (int d = 0; d < traj.grid.dim; ++d)
      write_snapshot(dir / ("step_" + tag + "_u" + std::to_string(d) + ".txt"),
                     traj.states[i].velocity[d], "u" + std::to_string(d), traj.times[i]);
  }
  nlohmann::json meta;
  meta["dim"] = traj.grid.dim;
  meta["N"] = traj.grid.n;
  meta["dealias_fraction"] = traj.grid.dealias_fraction;
  meta["gamma"] = traj.params.gamma;
  meta["dt"] = traj.dt;
  meta["seed"] = seed;
  meta["scheme"] = "lawson-rk4";
  meta["steps"] = traj.states.empty() ? 0 : traj.states.size() - 1;
  std::ofstream os(dir / "meta.json");
  if (!os) throw IoError("cannot write " + (dir / "meta.json").string());
  os << meta.dump(2) << "\n";
}

inline Trajectory load_trajectory(const std::filesystem::path& dir) {
  std::ifstream ms(dir / "meta.json");
  if (!ms) throw IoError("cannot open " + (dir / "meta.json").string());
  nlohmann::json meta = nlohmann::json::parse(ms);

  Trajectory traj;
  traj.grid = make_grid(meta.at("dim").get<int>(), meta.at("N").get<int>(),
                        meta.value("dealias_fraction", 2.0 / 3.0));
  traj.params.gamma = meta.at("gamma").get<double>();
  traj.dt = meta.at("dt").get<double>();
  const auto steps = meta.at("steps").get<std::size_t>();
  for (std::size_t i = 0; i <= steps; ++i) {
    const std::string tag = step_tag(i);
    SnapshotHeader h;
    State st(traj.grid);
    st.sigma = read_snapshot(dir / ("step_" + tag + "_sigma.txt"), &h, traj.grid.dealias_fraction);
    for (int d = 0; d < traj.grid.dim; ++d)
      st.velocity[d] = read_snapshot(dir / ("step_" + tag + "_u" + std::to_string(d) + ".txt"),
                                     nullptr, traj.grid.dealias_fraction);
    traj.times.push_back(h.t);
    traj.states.push_back(std::move(st));
  }
  return traj;
}

/// Gnuplot-style CSV: `#`-prefixed comment lines, then a `# <col,...>` header
/// and comma-separated 17-significant-digit rows. Byte-deterministic.
struct CsvWriter {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row) {
    if (row.size() != columns.size()) throw ShapeMismatch("CsvWriter: row width mismatch");
    rows.push_back(std::move(row));
  }

  void write(std::ostream& os) const {
    for (const auto& c : comments) os << "# " << c << "\n";
    os << "# ";
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_g17(row[i]);
      os << "\n";
    }
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    write(os);
  }
};

inline nlohmann::json report_to_json(const DecayReport& rep, const std::string& series_csv_path) {
  nlohmann::json j;
  j["quantity"] = rep.quantity;
  j["rate"] = rep.fitted_rate;
  j["prefactor"] = rep.fitted_prefactor;
  j["window"] = {rep.window_t0, rep.window_t1};
  j["residual"] = rep.residual_of_fit;
  j["series_csv_path"] = series_csv_path;
  if (rep.k_measured != 0.0) j["K_measured"] = rep.k_measured;
  return j;
}

}  // namespace io

}  // namespace eulerlab
