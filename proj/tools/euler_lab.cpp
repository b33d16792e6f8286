#include <iostream>

#include <CLI11.hpp>

#include "eulerlab/experiment.hpp"
#include "eulerlab/propagator.hpp"

namespace {

using namespace eulerlab;

int cmd_run(const std::string& config_path, const ExperimentConfig& flags,
            const std::vector<std::string>& set_flags) {
  ExperimentConfig cfg;
  if (!config_path.empty()) cfg = load_config_file(config_path);
  // flags override file values; only explicitly passed flags apply
  auto passed = [&](const std::string& name) {
    for (const auto& f : set_flags)
      if (f == name) return true;
    return false;
  };
  if (passed("--kind")) cfg.kind = flags.kind;
  if (passed("--dim")) cfg.dim = flags.dim;
  if (passed("--N")) cfg.n = flags.n;
  if (passed("--s")) cfg.s = flags.s;
  if (passed("--gamma")) cfg.gamma = flags.gamma;
  if (passed("--amplitude")) cfg.amplitude = flags.amplitude;
  if (passed("--T-end")) cfg.t_end = flags.t_end;
  if (passed("--dt")) cfg.dt = flags.dt;
  if (passed("--seed")) cfg.seed = flags.seed;
  if (passed("--K-frame")) cfg.k_frame = flags.k_frame;
  if (passed("--T-window")) cfg.t_window = flags.t_window;
  if (passed("--output-dir")) cfg.output_dir = flags.output_dir;

  ExperimentResult res = run_experiment(cfg);
  std::cout << "wrote " << res.directory.string() << "\n";
  for (const auto& f : res.failures) std::cerr << "[FAIL] " << f << "\n";
  return res.exit_status;
}

int cmd_dump_symbol(const std::vector<int>& xi_in, double t) {
  const int dim = static_cast<int>(xi_in.size());
  if (dim < 1 || dim > 3) {
    std::cerr << "--xi needs 1 to 3 integers\n";
    return 2;
  }
  std::array<int, 3> xi{0, 0, 0};
  for (int d = 0; d < dim; ++d) xi[d] = xi_in[d];
  const MatrixXc m = mode_exponential(xi, t, dim);
  // snapshot text format; rows indexed like a (dim+1)-point 1D "grid"
  std::cout << "# dim=" << dim << " N=" << dim + 1 << " field=mode_exponential t="
            << io::format_g17(t) << "\n";
  for (int i = 0; i <= dim; ++i)
    for (int j = 0; j <= dim; ++j) {
      std::cout << i << ' ' << j << ' ' << io::format_g17(m(i, j).real()) << ' '
                << io::format_g17(m(i, j).imag()) << "\n";
    }
  return 0;
}

int cmd_frame_dump(const std::string& traj_dir, double t) {
  Trajectory traj = io::load_trajectory(traj_dir);
  const std::size_t i = traj.index_of_time(t);
  const State& st = traj.states[i];
  const int k = std::min(8, traj.grid.n / 2 - 1);
  FrameFunctionals frame = solve_frame(st, traj.params, k);
  DecomposedState d = decompose_state(st, frame);

  const GridSpec& g = traj.grid;
  std::cout << "component";
  for (int dd = 0; dd < g.dim; ++dd) std::cout << ",xi_" << dd + 1;
  std::cout << ",re,im\n";
  auto emit = [&](const std::string& name, const ScalarField& f) {
    for (std::size_t p = 0; p < f.coeffs.size(); ++p) {
      if (f.coeffs[p] == Complex(0.0, 0.0)) continue;
      const auto xi = g.xi_of(p);
      std::cout << name;
      for (int dd = 0; dd < g.dim; ++dd) std::cout << ',' << xi[dd];
      std::cout << ',' << io::format_g17(f.coeffs[p].real()) << ','
                << io::format_g17(f.coeffs[p].imag()) << "\n";
    }
  };
  emit("l1", frame.l1);
  for (int dd = 0; dd < g.dim; ++dd) emit("l2_" + std::to_string(dd + 1), frame.l2[dd]);
  std::cout << "c";
  for (int dd = 0; dd < g.dim; ++dd) std::cout << ",0";
  std::cout << ',' << io::format_g17(d.c) << ",0\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudo-spectral laboratory for damped compressible flow on the torus"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run one experiment kind");
  std::string config_path;
  eulerlab::ExperimentConfig flags;
  run->add_option("--config", config_path, "JSON config file (flat keys)");
  run->add_option("--kind", flags.kind, "experiment kind");
  run->add_option("--dim", flags.dim, "space dimension (1-3)");
  run->add_option("--N", flags.n, "grid points per axis");
  run->add_option("--s", flags.s, "Sobolev index");
  run->add_option("--gamma", flags.gamma, "adiabatic exponent");
  run->add_option("--amplitude", flags.amplitude, "initial (s+1)-norm");
  run->add_option("--T-end", flags.t_end, "final time");
  run->add_option("--dt", flags.dt, "time step");
  run->add_option("--seed", flags.seed, "random seed");
  run->add_option("--K-frame", flags.k_frame, "frame truncation");
  run->add_option("--T-window", flags.t_window, "Picard window length");
  run->add_option("--output-dir", flags.output_dir, "output directory");

  // dump-symbol
  auto* dump = app.add_subcommand("dump-symbol", "print e^{tA(xi)} in snapshot text format");
  std::vector<int> xi;
  double t_sym = 0.0;
  dump->add_option("--xi", xi, "mode, 1 to 3 integers")->required();
  dump->add_option("--t", t_sym, "time")->required();

  // frame dump
  auto* frame = app.add_subcommand("frame", "moving-frame utilities");
  auto* fdump = frame->add_subcommand("dump", "emit l1, l2 rows and c(t) as CSV");
  std::string traj_dir;
  double t_frame = 0.0;
  fdump->add_option("--traj", traj_dir, "trajectory directory")->required();
  fdump->add_option("--t", t_frame, "sample time")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      std::vector<std::string> set_flags;
      for (const auto* opt : run->get_options())
        if (opt->count() > 0) set_flags.push_back(opt->get_name());
      return cmd_run(config_path, flags, set_flags);
    }
    if (dump->parsed()) return cmd_dump_symbol(xi, t_sym);
    if (frame->parsed() && fdump->parsed()) return cmd_frame_dump(traj_dir, t_frame);
    std::cerr << app.help();
    return 2;
  } catch (const eulerlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
