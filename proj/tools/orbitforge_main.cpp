// orbitforge: action-minimizing n-body orbits from the command line.
//
// Subcommands: solve, verify, sweep-p12, marchal-demo, action-eval, plot.
// Exit codes: 0 success, 1 convergence/threshold failure, 2 input error.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "orbitforge/marchal.hpp"
#include "orbitforge/minimize.hpp"
#include "orbitforge/orbitio.hpp"
#include "orbitforge/symmetry.hpp"
#include "orbitforge/verify.hpp"

using namespace orbitforge;

namespace {

int thread_cap(int starts) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("ORBITFORGE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) hw = std::min(hw, cap);
  }
  return std::max(1, std::min(hw, starts));
}

std::string options_provenance(const SolveConfig& cfg) {
  nlohmann::json j;
  j["gtol"] = cfg.options.gtol;
  j["max_iterations"] = cfg.options.max_iterations;
  j["dmin"] = cfg.options.dmin;
  j["modes"] = cfg.modes;
  j["nodes"] = cfg.nodes;
  j["samples"] = cfg.options.samples;
  j["starts"] = cfg.starts;
  j["amplitude"] = cfg.amplitude;
  return j.dump();
}

int run_solve(const SolveConfig& cfg) {
  OrbitFile orbit;
  orbit.tool_version = ORBITFORGE_VERSION;
  orbit.system = cfg.system;
  orbit.seed = cfg.options.seed;
  orbit.options_json = options_provenance(cfg);

  MinimizeReport best;
  if (cfg.mode == "loop") {
    SymmetryGroup G = preset_group(cfg.symmetry, cfg.system.n(), cfg.system.dim);
    MultistartResult res = multistart_minimize_loop(
        cfg.system, G, cfg.period, cfg.modes, cfg.amplitude, cfg.options,
        cfg.starts, thread_cap(cfg.starts));
    orbit.representation = "fourier";
    orbit.loop = res.best;
    orbit.symmetry = cfg.symmetry;
    best = res.best_report;
    for (const auto& run : res.runs)
      std::cout << "seed " << run.seed << ": action " << run.action << " ("
                << run.termination << ")\n";
  } else if (cfg.mode == "p12") {
    auto [path, rep] = minimize_p12(cfg.system, cfg.u, cfg.period, cfg.options);
    orbit.representation = "nodes";
    orbit.path = path;
    orbit.symmetry = "p12";
    orbit.u = cfg.u;
    best = rep;
  } else if (cfg.mode == "fixed_ends") {
    if (!cfg.x_start || !cfg.x_end)
      throw BadParams("solve: fixed_ends mode needs x_start and x_end");
    Configuration xi(*cfg.x_start), xf(*cfg.x_end);
    NodePath init;
    init.duration = cfg.period;
    init.x_start = xi;
    init.x_end = xf;
    init.interior.resize(cfg.nodes);
    for (int k = 1; k <= cfg.nodes; ++k) {
      const double f = static_cast<double>(k) / (cfg.nodes + 1);
      init.interior[k - 1] = (1.0 - f) * xi.r + f * xf.r;
    }
    auto [path, rep] =
        minimize_fixed_ends(cfg.system, xi, xf, cfg.period, init, cfg.options);
    orbit.representation = "nodes";
    orbit.path = path;
    best = rep;
  } else {
    throw BadParams("solve: unknown mode '" + cfg.mode + "'");
  }

  write_orbit(orbit, cfg.out);
  std::cout << report_to_text(best) << "wrote " << cfg.out << "\n";
  return best.converged() ? 0 : 1;
}

struct VerifyThresholds {
  double max_closure = 1e-3;
  double max_drift = 1e-8;
  double max_lj = 1e-3;
  double max_defect = 1e-8;
  double min_distance = 1e-3;
};

int run_verify(const std::string& filename, const VerifyThresholds& th,
               long steps) {
  OrbitFile orbit = read_orbit(filename);
  const MassSystem& ms = orbit.system;
  bool ok = true;
  std::cout.precision(12);

  if (orbit.representation == "fourier") {
    const FourierLoop& loop = *orbit.loop;
    const double closure = closure_error(ms, loop, steps);

    PhaseState s0{Configuration(loop.position_at(0.0)), loop.velocity_at(0.0)};
    Trajectory traj = integrate(ms, s0, loop.period,
                                steps > 0 ? steps : 100000, 100);
    auto H = energy_series(traj, ms);
    double drift = 0.0;
    for (double h : H)
      drift = std::max(drift, std::abs(h - H[0]) / std::max(1.0, std::abs(H[0])));
    auto lj = lagrange_jacobi_residual(traj.states, traj.dt, ms);
    double lj_max = 0.0;
    for (double r : lj) lj_max = std::max(lj_max, std::abs(r));

    double defect = 0.0;
    if (!orbit.symmetry.empty() && orbit.symmetry != "p12") {
      SymmetryGroup G = preset_group(orbit.symmetry, ms.n(), ms.dim);
      defect = invariance_defect(G, loop, ms);
    }
    const MinDistance md = min_pairwise_distance(loop, QuadratureSpec{512});

    std::cout << "closure_error      " << closure << "\n"
              << "energy_drift       " << drift << "\n"
              << "lagrange_jacobi    " << lj_max << "\n"
              << "invariance_defect  " << defect << "\n"
              << "min_distance       " << md.value << " at t = " << md.time
              << " pair (" << md.body_a << "," << md.body_b << ")\n";
    ok = closure <= th.max_closure && drift <= th.max_drift &&
         lj_max <= th.max_lj && defect <= th.max_defect &&
         md.value >= th.min_distance;
  } else {
    const NodePath& path = *orbit.path;
    const double h = path.spacing();
    double el = 0.0;
    for (int k = 1; k <= path.nodes(); ++k) {
      const Matrix sd =
          (path.node(k + 1) - 2.0 * path.node(k) + path.node(k - 1)) / (h * h);
      el = std::max(el, (sd - grad_potential(Configuration(path.node(k)), ms).r)
                            .cwiseAbs()
                            .maxCoeff());
    }
    const MinDistance md = min_pairwise_distance(path, QuadratureSpec{512});
    std::cout << "action             " << action(path, ms) << "\n"
              << "euler_lagrange     " << el << "\n"
              << "min_distance       " << md.value << "\n";
    ok = el <= th.max_lj / h && md.value >= th.min_distance;
  }
  std::cout << (ok ? "verify: PASS\n" : "verify: FAIL\n");
  return ok ? 0 : 1;
}

int run_sweep(double u_min, double u_max, int count, double T, int nodes,
              const std::string& out) {
  if (count < 0 || u_min < 0.0 || u_max > M_PI / 6.0 + 1e-12 || u_max < u_min)
    throw BadParams("sweep-p12: grid must sit inside [0, pi/6]");
  std::ofstream os(out);
  if (!os) throw Error("sweep-p12: cannot open " + out);
  os.precision(17);
  os << "u,action,bound,planarity,hessian_sign,min_distance,termination,"
        "start_r01,start_r02,start_r12,end_r01,end_r02,end_r12\n";
  MassSystem ms = MassSystem::equal(3, 3);
  for (int i = 0; i < count; ++i) {
    const double u =
        count == 1 ? u_min : u_min + (u_max - u_min) * i / (count - 1);
    MinimizeOptions opts;
    opts.nodes = nodes;
    opts.max_iterations = 4000;
    auto [path, rep] = minimize_p12(ms, u, T, opts);

    // Planarity: smallest/largest principal extent of the position cloud.
    const int samples = path.nodes() + 2;
    Matrix cloud(3 * samples, 3);
    for (int k = 0; k < samples; ++k) cloud.block(3 * k, 0, 3, 3) = path.node(k);
    cloud.rowwise() -= cloud.colwise().mean();
    Eigen::JacobiSVD<Matrix> svd(cloud);
    const double planarity = svd.singularValues()[2] / svd.singularValues()[0];

    const double hess = p12_hessian_along_xi(u, T, std::max(64, nodes));
    auto dists = [](const Matrix& x) {
      return std::array<double, 3>{(x.row(0) - x.row(1)).norm(),
                                   (x.row(0) - x.row(2)).norm(),
                                   (x.row(1) - x.row(2)).norm()};
    };
    auto ds = dists(path.x_start.r);
    auto de = dists(path.x_end.r);
    os << u << ',' << rep.action << ',' << p12_action_bound(u, T) << ','
       << planarity << ',' << (hess < 0.0 ? -1 : 1) << ',' << rep.min_distance
       << ',' << rep.termination << ',' << ds[0] << ',' << ds[1] << ','
       << ds[2] << ',' << de[0] << ',' << de[1] << ',' << de[2] << "\n";
  }
  std::cout << "wrote " << out << "\n";
  return 0;
}

int run_marchal_demo(int dim, std::vector<double> rhos, double rho0,
                     int halvings, double T, const std::string& out) {
  if (rhos.empty()) {
    double rho = rho0 > 0.0 ? rho0 : 0.05 * std::cbrt(4.5) * std::cbrt(T * T);
    for (int i = 0; i <= halvings; ++i, rho *= 0.5) rhos.push_back(rho);
  }
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out.empty()) {
    file.open(out);
    if (!file) throw Error("marchal-demo: cannot open " + out);
    os = &file;
  }
  os->precision(17);
  *os << "rho,t0,action,action_mean,difference,normalized\n";
  const double gamma = std::cbrt(4.5);
  for (double rho : rhos) {
    AveragedAction res = averaged_action_difference(dim, rho, T);
    const double normalized = -res.difference * gamma / std::cbrt(res.t0);
    *os << rho << ',' << res.t0 << ',' << res.action << ',' << res.action_mean
        << ',' << res.difference << ',' << normalized << "\n";
  }
  if (!out.empty()) std::cout << "wrote " << out << "\n";
  return 0;
}

int run_action_eval(const std::string& filename, int samples) {
  OrbitFile orbit = read_orbit(filename);
  const MassSystem& ms = orbit.system;
  std::cout.precision(17);
  if (orbit.representation == "fourier") {
    const FourierLoop& loop = *orbit.loop;
    QuadratureSpec quad{std::max(samples, 4 * loop.modes)};
    std::cout << "action        " << action(loop, ms, quad) << "\n"
              << "grad_norm     " << action_gradient(loop, ms, quad).norm()
              << "\n"
              << "min_distance  " << min_pairwise_distance(loop, quad).value
              << "\n";
    if (!orbit.symmetry.empty() && orbit.symmetry != "p12") {
      SymmetryGroup G = preset_group(orbit.symmetry, ms.n(), ms.dim);
      std::cout << "invariance_defect " << invariance_defect(G, *orbit.loop, ms)
                << "\n";
    }
  } else {
    const NodePath& path = *orbit.path;
    std::cout << "action        " << action(path, ms) << "\n"
              << "grad_norm     " << action_gradient(path, ms).norm() << "\n"
              << "min_distance  "
              << min_pairwise_distance(path, QuadratureSpec{512}).value << "\n";
  }
  return 0;
}

// Sampled positions of either representation on a uniform grid.
std::vector<Matrix> sample_positions(const OrbitFile& orbit, int samples,
                                     std::vector<double>& times) {
  std::vector<Matrix> out;
  times.clear();
  if (orbit.representation == "fourier") {
    const FourierLoop& loop = *orbit.loop;
    for (int j = 0; j <= samples; ++j) {
      const double t = loop.period * j / samples;
      times.push_back(t);
      out.push_back(loop.position_at(t));
    }
  } else {
    const NodePath& path = *orbit.path;
    for (int j = 0; j <= samples; ++j) {
      const double t = path.duration * j / samples;
      times.push_back(t);
      out.push_back(path.position_at(t));
    }
  }
  return out;
}

int run_plot(const std::string& filename, const std::string& prefix,
             int samples) {
  OrbitFile orbit = read_orbit(filename);
  std::vector<double> times;
  std::vector<Matrix> pos = sample_positions(orbit, samples, times);
  const int n = orbit.system.n();
  const int d = orbit.system.dim;

  std::ofstream csv(prefix + ".csv");
  if (!csv) throw Error("plot: cannot open " + prefix + ".csv");
  csv.precision(17);
  csv << (d == 3 ? "t,body,x,y,z\n" : "t,body,x,y\n");
  for (size_t j = 0; j < pos.size(); ++j)
    for (int i = 0; i < n; ++i) {
      csv << times[j] << ',' << i << ',' << pos[j](i, 0) << ',' << pos[j](i, 1);
      if (d == 3) csv << ',' << pos[j](i, 2);
      csv << "\n";
    }

  // Static SVG of the xy projection, one polyline per body.
  double lo = 1e30, hi = -1e30;
  for (const Matrix& m : pos) {
    lo = std::min(lo, m.leftCols(2).minCoeff());
    hi = std::max(hi, m.leftCols(2).maxCoeff());
  }
  const double pad = 0.05 * (hi - lo + 1e-12);
  lo -= pad;
  hi += pad;
  const double span = hi - lo;
  const int px = 640;
  auto X = [&](double v) { return (v - lo) / span * px; };
  auto Y = [&](double v) { return px - (v - lo) / span * px; };
  static const char* palette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                  "#66a61e", "#e6ab02", "#a6761d", "#666666"};
  std::ofstream svg(prefix + ".svg");
  if (!svg) throw Error("plot: cannot open " + prefix + ".svg");
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px
      << "\" height=\"" << px << "\" viewBox=\"0 0 " << px << ' ' << px
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int i = 0; i < n; ++i) {
    svg << "<polyline fill=\"none\" stroke=\"" << palette[i % 8]
        << "\" stroke-width=\"1.5\" points=\"";
    for (const Matrix& m : pos) svg << X(m(i, 0)) << ',' << Y(m(i, 1)) << ' ';
    svg << "\"/>\n";
  }
  svg << "</svg>\n";
  std::cout << "wrote " << prefix << ".csv and " << prefix << ".svg\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orbitforge: action-minimizing n-body orbits"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "minimize the action per a config");
  std::string config_path, out_override, symmetry_override;
  long seed_override = -1;
  int modes_override = 0, samples_override = 0;
  double u_override = -1.0;
  solve->add_option("--config", config_path, "JSON config file")->required();
  solve->add_option("--out", out_override, "output orbit file");
  solve->add_option("--seed", seed_override, "override the base seed");
  solve->add_option("--modes", modes_override, "override the mode count");
  solve->add_option("--samples", samples_override, "override quadrature samples");
  solve->add_option("--symmetry", symmetry_override, "override the preset");
  solve->add_option("--u", u_override, "override the P12 angle");

  // verify
  auto* verify = app.add_subcommand("verify", "check an orbit file");
  std::string verify_orbit;
  VerifyThresholds th;
  long verify_steps = 0;
  verify->add_option("orbit", verify_orbit, "orbit file")->required();
  verify->add_option("--steps", verify_steps, "integrator steps");
  verify->add_option("--max-closure", th.max_closure, "closure threshold");
  verify->add_option("--max-drift", th.max_drift, "energy drift threshold");
  verify->add_option("--max-lj", th.max_lj, "Lagrange-Jacobi threshold");
  verify->add_option("--max-defect", th.max_defect, "invariance threshold");
  verify->add_option("--min-distance", th.min_distance, "distance floor");

  // sweep-p12
  auto* sweep = app.add_subcommand("sweep-p12", "P12 family sweep over u");
  double u_min = 0.0, u_max = M_PI / 6.0, sweep_T = 12.0;
  int u_count = 7, sweep_nodes = 96;
  std::string sweep_out = "p12_sweep.csv";
  sweep->add_option("--u-min", u_min, "lowest u");
  sweep->add_option("--u-max", u_max, "highest u");
  sweep->add_option("--count", u_count, "grid size");
  sweep->add_option("--T", sweep_T, "full period");
  sweep->add_option("--nodes", sweep_nodes, "interior nodes");
  sweep->add_option("--out", sweep_out, "CSV output");

  // marchal-demo
  auto* demo = app.add_subcommand("marchal-demo", "averaging-constant table");
  int demo_dim = 3, demo_halvings = 6;
  double demo_T = 1.0, demo_rho0 = 0.0;
  std::vector<double> demo_rhos;
  std::string demo_out;
  demo->add_option("--dim", demo_dim, "2 or 3");
  demo->add_option("--rho", demo_rhos, "explicit rho list")->delimiter(',');
  demo->add_option("--rho0", demo_rho0, "ladder start (default 0.05 gamma T^{2/3})");
  demo->add_option("--halvings", demo_halvings, "ladder halvings");
  demo->add_option("--T", demo_T, "ejection horizon");
  demo->add_option("--out", demo_out, "CSV output (stdout when omitted)");

  // action-eval
  auto* aeval = app.add_subcommand("action-eval", "action and gradient of an orbit");
  std::string aeval_orbit;
  int aeval_samples = 256;
  aeval->add_option("orbit", aeval_orbit, "orbit file")->required();
  aeval->add_option("--samples", aeval_samples, "quadrature samples");

  // plot
  auto* plot = app.add_subcommand("plot", "CSV + SVG of the trajectories");
  std::string plot_orbit, plot_prefix = "orbit";
  int plot_samples = 512;
  plot->add_option("orbit", plot_orbit, "orbit file")->required();
  plot->add_option("--out", plot_prefix, "output prefix");
  plot->add_option("--samples", plot_samples, "samples per body");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      SolveConfig cfg = read_solve_config(config_path);
      if (!out_override.empty()) cfg.out = out_override;
      if (seed_override >= 0) cfg.options.seed = seed_override;
      if (modes_override > 0) cfg.modes = modes_override;
      if (samples_override > 0) cfg.options.samples = samples_override;
      if (!symmetry_override.empty()) cfg.symmetry = symmetry_override;
      if (u_override >= 0.0) cfg.u = u_override;
      return run_solve(cfg);
    }
    if (*verify) return run_verify(verify_orbit, th, verify_steps);
    if (*sweep)
      return run_sweep(u_min, u_max, u_count, sweep_T, sweep_nodes, sweep_out);
    if (*demo)
      return run_marchal_demo(demo_dim, demo_rhos, demo_rho0, demo_halvings,
                              demo_T, demo_out);
    if (*aeval) return run_action_eval(aeval_orbit, aeval_samples);
    if (*plot) return run_plot(plot_orbit, plot_prefix, plot_samples);
  } catch (const CollisionFloor& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const BadParams& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
