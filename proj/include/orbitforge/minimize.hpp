#pragma once

#include <string>
#include <vector>

#include "orbitforge/path.hpp"
#include "orbitforge/symmetry.hpp"
#include "orbitforge/types.hpp"

namespace orbitforge {

struct MinimizeOptions {
  int max_iterations = 800;
  double gtol = 1e-7;                 // on the full (unprojected) gradient
  double sufficient_decrease = 1e-4;  // Armijo constant
  double backtrack = 0.5;             // step shrink factor
  double dmin = 1e-3;                 // soft collision floor, fraction of scale
  int memory = 12;                    // quasi-Newton history length
  unsigned long seed = 0;
  int samples = 0;    // potential quadrature samples; 0 = max(256, 4*modes)
  int nodes = 0;      // fixed-ends/P12 interior nodes; 0 = 128
  bool throw_on_floor = false;  // throw CollisionFloor instead of reporting it
};

struct MinimizeReport {
  double action = 0.0;
  double grad_norm = 0.0;  // full unprojected gradient at termination
  int iterations = 0;
  double min_distance = 0.0;  // along the final path
  std::string termination;    // converged | max-iter | collision-floor
  std::vector<double> action_trace;  // accepted iterates, non-increasing
  unsigned long seed = 0;

  bool converged() const { return termination == "converged"; }
};

/// Quasi-Newton minimization of the loop action over the G-invariant,
/// center-of-mass-reduced coefficient space.  The initial loop is projected
/// regardless of its symmetry; every iterate stays invariant.  Groups that
/// permute bodies require equal masses.
std::pair<FourierLoop, MinimizeReport> minimize_loop(const MassSystem& ms,
                                                     const SymmetryGroup& G,
                                                     const FourierLoop& init,
                                                     const MinimizeOptions& opts);

/// Fixed-ends minimization over the interior nodes; the endpoints of init are
/// replaced by the given (reduced) configurations and never move.  Endpoint
/// collisions are admissible inputs; the soft distance floor monitors the
/// interior only.
std::pair<NodePath, MinimizeReport> minimize_fixed_ends(
    const MassSystem& ms, const Configuration& x_start,
    const Configuration& x_end, double duration, const NodePath& init,
    const MinimizeOptions& opts);

/// P12 minimization over [0, T/12]: three unit masses, endpoints free inside
/// the p12_constraint(u) symmetry sets (their gradient blocks are projected).
/// Starts from the rotating-triangle arc plus a vertical opening
/// perturbation.  Requires 0 <= u <= pi/6 for solving.
std::pair<NodePath, MinimizeReport> minimize_p12(const MassSystem& ms, double u,
                                                 double period,
                                                 const MinimizeOptions& opts);

/// Deterministic pseudo-random loop: coefficients decay geometrically in the
/// mode index, then the loop is G-averaged and center-of-mass reduced.
FourierLoop random_init(const MassSystem& ms, double period, unsigned long seed,
                        int modes, double amplitude, const SymmetryGroup& G);

struct MultistartResult {
  FourierLoop best;
  MinimizeReport best_report;
  std::vector<MinimizeReport> runs;  // in seed order
};

/// Runs minimize_loop from seeds seed, seed+1, ... and keeps the lowest final
/// action (ties broken by seed order).  Runs are independent; `threads` caps
/// the parallel fan-out and does not change the result.
MultistartResult multistart_minimize_loop(const MassSystem& ms,
                                          const SymmetryGroup& G, double period,
                                          int modes, double amplitude,
                                          const MinimizeOptions& opts,
                                          int starts, int threads = 1);

}  // namespace orbitforge
