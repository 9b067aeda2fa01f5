#pragma once

#include <vector>

#include "orbitforge/dynamics.hpp"
#include "orbitforge/path.hpp"
#include "orbitforge/types.hpp"

namespace orbitforge {

struct IntegratorStats {
  int order = 5;
  double step = 0.0;
  long steps = 0;
};

/// States on a uniform time grid produced by the integrator.
struct Trajectory {
  double t0 = 0.0;
  double dt = 0.0;  // spacing of the stored grid
  std::vector<PhaseState> states;
  IntegratorStats stats;
};

/// Fixed-step explicit Runge-Kutta (Dormand-Prince 5(4) pair) for the n-body
/// equations.  Aborts with CloseApproach when a stage hits the collision
/// threshold.  store_every thins the stored grid; the step size is T/steps.
Trajectory integrate(const MassSystem& ms, const PhaseState& s0, double T,
                     long steps, long store_every = 1);

/// Final state only (no storage).
PhaseState integrate_final(const MassSystem& ms, const PhaseState& s0, double T,
                           long steps);

/// Integrate the loop's t = 0 state over one period and return the mass-metric
/// phase distance back to the start, normalized by the loop amplitude.
/// Certifies that a minimizer is a genuine periodic solution.
double closure_error(const MassSystem& ms, const FourierLoop& loop,
                     long steps = 0);

std::vector<double> energy_series(const Trajectory& traj, const MassSystem& ms);

/// H_mu(t): kinetic energy of the cluster bodies relative to the cluster
/// centroid plus the internal potential.  cluster = all bodies gives H.
std::vector<double> cluster_energy(const Trajectory& traj, const MassSystem& ms,
                                   const std::vector<int>& cluster);

/// Second central difference (A(x+h v) - 2A(x) + A(x-h v)) / h^2 of the
/// discretized action along a path-shaped variation.
double hessian_form(const FourierLoop& path, const FourierLoop& variation,
                    double h, const MassSystem& ms, const QuadratureSpec& quad);
double hessian_form(const NodePath& path, const NodePath& variation, double h,
                    const MassSystem& ms);

/// Uniformly rotating rigid solution of a planar central configuration,
/// rescaled so its period is exactly T; exact as a one-mode loop.
/// Throws BadParams when x0 is not (numerically) central.
FourierLoop relative_equilibrium_loop(const Configuration& x0,
                                      const MassSystem& ms, double T);

/// U-tilde = I^{1/2} U, whose critical points are the central configurations.
double scaled_potential(const Configuration& cfg, const MassSystem& ms);

/// Second directional derivative of U-tilde along the vertical shape vector
/// z0 (one entry per body), by central differences.
double scaled_potential_vertical_d2(const Configuration& x0,
                                    const MassSystem& ms, const Vector& z0);

struct HessianIdentity {
  double lhs = 0.0;    // finite-difference Hessian of the action
  double rhs = 0.0;    // I0^{-1/2} d2U~(x0)(z0,z0) * T/2
  double scale = 0.0;  // magnitude of the kinetic term, for relative checks
};

/// Both sides of the vertical second-variation identity on the relative
/// equilibrium of a planar central configuration, with variation
/// z(t) = z0 cos(2 pi t / T) normal to the plane.  z0 must have mass-weighted
/// mean zero (uniform vertical shifts are center-of-mass modes).
HessianIdentity vertical_hessian_identity(const Configuration& x0,
                                          const MassSystem& ms, const Vector& z0,
                                          double T);

/// Searches a basis of mean-zero vertical variations and returns the one with
/// the smallest Rayleigh quotient of d2U~; quotient reported alongside.
std::pair<Vector, double> most_negative_vertical(const Configuration& x0,
                                                 const MassSystem& ms);

/// Closed-form action of the rotating equilateral arc over T/12 with total
/// rotation pi/3 and unit masses.
double a2_hat(double T);

/// A(u) = a2_hat(T) [3/pi (pi/3 - u)]^{2/3}: action of the rotating triangle
/// arc whose rotation over T/12 is pi/3 - u.  Valid for 0 <= u <= pi/3.
double p12_action_bound(double u, double T);

/// The horizontal rotating-triangle arc over [0, T/12]: three unit masses,
/// rotation pi/3 - u clockwise, body 0 on the x-axis at t = 0; satisfies the
/// p12_constraint(u) endpoint conditions.  Closed form, sampled on N interior
/// nodes.  Degenerate (BadParams) at u = pi/3.
NodePath lagrange_arc_p12(double u, double T, int nodes);

/// The vertical variation sin(2 pi t/T + 2 pi i/3) e_z restricted to
/// [0, T/12], sampled like lagrange_arc_p12; admissible for the P12 endpoint
/// constraints at every u.
NodePath p12_vertical_variation(double T, int nodes);

/// Finite-difference Hessian of the Lagrange arc along the vertical opening
/// variation, as a function of u.  Negative below the Lagrange angle pi/6,
/// positive above it.
double p12_hessian_along_xi(double u, double T, int nodes = 192,
                            double h = 1e-4);

/// Bisection for the sign change of p12_hessian_along_xi on [lo, hi].
double p12_hessian_sign_flip(double lo, double hi, double T, double utol = 1e-4,
                             int nodes = 192);

}  // namespace orbitforge
