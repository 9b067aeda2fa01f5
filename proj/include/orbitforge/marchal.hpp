#pragma once

#include "orbitforge/types.hpp"

namespace orbitforge {

/// Zero-energy homothetic ejection r(t) = gamma t^{2/3} c of the Kepler
/// problem with attraction constant kappa; gamma^3 = 9 kappa / 2.
struct ParabolicEjection {
  double gamma;
  Vector direction;  // unit vector
  double attraction = 1.0;
  double horizon = 1.0;  // domain [0, horizon]

  explicit ParabolicEjection(int dim = 3, double attraction = 1.0,
                             double horizon = 1.0);

  double radius(double t) const { return gamma * std::cbrt(t * t); }
  Vector position(double t) const { return radius(t) * direction; }
  Vector velocity(double t) const;

  /// Max over a uniform grid on (0, horizon] of |r'' + kappa r / |r|^3| with
  /// the derivatives taken analytically.
  double kepler_residual_max(int samples = 1000) const;

  /// Closed-form action of the ejection over [t1, t2] (Lagrangian
  /// |v|^2/2 + kappa/|r|): (4 gamma^2 / 3)(t2^{1/3} - t1^{1/3}), which is
  /// 6 (t2^{1/3} - t1^{1/3}) / gamma at unit attraction.
  double action_closed_form(double t1, double t2) const;
};

/// Shrinking/growing perturbation envelopes of the averaging argument.
struct PerturbationFamily {
  double rho = 0.0;
  double T = 1.0;       // ejection horizon, R(T) = 0
  double Tprime = 1.0;  // collision-side horizon for the growing envelope
  int dim = 3;          // 3: sphere, 2: weighted disk

  double R(double t) const { return (1.0 - t / T) * rho; }
  double Rprime(double t) const { return (1.0 + t / Tprime) * rho; }
};

/// Potential of a homogeneous hollow sphere of radius R and unit mass:
/// 1/R inside, 1/|r| outside.
double sphere_shell_potential(double r, double R);

/// Potential of the unit-mass disk of radius R carrying the projected sphere
/// density: pi/(2R) inside, arcsin(R/|r|)/R outside.
double disk_potential(double r, double R);

struct AveragedAction {
  double difference = 0.0;  // A_m - A, negative for small rho
  double t0 = 0.0;          // exit time, |r(t0)| = R(t0)
  double action = 0.0;      // A, the unperturbed ejection action over [0, T]
  double action_mean = 0.0; // A_m
};

/// Mean perturbed action minus the ejection action for the Kepler problem:
/// A_m - A = rho^2/(2T) + int_0^T [U0(|r(t)|, R(t)) - 1/|r(t)|] dt with the
/// closed-form hollow-sphere potential (dim 3; the integrand vanishes past
/// the exit time, so the value is exact).  In dim 2 the exterior excess of
/// the disk potential over 1/r is bounded through its cubic arcsin term,
/// giving the sharp (pi - 4)/gamma t0^{1/3} upper bound; the plain average
/// lies strictly below it, so negativity transfers.  Valid for
/// rho <= 0.1 gamma T^{2/3} (BadParams outside the window).
AveragedAction averaged_action_difference(int dim, double rho, double T,
                                          int panels = 96);

/// Action gain of the local vertical deformation r + eps phi(t) s over the
/// parabolic ejection, with phi = 1 on [0, eps^{3/2}], linear down to 0 over
/// the next eps, and s orthogonal to the ejection ray.  Positive for small
/// eps and scales like sqrt(eps).
double montgomery_deformation_gain(double epsilon, double T = 1.0,
                                   int panels = 96);

/// The p-body mean perturbed action bound for body k of the parabolic
/// homothetic ejection generated by the central configuration x0:
///   m_k rho^2 / (2T) + sum_{j != k} m_j m_k int_0^{t_jk} [1/R - 1/r_jk] dt.
/// Negative for small rho.  BadParams when rho leaves the validity window or
/// x0 is not central.
double nbody_averaged_bound(const Configuration& x0, const MassSystem& ms,
                            int k, double rho, double T, int panels = 96);

}  // namespace orbitforge
