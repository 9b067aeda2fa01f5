#pragma once

#include <vector>

#include "orbitforge/types.hpp"

namespace orbitforge {

/// Default relative collision threshold: pairwise distances below
/// eps * configuration_scale raise CollisionError.
inline constexpr double kCollisionEps = 1e-12;

/// Newtonian potential function U = sum_{i<j} m_i m_j / |r_i - r_j|.
/// Strictly positive; throws CollisionError when a pairwise distance falls
/// below eps_coll * configuration scale.
double potential(const Configuration& cfg, const MassSystem& ms,
                 double eps_coll = kCollisionEps);

/// Gradient of U for the mass metric, i.e. the per-body acceleration field:
/// component i is sum_{j != i} m_j (r_j - r_i) / |r_j - r_i|^3.
/// The mass-weighted sum of the components vanishes (momentum conservation).
Configuration grad_potential(const Configuration& cfg, const MassSystem& ms,
                             double eps_coll = kCollisionEps);

/// I = x.x, J = x.y, K = y.y in the mass metric, plus U, H = K/2 - U and
/// L = K/2 + U.
InvariantSet scalar_invariants(const PhaseState& state, const MassSystem& ms,
                               double eps_coll = kCollisionEps);

/// Translate so the mass-weighted centroid sits at the origin.  Idempotent;
/// pairwise distances are unchanged.
Configuration reduce_to_center_of_mass(const Configuration& cfg,
                                       const MassSystem& ms);

enum class PresetKind { equilateral, euler_collinear, regular_ngon, isosceles };

struct PresetParams {
  int n = 3;            // body count
  int dim = 2;          // ambient dimension (z = 0 padding when 3)
  double scale = 1.0;   // side / spacing / circumradius / base, per kind
  double aspect = 1.0;  // isosceles only: height / base
};

/// Centered configuration of the requested shape.  equilateral and isosceles
/// require n = 3; euler_collinear places n >= 2 equally spaced bodies on the
/// x-axis; regular_ngon puts n bodies on a circle of radius scale.
Configuration preset_configuration(PresetKind kind, const PresetParams& params,
                                   const MassSystem& ms);

/// Relative residual of the central-configuration equation
/// grad U(x) = -(U/I) x; vanishes exactly on central configurations.
double centrality_residual(const Configuration& cfg, const MassSystem& ms);

/// Lagrange-Jacobi residual Idd(t) - 4 H(t) - 2 U(t) along a trajectory
/// sampled on a uniform grid with spacing dt.  Idd comes from second-order
/// central differences of I(t); the returned series covers interior samples.
/// Throws GridError for fewer than 3 samples.
std::vector<double> lagrange_jacobi_residual(const std::vector<PhaseState>& traj,
                                             double dt, const MassSystem& ms);

}  // namespace orbitforge
