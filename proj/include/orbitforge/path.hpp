#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "orbitforge/dynamics.hpp"
#include "orbitforge/types.hpp"

namespace orbitforge {

/// Truncated trigonometric series for a periodic loop of n bodies.
///
/// Coefficients are stored one row per (body, axis) pair in body-major,
/// axis-minor order; each row holds [constant, cos_1..cos_m, sin_1..sin_m],
/// so the row-major flattening is exactly the serialized layout.
struct FourierLoop {
  int nbody = 0;
  int dim = 0;
  int modes = 0;
  double period = 0.0;
  Matrix coeff;  // (nbody*dim) x (1 + 2*modes)

  FourierLoop() = default;
  FourierLoop(int nbody, int dim, int modes, double period);

  int rows() const { return nbody * dim; }
  int cols() const { return 1 + 2 * modes; }
  int row_of(int body, int axis) const { return body * dim + axis; }

  Matrix position_at(double t) const;  // n x dim
  Matrix velocity_at(double t) const;  // termwise derivative

  Vector flatten() const;
  static FourierLoop from_flat(const Vector& data, int nbody, int dim, int modes,
                               double period);

  /// Subtract the mass-weighted mean of every coefficient column so the loop
  /// is centered at every instant.
  void mass_balance(const MassSystem& ms);

  /// Copy extended (or truncated) to a new mode count.
  FourierLoop with_modes(int new_modes) const;
};

/// Piecewise-linear fixed-ends path: endpoints plus N interior nodes on the
/// uniform grid t_k = k T/(N+1).
struct NodePath {
  Configuration x_start;
  Configuration x_end;
  std::vector<Matrix> interior;  // N matrices, each n x dim
  double duration = 0.0;

  int nbody() const { return x_start.n(); }
  int dim() const { return x_start.dim(); }
  int nodes() const { return static_cast<int>(interior.size()); }
  double spacing() const { return duration / (nodes() + 1); }

  /// Node k for k = 0..N+1 with the endpoints at k = 0 and k = N+1.
  const Matrix& node(int k) const;

  Matrix position_at(double t) const;  // OutOfRange outside [0, T]
  Matrix velocity_at(double t) const;  // slope of the active segment
};

/// Uniform sample count for potential quadrature.  FourierLoop requires
/// samples >= 4 * modes (anti-aliasing floor); the kinetic term never uses
/// the grid (closed-form spectral sum for loops, exact segment sums for
/// nodal paths).
struct QuadratureSpec {
  int samples = 256;
};

std::pair<Matrix, Matrix> eval_path(const FourierLoop& loop, double t);
std::pair<Matrix, Matrix> eval_path(const NodePath& path, double t);

/// Discretized action of a loop over one period: exact spectral kinetic term
/// plus uniform-grid potential quadrature.
double action(const FourierLoop& loop, const MassSystem& ms,
              const QuadratureSpec& quad);

/// Discretized action of a nodal path: exact piecewise-linear kinetic term
/// plus trapezoid potential sum on the node grid.  An endpoint at an exact
/// collision contributes no potential term (the endpoint singularity of the
/// true integrand is integrable).
double action(const NodePath& path, const MassSystem& ms);

/// Gradient of the loop action with respect to every coefficient, in
/// flatten() layout.
Vector action_gradient(const FourierLoop& loop, const MassSystem& ms,
                       const QuadratureSpec& quad);

/// Gradient of the nodal action with respect to the interior nodes only
/// (endpoints are fixed), flattened node-major.
Vector action_gradient(const NodePath& path, const MassSystem& ms);

/// Gradient blocks of the nodal action with respect to the two endpoint
/// configurations (used when endpoints are decision variables).
std::pair<Matrix, Matrix> action_endpoint_gradient(const NodePath& path,
                                                   const MassSystem& ms);

/// The rescaling x^lambda(t) = lambda^{-2/3} x(lambda t).  For a loop the
/// period becomes T/lambda; for a nodal path the node values rescale and the
/// duration becomes T/lambda (node times map exactly onto the old grid).
FourierLoop blow_up(const FourierLoop& loop, double lambda);
NodePath blow_up(const NodePath& path, double lambda);

struct MinDistance {
  double value = 0.0;
  double time = 0.0;
  int body_a = 0;
  int body_b = 0;
};

/// Minimum pairwise distance over the quadrature samples, with argmin data.
MinDistance min_pairwise_distance(const FourierLoop& loop,
                                  const QuadratureSpec& quad);
MinDistance min_pairwise_distance(const NodePath& path,
                                  const QuadratureSpec& quad);

/// A time-parametrized path given by closed-form position and velocity.
using PathFn = std::function<std::pair<Matrix, Matrix>(double)>;

/// Action integral of an arbitrary smooth path over [t0, t1] by composite
/// Gauss-Legendre quadrature (panels x npts nodes).
double action_quadrature(const PathFn& path, const MassSystem& ms, double t0,
                         double t1, int panels = 64, int npts = 8);

/// Action of a loop restricted to [t0, t1] (quadrature for both terms).
double action_on_interval(const FourierLoop& loop, const MassSystem& ms,
                          double t0, double t1, int panels = 64, int npts = 8);

/// Nodes and weights of the npts-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int npts, std::vector<double>& nodes,
                    std::vector<double>& weights);

}  // namespace orbitforge
