#pragma once

#include <string>
#include <vector>

#include "orbitforge/path.hpp"
#include "orbitforge/types.hpp"

namespace orbitforge {

/// Exact rational multiple of the period, kept as a fraction so repeated
/// composition of time shifts never accumulates roundoff.
struct TimeShift {
  long num = 0;
  long den = 1;

  TimeShift() = default;
  TimeShift(long n, long d);

  double value() const { return static_cast<double>(num) / den; }  // in [0,1)
  bool operator==(const TimeShift& o) const { return num == o.num && den == o.den; }
};

/// One symmetry of loop space: (g.x)_i(t) = rho * x_{perm[i]}(eps (t - shift T)).
/// A loop is invariant under g exactly when x(eps t + shift T) = alpha_g(x(t))
/// with alpha_g(x)_i = rho x_{perm[i]}.
struct SymmetryElement {
  Matrix rho;             // d x d orthogonal
  std::vector<int> perm;  // target body i reads from body perm[i]
  int time_sign = 1;      // +1 or -1
  TimeShift shift;        // fraction of the period

  static SymmetryElement identity(int nbody, int dim);
  SymmetryElement compose(const SymmetryElement& h) const;  // this after h
  SymmetryElement inverse() const;
  bool same_as(const SymmetryElement& o, double tol = 1e-9) const;
  bool permutes_bodies() const;
};

/// Finite group acting on loop space; the element list is complete and closed
/// (verified on construction).
struct SymmetryGroup {
  std::string name;
  std::vector<SymmetryElement> elements;  // identity included

  int order() const { return static_cast<int>(elements.size()); }
  bool permutes_bodies() const;
  /// True when every element of the candidate appears in this group.
  bool contains(const SymmetryGroup& sub, double tol = 1e-9) const;
};

/// Generate the group closure of a set of generators.  Throws BadParams if
/// the closure exceeds max_order (guards against inexact generators).
SymmetryGroup generate_group(const std::string& name,
                             const std::vector<SymmetryElement>& generators,
                             int nbody, int dim, int max_order = 256);

/// (g.x) computed exactly on Fourier coefficients: time shifts act as phase
/// rotations, time reversal flips the sine block, the isometry and the body
/// permutation act on rows.
FourierLoop apply_element(const SymmetryElement& g, const FourierLoop& loop);

/// |G|^{-1} sum_g g.x — the linear idempotent projector onto invariant loops.
FourierLoop group_average(const SymmetryGroup& G, const FourierLoop& loop);

/// Max over g and a sample grid of the mass-metric distance between (g.x)(t)
/// and x(t); zero (numerically) iff the loop is invariant on the grid.
double invariance_defect(const SymmetryGroup& G, const FourierLoop& loop,
                         const MassSystem& ms, int samples = 96);

enum class PresetGroup { choreography, italian, d6_eight, z6, d3 };

/// Named groups:
///   choreography(n): cyclic permutation with shift T/n (order n);
///   italian: x(t + T/2) = -x(t) (order 2);
///   d6_eight: the 3-body D6 action in R^3 (order 12), generated by
///     s = (reflection through the horizontal plane, bodies rotated, t + T/6)
///     and sigma = (half-turn about the horizontal axis, swap bodies 1 and 2,
///     t -> -t);
///   z6 = <s> (order 6) and d3 = <s^2, sigma> (order 6).
SymmetryGroup preset_group(PresetGroup which, int nbody, int dim);
SymmetryGroup preset_group(const std::string& name, int nbody, int dim);

/// One configuration-space involution x -> (rho x_{perm[i]})_i.
struct ConfigInvolution {
  Matrix rho;
  std::vector<int> perm;

  Matrix apply(const Matrix& x) const;
  Matrix project(const Matrix& x) const { return 0.5 * (x + apply(x)); }
  double defect(const Matrix& x) const { return (apply(x) - x).norm(); }
};

/// Mixed reflection boundary conditions of the P12 family over [0, T/12]:
/// at t = 0 the configuration is invariant under the half-turn about the
/// horizontal line (body 0 on it, bodies 1 and 2 swapped); at t = T/12 it is
/// invariant under the reflection through the vertical plane at angle u to
/// that line (body 2 in it, bodies 0 and 1 swapped).
struct BoundaryConstraint {
  ConfigInvolution start;
  ConfigInvolution end;
  double u = 0.0;
};

/// Valid for 0 <= u <= pi/3; the solvable family lives in [0, pi/6].
BoundaryConstraint p12_constraint(double u);

}  // namespace orbitforge
