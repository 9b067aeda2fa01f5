#pragma once

#include <Eigen/Dense>

#include "orbitforge/errors.hpp"

namespace orbitforge {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Masses and ambient dimension of an n-body system.  Units follow the
/// gravitational convention G = 1 throughout the library.
struct MassSystem {
  Vector masses;  // n positive masses
  int dim = 2;    // 2 or 3

  MassSystem() = default;
  MassSystem(Vector m, int dim_) : masses(std::move(m)), dim(dim_) {
    if (masses.size() < 2) throw BadParams("MassSystem: need at least 2 bodies");
    if ((masses.array() <= 0.0).any())
      throw BadParams("MassSystem: masses must be positive");
    if (dim != 2 && dim != 3) throw BadParams("MassSystem: dim must be 2 or 3");
  }

  /// n equal unit masses.
  static MassSystem equal(int n, int dim) {
    return MassSystem(Vector::Ones(n), dim);
  }

  int n() const { return static_cast<int>(masses.size()); }
  double total_mass() const { return masses.sum(); }
};

/// Positions of n bodies, one row per body.
struct Configuration {
  Matrix r;  // n x dim

  Configuration() = default;
  explicit Configuration(Matrix positions) : r(std::move(positions)) {}

  int n() const { return static_cast<int>(r.rows()); }
  int dim() const { return static_cast<int>(r.cols()); }
};

/// Positions and velocities of n bodies.
struct PhaseState {
  Configuration q;
  Matrix v;  // n x dim

  PhaseState() = default;
  PhaseState(Configuration q_, Matrix v_) : q(std::move(q_)), v(std::move(v_)) {}
};

/// The basic isometry invariants: moment of inertia I, its half-derivative J,
/// twice the kinetic energy K, potential U, energy H = K/2 - U and
/// Lagrangian value L = K/2 + U.
struct InvariantSet {
  double I = 0.0;
  double J = 0.0;
  double K = 0.0;
  double U = 0.0;
  double H = 0.0;
  double L = 0.0;
};

/// Mass-weighted centroid of a configuration (a point in R^dim).
inline Eigen::RowVectorXd mass_centroid(const Matrix& r, const MassSystem& ms) {
  if (r.rows() != ms.n()) throw DimMismatch("mass_centroid: body count mismatch");
  return (ms.masses.transpose() * r) / ms.total_mass();
}

/// Mass scalar product of two configuration-shaped matrices, with the
/// centroids removed as the metric requires.
inline double mass_dot(const Matrix& a, const Matrix& b, const MassSystem& ms) {
  Eigen::RowVectorXd ga = mass_centroid(a, ms);
  Eigen::RowVectorXd gb = mass_centroid(b, ms);
  double acc = 0.0;
  for (int i = 0; i < ms.n(); ++i)
    acc += ms.masses[i] * (a.row(i) - ga).dot(b.row(i) - gb);
  return acc;
}

inline double mass_norm(const Matrix& a, const MassSystem& ms) {
  return std::sqrt(std::max(0.0, mass_dot(a, a, ms)));
}

/// Characteristic length of a configuration, used to scale collision
/// thresholds and finite-difference steps.
inline double configuration_scale(const Matrix& r) {
  double s = r.cwiseAbs().maxCoeff();
  return s > 0.0 ? s : 1.0;
}

}  // namespace orbitforge
