#pragma once

#include <stdexcept>
#include <string>

namespace orbitforge {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BadParams : public Error {
 public:
  using Error::Error;
};

class DimMismatch : public Error {
 public:
  using Error::Error;
};

class GridError : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Evaluation was requested at (or numerically indistinguishable from) a
/// collision configuration.  Carries the offending sample time (NaN when the
/// context has no time axis) and body pair.
class CollisionError : public Error {
 public:
  CollisionError(const std::string& what, double time, int body_a, int body_b,
                 double distance)
      : Error(what), time(time), body_a(body_a), body_b(body_b),
        distance(distance) {}

  double time;
  int body_a;
  int body_b;
  double distance;
};

/// The line search could not find an admissible step above the soft
/// minimum-distance floor: the iterate is being dragged toward a collision.
class CollisionFloor : public Error {
 public:
  CollisionFloor(const std::string& what, double min_distance, double floor)
      : Error(what), min_distance(min_distance), floor(floor) {}

  double min_distance;
  double floor;
};

/// Numerical integration approached a collision and aborted.
class CloseApproach : public Error {
 public:
  CloseApproach(const std::string& what, double time)
      : Error(what), time(time) {}

  double time;
};

}  // namespace orbitforge
