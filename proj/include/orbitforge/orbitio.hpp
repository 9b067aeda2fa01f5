#pragma once

#include <optional>
#include <string>

#include "orbitforge/minimize.hpp"
#include "orbitforge/path.hpp"
#include "orbitforge/types.hpp"

namespace orbitforge {

/// On-disk orbit: system, one representation (fourier loop or nodal path),
/// the symmetry preset it was solved under, and provenance.  Round-trips are
/// bit-exact (numbers serialize in shortest round-trip decimal form).
struct OrbitFile {
  int schema_version = 1;
  std::string tool_version;
  MassSystem system;
  std::string representation;  // "fourier" | "nodes"
  std::optional<FourierLoop> loop;
  std::optional<NodePath> path;
  std::string symmetry;          // preset name, empty when none
  std::optional<double> u;       // P12 angle when applicable
  unsigned long seed = 0;
  std::string options_json;      // provenance: serialized solve options
};

std::string orbit_to_json(const OrbitFile& orbit);
OrbitFile orbit_from_json(const std::string& text);
void write_orbit(const OrbitFile& orbit, const std::string& filename);
OrbitFile read_orbit(const std::string& filename);

/// Solve request parsed from a JSON config file.
struct SolveConfig {
  MassSystem system;
  double period = 12.0;
  std::string mode = "loop";  // loop | fixed_ends | p12
  std::string symmetry = "choreography";
  double u = 0.0;
  int modes = 12;
  int nodes = 128;
  int starts = 4;
  double amplitude = 1.0;
  MinimizeOptions options;
  std::optional<Matrix> x_start;  // fixed_ends endpoints
  std::optional<Matrix> x_end;
  std::string out = "orbit.json";
};

SolveConfig parse_solve_config(const std::string& text);
SolveConfig read_solve_config(const std::string& filename);

std::string report_to_text(const MinimizeReport& report);

}  // namespace orbitforge
