#include "orbitforge/orbitio.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace orbitforge {

using nlohmann::json;

namespace {

json matrix_to_flat(const Matrix& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

Matrix matrix_from_flat(const json& arr, int rows, int cols,
                        const std::string& field) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != rows * cols)
    throw SchemaError("orbit file: bad size for " + field);
  Matrix m(rows, cols);
  int p = 0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = arr[p++].get<double>();
  return m;
}

}  // namespace

std::string orbit_to_json(const OrbitFile& orbit) {
  json j;
  j["schema_version"] = orbit.schema_version;
  j["tool_version"] = orbit.tool_version;
  j["system"] = {{"dim", orbit.system.dim},
                 {"masses", std::vector<double>(
                                orbit.system.masses.data(),
                                orbit.system.masses.data() + orbit.system.n())}};
  j["representation"] = orbit.representation;
  if (orbit.representation == "fourier") {
    if (!orbit.loop) throw BadParams("orbit_to_json: missing loop payload");
    const FourierLoop& l = *orbit.loop;
    Vector flat = l.flatten();
    j["fourier"] = {
        {"period", l.period},
        {"modes", l.modes},
        // body-major, axis-minor rows; constant/cos/sin blocks per row.
        {"coefficients",
         std::vector<double>(flat.data(), flat.data() + flat.size())}};
  } else if (orbit.representation == "nodes") {
    if (!orbit.path) throw BadParams("orbit_to_json: missing path payload");
    const NodePath& p = *orbit.path;
    json interior = json::array();
    for (const Matrix& m : p.interior)
      for (int i = 0; i < m.rows(); ++i)
        for (int a = 0; a < m.cols(); ++a) interior.push_back(m(i, a));
    j["nodes"] = {{"duration", p.duration},
                  {"count", p.nodes()},
                  {"x_start", matrix_to_flat(p.x_start.r)},
                  {"x_end", matrix_to_flat(p.x_end.r)},
                  {"interior", interior}};
  } else {
    throw BadParams("orbit_to_json: unknown representation");
  }
  if (!orbit.symmetry.empty()) {
    j["symmetry"] = {{"name", orbit.symmetry}};
    if (orbit.u) j["symmetry"]["u"] = *orbit.u;
  }
  j["provenance"] = {{"seed", orbit.seed}};
  if (!orbit.options_json.empty())
    j["provenance"]["options"] = json::parse(orbit.options_json);
  return j.dump(2) + "\n";
}

OrbitFile orbit_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("orbit file: parse error: ") + e.what());
  }
  OrbitFile orbit;
  try {
    if (j.at("schema_version").get<int>() != 1)
      throw SchemaError("orbit file: unsupported schema version");
    orbit.tool_version = j.value("tool_version", "");
    const auto& sys = j.at("system");
    const auto masses = sys.at("masses").get<std::vector<double>>();
    Vector m(masses.size());
    for (size_t i = 0; i < masses.size(); ++i) m[i] = masses[i];
    orbit.system = MassSystem(m, sys.at("dim").get<int>());
    orbit.representation = j.at("representation").get<std::string>();
    const int n = orbit.system.n();
    const int d = orbit.system.dim;
    if (orbit.representation == "fourier") {
      const auto& f = j.at("fourier");
      const int modes = f.at("modes").get<int>();
      const auto coeff = f.at("coefficients").get<std::vector<double>>();
      Vector flat(coeff.size());
      for (size_t i = 0; i < coeff.size(); ++i) flat[i] = coeff[i];
      orbit.loop = FourierLoop::from_flat(flat, n, d, modes,
                                          f.at("period").get<double>());
    } else if (orbit.representation == "nodes") {
      const auto& pj = j.at("nodes");
      NodePath p;
      p.duration = pj.at("duration").get<double>();
      const int count = pj.at("count").get<int>();
      p.x_start = Configuration(matrix_from_flat(pj.at("x_start"), n, d, "x_start"));
      p.x_end = Configuration(matrix_from_flat(pj.at("x_end"), n, d, "x_end"));
      const auto flat = pj.at("interior").get<std::vector<double>>();
      if (static_cast<int>(flat.size()) != count * n * d)
        throw SchemaError("orbit file: bad interior size");
      p.interior.resize(count);
      int q = 0;
      for (int k = 0; k < count; ++k) {
        p.interior[k] = Matrix(n, d);
        for (int i = 0; i < n; ++i)
          for (int a = 0; a < d; ++a) p.interior[k](i, a) = flat[q++];
      }
      orbit.path = std::move(p);
    } else {
      throw SchemaError("orbit file: unknown representation");
    }
    if (j.contains("symmetry")) {
      orbit.symmetry = j["symmetry"].value("name", "");
      if (j["symmetry"].contains("u")) orbit.u = j["symmetry"]["u"].get<double>();
    }
    if (j.contains("provenance")) {
      orbit.seed = j["provenance"].value("seed", 0UL);
      if (j["provenance"].contains("options"))
        orbit.options_json = j["provenance"]["options"].dump();
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("orbit file: ") + e.what());
  }
  return orbit;
}

void write_orbit(const OrbitFile& orbit, const std::string& filename) {
  std::ofstream out(filename, std::ios::binary);
  if (!out) throw Error("write_orbit: cannot open " + filename);
  out << orbit_to_json(orbit);
}

OrbitFile read_orbit(const std::string& filename) {
  std::ifstream in(filename, std::ios::binary);
  if (!in) throw Error("read_orbit: cannot open " + filename);
  std::stringstream ss;
  ss << in.rdbuf();
  return orbit_from_json(ss.str());
}

SolveConfig parse_solve_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("config: parse error: ") + e.what());
  }
  SolveConfig cfg;
  try {
    const int n = j.at("n").get<int>();
    const int dim = j.value("dim", 2);
    Vector masses = Vector::Ones(n);
    if (j.contains("masses")) {
      const auto mv = j["masses"].get<std::vector<double>>();
      if (static_cast<int>(mv.size()) != n)
        throw BadParams("config: masses length != n");
      for (int i = 0; i < n; ++i) masses[i] = mv[i];
    }
    cfg.system = MassSystem(masses, dim);
    cfg.period = j.value("T", 12.0);
    cfg.mode = j.value("mode", std::string("loop"));
    cfg.symmetry = j.value("symmetry", std::string("choreography"));
    cfg.u = j.value("u", 0.0);
    cfg.modes = j.value("modes", 12);
    cfg.nodes = j.value("nodes", 128);
    cfg.starts = j.value("starts", 4);
    cfg.amplitude = j.value("amplitude", 1.0);
    cfg.out = j.value("out", std::string("orbit.json"));
    if (j.contains("options")) {
      const auto& o = j["options"];
      cfg.options.max_iterations = o.value("max_iterations", cfg.options.max_iterations);
      cfg.options.gtol = o.value("gtol", cfg.options.gtol);
      cfg.options.dmin = o.value("dmin", cfg.options.dmin);
      cfg.options.memory = o.value("memory", cfg.options.memory);
      cfg.options.samples = o.value("samples", cfg.options.samples);
    }
    cfg.options.seed = j.value("seed", 0UL);
    cfg.options.nodes = cfg.nodes;
    if (j.contains("x_start"))
      cfg.x_start = matrix_from_flat(j["x_start"], n, dim, "x_start");
    if (j.contains("x_end"))
      cfg.x_end = matrix_from_flat(j["x_end"], n, dim, "x_end");
  } catch (const json::exception& e) {
    throw SchemaError(std::string("config: ") + e.what());
  }
  return cfg;
}

SolveConfig read_solve_config(const std::string& filename) {
  std::ifstream in(filename, std::ios::binary);
  if (!in) throw Error("read_solve_config: cannot open " + filename);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_solve_config(ss.str());
}

std::string report_to_text(const MinimizeReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "action          " << report.action << "\n"
     << "grad_norm       " << report.grad_norm << "\n"
     << "iterations      " << report.iterations << "\n"
     << "min_distance    " << report.min_distance << "\n"
     << "termination     " << report.termination << "\n"
     << "seed            " << report.seed << "\n";
  return os.str();
}

}  // namespace orbitforge
