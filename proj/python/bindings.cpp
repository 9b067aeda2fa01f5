#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "orbitforge/dynamics.hpp"
#include "orbitforge/marchal.hpp"
#include "orbitforge/minimize.hpp"
#include "orbitforge/orbitio.hpp"
#include "orbitforge/symmetry.hpp"
#include "orbitforge/verify.hpp"

namespace py = pybind11;
using namespace orbitforge;

namespace {

PresetKind preset_kind_from_string(const std::string& name) {
  if (name == "equilateral") return PresetKind::equilateral;
  if (name == "euler_collinear") return PresetKind::euler_collinear;
  if (name == "regular_ngon") return PresetKind::regular_ngon;
  if (name == "isosceles") return PresetKind::isosceles;
  throw BadParams("unknown preset kind '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Action-minimizing n-body orbits: core operations";
  m.attr("__version__") = ORBITFORGE_VERSION;

  py::register_exception<BadParams>(m, "BadParams", PyExc_ValueError);
  py::register_exception<CollisionError>(m, "CollisionError");
  py::register_exception<CollisionFloor>(m, "CollisionFloor");
  py::register_exception<CloseApproach>(m, "CloseApproach");
  py::register_exception<SchemaError>(m, "SchemaError");

  py::class_<MassSystem>(m, "MassSystem")
      .def(py::init<Vector, int>(), py::arg("masses"), py::arg("dim"))
      .def_static("equal", &MassSystem::equal, py::arg("n"), py::arg("dim"))
      .def_property_readonly("n", &MassSystem::n)
      .def_readonly("dim", &MassSystem::dim)
      .def_readonly("masses", &MassSystem::masses);

  py::class_<InvariantSet>(m, "InvariantSet")
      .def_readonly("I", &InvariantSet::I)
      .def_readonly("J", &InvariantSet::J)
      .def_readonly("K", &InvariantSet::K)
      .def_readonly("U", &InvariantSet::U)
      .def_readonly("H", &InvariantSet::H)
      .def_readonly("L", &InvariantSet::L);

  // Pointwise dynamics on raw n x dim position/velocity arrays.
  m.def("potential",
        [](const Matrix& r, const MassSystem& ms) {
          return potential(Configuration(r), ms);
        },
        py::arg("positions"), py::arg("system"));
  m.def("grad_potential",
        [](const Matrix& r, const MassSystem& ms) {
          return grad_potential(Configuration(r), ms).r;
        },
        py::arg("positions"), py::arg("system"));
  m.def("scalar_invariants",
        [](const Matrix& r, const Matrix& v, const MassSystem& ms) {
          return scalar_invariants({Configuration(r), v}, ms);
        },
        py::arg("positions"), py::arg("velocities"), py::arg("system"));
  m.def("reduce_to_center_of_mass",
        [](const Matrix& r, const MassSystem& ms) {
          return reduce_to_center_of_mass(Configuration(r), ms).r;
        },
        py::arg("positions"), py::arg("system"));
  m.def("preset_configuration",
        [](const std::string& kind, const MassSystem& ms, double scale,
           double aspect) {
          PresetParams p;
          p.n = ms.n();
          p.dim = ms.dim;
          p.scale = scale;
          p.aspect = aspect;
          return preset_configuration(preset_kind_from_string(kind), p, ms).r;
        },
        py::arg("kind"), py::arg("system"), py::arg("scale") = 1.0,
        py::arg("aspect") = 1.0);
  m.def("centrality_residual",
        [](const Matrix& r, const MassSystem& ms) {
          return centrality_residual(Configuration(r), ms);
        },
        py::arg("positions"), py::arg("system"));

  py::class_<FourierLoop>(m, "FourierLoop")
      .def(py::init<int, int, int, double>(), py::arg("nbody"), py::arg("dim"),
           py::arg("modes"), py::arg("period"))
      .def_readonly("nbody", &FourierLoop::nbody)
      .def_readonly("dim", &FourierLoop::dim)
      .def_readonly("modes", &FourierLoop::modes)
      .def_readonly("period", &FourierLoop::period)
      .def_property(
          "coeff", [](const FourierLoop& l) { return l.coeff; },
          [](FourierLoop& l, const Matrix& c) {
            if (c.rows() != l.rows() || c.cols() != l.cols())
              throw BadParams("coefficient shape mismatch");
            l.coeff = c;
          })
      .def("position_at", &FourierLoop::position_at, py::arg("t"))
      .def("velocity_at", &FourierLoop::velocity_at, py::arg("t"))
      .def("mass_balance", &FourierLoop::mass_balance, py::arg("system"))
      .def("with_modes", &FourierLoop::with_modes, py::arg("modes"));

  py::class_<NodePath>(m, "NodePath")
      .def(py::init([](const Matrix& x_start, const Matrix& x_end,
                       const std::vector<Matrix>& interior, double duration) {
             NodePath p;
             p.x_start = Configuration(x_start);
             p.x_end = Configuration(x_end);
             p.interior = interior;
             p.duration = duration;
             return p;
           }),
           py::arg("x_start"), py::arg("x_end"), py::arg("interior"),
           py::arg("duration"))
      .def_property_readonly("duration",
                             [](const NodePath& p) { return p.duration; })
      .def_property_readonly("x_start",
                             [](const NodePath& p) { return p.x_start.r; })
      .def_property_readonly("x_end",
                             [](const NodePath& p) { return p.x_end.r; })
      .def_property_readonly("interior",
                             [](const NodePath& p) { return p.interior; })
      .def("position_at", &NodePath::position_at, py::arg("t"))
      .def("velocity_at", &NodePath::velocity_at, py::arg("t"));

  py::class_<QuadratureSpec>(m, "QuadratureSpec")
      .def(py::init([](int samples) { return QuadratureSpec{samples}; }),
           py::arg("samples") = 256)
      .def_readwrite("samples", &QuadratureSpec::samples);

  m.def("action",
        [](const FourierLoop& l, const MassSystem& ms, int samples) {
          return action(l, ms, QuadratureSpec{samples});
        },
        py::arg("loop"), py::arg("system"), py::arg("samples") = 256);
  m.def("action",
        [](const NodePath& p, const MassSystem& ms) { return action(p, ms); },
        py::arg("path"), py::arg("system"));
  m.def("action_gradient",
        [](const FourierLoop& l, const MassSystem& ms, int samples) {
          return action_gradient(l, ms, QuadratureSpec{samples});
        },
        py::arg("loop"), py::arg("system"), py::arg("samples") = 256);
  m.def("blow_up",
        [](const FourierLoop& l, double lam) { return blow_up(l, lam); },
        py::arg("loop"), py::arg("lam"));
  m.def("min_pairwise_distance",
        [](const FourierLoop& l, int samples) {
          MinDistance d = min_pairwise_distance(l, QuadratureSpec{samples});
          return py::make_tuple(d.value, d.time, d.body_a, d.body_b);
        },
        py::arg("loop"), py::arg("samples") = 256);

  py::class_<SymmetryGroup>(m, "SymmetryGroup")
      .def_readonly("name", &SymmetryGroup::name)
      .def_property_readonly("order", &SymmetryGroup::order)
      .def("permutes_bodies", &SymmetryGroup::permutes_bodies);

  m.def("preset_group",
        [](const std::string& name, int nbody, int dim) {
          return preset_group(name, nbody, dim);
        },
        py::arg("name"), py::arg("nbody"), py::arg("dim"));
  m.def("group_average", &group_average, py::arg("group"), py::arg("loop"));
  m.def("invariance_defect",
        [](const SymmetryGroup& G, const FourierLoop& l, const MassSystem& ms) {
          return invariance_defect(G, l, ms);
        },
        py::arg("group"), py::arg("loop"), py::arg("system"));

  py::class_<MinimizeOptions>(m, "MinimizeOptions")
      .def(py::init<>())
      .def_readwrite("max_iterations", &MinimizeOptions::max_iterations)
      .def_readwrite("gtol", &MinimizeOptions::gtol)
      .def_readwrite("dmin", &MinimizeOptions::dmin)
      .def_readwrite("memory", &MinimizeOptions::memory)
      .def_readwrite("seed", &MinimizeOptions::seed)
      .def_readwrite("samples", &MinimizeOptions::samples)
      .def_readwrite("nodes", &MinimizeOptions::nodes);

  py::class_<MinimizeReport>(m, "MinimizeReport")
      .def_readonly("action", &MinimizeReport::action)
      .def_readonly("grad_norm", &MinimizeReport::grad_norm)
      .def_readonly("iterations", &MinimizeReport::iterations)
      .def_readonly("min_distance", &MinimizeReport::min_distance)
      .def_readonly("termination", &MinimizeReport::termination)
      .def_readonly("action_trace", &MinimizeReport::action_trace)
      .def_readonly("seed", &MinimizeReport::seed)
      .def("converged", &MinimizeReport::converged);

  m.def("minimize_loop", &minimize_loop, py::arg("system"), py::arg("group"),
        py::arg("init"), py::arg("options") = MinimizeOptions{});
  m.def("minimize_fixed_ends",
        [](const MassSystem& ms, const Matrix& xi, const Matrix& xf, double T,
           const NodePath& init, const MinimizeOptions& opts) {
          return minimize_fixed_ends(ms, Configuration(xi), Configuration(xf),
                                     T, init, opts);
        },
        py::arg("system"), py::arg("x_start"), py::arg("x_end"),
        py::arg("duration"), py::arg("init"),
        py::arg("options") = MinimizeOptions{});
  m.def("minimize_p12", &minimize_p12, py::arg("system"), py::arg("u"),
        py::arg("period"), py::arg("options") = MinimizeOptions{});
  m.def("random_init", &random_init, py::arg("system"), py::arg("period"),
        py::arg("seed"), py::arg("modes"), py::arg("amplitude"),
        py::arg("group"));

  // Kepler / averaging machinery.
  m.def("sphere_shell_potential", &sphere_shell_potential, py::arg("r"),
        py::arg("R"));
  m.def("disk_potential", &disk_potential, py::arg("r"), py::arg("R"));
  m.def("averaged_action_difference",
        [](int dim, double rho, double T) {
          AveragedAction a = averaged_action_difference(dim, rho, T);
          return py::make_tuple(a.difference, a.t0, a.action, a.action_mean);
        },
        py::arg("dim"), py::arg("rho"), py::arg("T"));
  m.def("montgomery_deformation_gain", &montgomery_deformation_gain,
        py::arg("epsilon"), py::arg("T") = 1.0, py::arg("panels") = 96);
  m.def("nbody_averaged_bound",
        [](const Matrix& x0, const MassSystem& ms, int k, double rho, double T) {
          return nbody_averaged_bound(Configuration(x0), ms, k, rho, T);
        },
        py::arg("x0"), py::arg("system"), py::arg("k"), py::arg("rho"),
        py::arg("T"));

  // Verification.
  m.def("closure_error",
        [](const MassSystem& ms, const FourierLoop& l, long steps) {
          return closure_error(ms, l, steps);
        },
        py::arg("system"), py::arg("loop"), py::arg("steps") = 0);
  m.def("a2_hat", &a2_hat, py::arg("T"));
  m.def("p12_action_bound", &p12_action_bound, py::arg("u"), py::arg("T"));
  m.def("p12_hessian_along_xi", &p12_hessian_along_xi, py::arg("u"),
        py::arg("T"), py::arg("nodes") = 192, py::arg("h") = 1e-4);
  m.def("vertical_hessian_identity",
        [](const Matrix& x0, const MassSystem& ms, const Vector& z0, double T) {
          HessianIdentity id =
              vertical_hessian_identity(Configuration(x0), ms, z0, T);
          return py::make_tuple(id.lhs, id.rhs, id.scale);
        },
        py::arg("x0"), py::arg("system"), py::arg("z0"), py::arg("T"));

  // Orbit files.
  py::class_<OrbitFile>(m, "OrbitFile")
      .def(py::init<>())
      .def_readwrite("representation", &OrbitFile::representation)
      .def_readwrite("symmetry", &OrbitFile::symmetry)
      .def_readwrite("seed", &OrbitFile::seed)
      .def_property(
          "loop",
          [](const OrbitFile& o) { return o.loop; },
          [](OrbitFile& o, const FourierLoop& l) { o.loop = l; })
      .def_property(
          "path",
          [](const OrbitFile& o) { return o.path; },
          [](OrbitFile& o, const NodePath& p) { o.path = p; })
      .def_property(
          "system",
          [](const OrbitFile& o) { return o.system; },
          [](OrbitFile& o, const MassSystem& ms) { o.system = ms; });

  m.def("write_orbit", &write_orbit, py::arg("orbit"), py::arg("filename"));
  m.def("read_orbit", &read_orbit, py::arg("filename"));
}
