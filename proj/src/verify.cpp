#include "orbitforge/verify.hpp"

#include <cmath>

namespace orbitforge {

namespace {

struct Deriv {
  Matrix dq;
  Matrix dv;
};

Deriv rhs(const MassSystem& ms, const Matrix& q, const Matrix& v, double t) {
  try {
    return {v, grad_potential(Configuration(q), ms).r};
  } catch (const CollisionError& e) {
    throw CloseApproach("integrate: close approach at t = " + std::to_string(t),
                        t);
  }
}

// Dormand-Prince 5(4) coefficients.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
const double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr double kB[7] = {35.0 / 384,      0.0,        500.0 / 1113, 125.0 / 192,
                          -2187.0 / 6784, 11.0 / 84,  0.0};

void dopri5_step(const MassSystem& ms, Matrix& q, Matrix& v, double t,
                 double h) {
  // A fixed step cannot resolve an encounter once the per-step motion is
  // comparable to the separation; flag it instead of slingshotting through.
  double dmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < q.rows(); ++i)
    for (int j = i + 1; j < q.rows(); ++j)
      dmin = std::min(dmin, (q.row(i) - q.row(j)).norm());
  const double vmax = v.rowwise().norm().maxCoeff();
  if (h * vmax > 0.25 * dmin)
    throw CloseApproach(
        "integrate: close approach at t = " + std::to_string(t), t);

  Deriv k[7];
  for (int s = 0; s < 7; ++s) {
    Matrix qs = q;
    Matrix vs = v;
    for (int j = 0; j < s; ++j) {
      if (kA[s][j] == 0.0) continue;
      qs += h * kA[s][j] * k[j].dq;
      vs += h * kA[s][j] * k[j].dv;
    }
    k[s] = rhs(ms, qs, vs, t + kC[s] * h);
  }
  for (int s = 0; s < 7; ++s) {
    if (kB[s] == 0.0) continue;
    q += h * kB[s] * k[s].dq;
    v += h * kB[s] * k[s].dv;
  }
}

}  // namespace

Trajectory integrate(const MassSystem& ms, const PhaseState& s0, double T,
                     long steps, long store_every) {
  if (steps < 1) throw BadParams("integrate: steps must be positive");
  if (store_every < 1) throw BadParams("integrate: store_every must be positive");
  Trajectory traj;
  traj.t0 = 0.0;
  const double h = T / steps;
  traj.dt = h * store_every;
  traj.stats = {5, h, steps};
  Matrix q = s0.q.r;
  Matrix v = s0.v;
  traj.states.push_back({Configuration(q), v});
  for (long i = 0; i < steps; ++i) {
    dopri5_step(ms, q, v, i * h, h);
    if ((i + 1) % store_every == 0 || i + 1 == steps)
      traj.states.push_back({Configuration(q), v});
  }
  return traj;
}

PhaseState integrate_final(const MassSystem& ms, const PhaseState& s0, double T,
                           long steps) {
  if (steps < 1) throw BadParams("integrate: steps must be positive");
  const double h = T / steps;
  Matrix q = s0.q.r;
  Matrix v = s0.v;
  for (long i = 0; i < steps; ++i) dopri5_step(ms, q, v, i * h, h);
  return {Configuration(q), v};
}

double closure_error(const MassSystem& ms, const FourierLoop& loop, long steps) {
  const double T = loop.period;
  if (steps <= 0) steps = std::max<long>(20000, static_cast<long>(4000.0 * T));
  PhaseState start{Configuration(loop.position_at(0.0)), loop.velocity_at(0.0)};
  PhaseState end = integrate_final(ms, start, T, steps);

  double amplitude = 0.0;
  for (int j = 0; j < 128; ++j)
    amplitude = std::max(amplitude,
                         mass_norm(loop.position_at(T * j / 128.0), ms));
  if (amplitude <= 0.0) amplitude = 1.0;

  const double dq = mass_norm(end.q.r - start.q.r, ms);
  const double dv = mass_norm(end.v - start.v, ms);
  const double tscale = T / (2.0 * M_PI);
  return std::sqrt(dq * dq + tscale * tscale * dv * dv) / amplitude;
}

std::vector<double> energy_series(const Trajectory& traj, const MassSystem& ms) {
  std::vector<double> h(traj.states.size());
  for (size_t i = 0; i < traj.states.size(); ++i)
    h[i] = scalar_invariants(traj.states[i], ms).H;
  return h;
}

std::vector<double> cluster_energy(const Trajectory& traj, const MassSystem& ms,
                                   const std::vector<int>& cluster) {
  if (cluster.empty()) throw BadParams("cluster_energy: empty cluster");
  for (int i : cluster)
    if (i < 0 || i >= ms.n()) throw BadParams("cluster_energy: bad body index");

  std::vector<double> out(traj.states.size());
  double mtot = 0.0;
  for (int i : cluster) mtot += ms.masses[i];
  for (size_t s = 0; s < traj.states.size(); ++s) {
    const PhaseState& st = traj.states[s];
    Eigen::RowVectorXd vg = Eigen::RowVectorXd::Zero(ms.dim);
    for (int i : cluster) vg += ms.masses[i] * st.v.row(i);
    vg /= mtot;
    double kin = 0.0;
    for (int i : cluster)
      kin += 0.5 * ms.masses[i] * (st.v.row(i) - vg).squaredNorm();
    double pot = 0.0;
    for (size_t a = 0; a < cluster.size(); ++a)
      for (size_t b = a + 1; b < cluster.size(); ++b) {
        const int i = cluster[a], j = cluster[b];
        pot += ms.masses[i] * ms.masses[j] /
               (st.q.r.row(i) - st.q.r.row(j)).norm();
      }
    out[s] = kin - pot;
  }
  return out;
}

double hessian_form(const FourierLoop& path, const FourierLoop& variation,
                    double h, const MassSystem& ms, const QuadratureSpec& quad) {
  if (path.coeff.rows() != variation.coeff.rows() ||
      path.coeff.cols() != variation.coeff.cols())
    throw DimMismatch("hessian_form: variation shape mismatch");
  if (h <= 0.0) throw BadParams("hessian_form: step must be positive");
  FourierLoop plus = path, minus = path;
  plus.coeff += h * variation.coeff;
  minus.coeff -= h * variation.coeff;
  const double a0 = action(path, ms, quad);
  const double ap = action(plus, ms, quad);
  const double am = action(minus, ms, quad);
  return (ap - 2.0 * a0 + am) / (h * h);
}

double hessian_form(const NodePath& path, const NodePath& variation, double h,
                    const MassSystem& ms) {
  if (path.nodes() != variation.nodes() || path.nbody() != variation.nbody() ||
      path.dim() != variation.dim())
    throw DimMismatch("hessian_form: variation shape mismatch");
  if (h <= 0.0) throw BadParams("hessian_form: step must be positive");
  auto shifted = [&](double s) {
    NodePath p = path;
    p.x_start.r += s * variation.x_start.r;
    p.x_end.r += s * variation.x_end.r;
    for (int k = 0; k < p.nodes(); ++k) p.interior[k] += s * variation.interior[k];
    return p;
  };
  const double a0 = action(path, ms);
  const double ap = action(shifted(h), ms);
  const double am = action(shifted(-h), ms);
  return (ap - 2.0 * a0 + am) / (h * h);
}

double scaled_potential(const Configuration& cfg, const MassSystem& ms) {
  const double I = mass_dot(cfg.r, cfg.r, ms);
  return std::sqrt(I) * potential(cfg, ms);
}

namespace {

void require_planar_3d(const Configuration& x0) {
  if (x0.dim() != 3) throw BadParams("expected a 3d configuration with z = 0");
  if (x0.r.col(2).cwiseAbs().maxCoeff() > 1e-12 * configuration_scale(x0.r))
    throw BadParams("expected a planar configuration (z = 0)");
}

}  // namespace

FourierLoop relative_equilibrium_loop(const Configuration& x0_in,
                                      const MassSystem& ms, double T) {
  Configuration x0 = reduce_to_center_of_mass(x0_in, ms);
  if (ms.dim == 3) require_planar_3d(x0);
  if (centrality_residual(x0, ms) > 1e-8)
    throw BadParams("relative_equilibrium_loop: configuration is not central");

  // Rescale so the rotation rate omega = sqrt(U/I) equals 2 pi / T.
  const double w = 2.0 * M_PI / T;
  const double I = mass_dot(x0.r, x0.r, ms);
  const double U = potential(x0, ms);
  const double lam = std::cbrt(U / (I * w * w));
  Matrix p = lam * x0.r;

  FourierLoop loop(ms.n(), ms.dim, 1, T);
  for (int i = 0; i < ms.n(); ++i) {
    // cos block: p_i; sin block: p_i rotated +90 degrees in the plane.
    loop.coeff(loop.row_of(i, 0), 1) = p(i, 0);
    loop.coeff(loop.row_of(i, 1), 1) = p(i, 1);
    loop.coeff(loop.row_of(i, 0), 2) = -p(i, 1);
    loop.coeff(loop.row_of(i, 1), 2) = p(i, 0);
  }
  return loop;
}

double scaled_potential_vertical_d2(const Configuration& x0,
                                    const MassSystem& ms, const Vector& z0) {
  require_planar_3d(x0);
  if (z0.size() != ms.n()) throw DimMismatch("vertical d2: z0 size mismatch");
  const double zmax = z0.cwiseAbs().maxCoeff();
  if (zmax == 0.0) return 0.0;
  const double eps = 1e-4 * configuration_scale(x0.r) / zmax;
  auto shifted = [&](double s) {
    Configuration c = x0;
    c.r.col(2) += s * z0;
    return scaled_potential(c, ms);
  };
  return (shifted(eps) - 2.0 * scaled_potential(x0, ms) + shifted(-eps)) /
         (eps * eps);
}

HessianIdentity vertical_hessian_identity(const Configuration& x0_in,
                                          const MassSystem& ms, const Vector& z0,
                                          double T) {
  if (ms.dim != 3) throw BadParams("vertical_hessian_identity: needs dim 3");
  if (z0.size() != ms.n()) throw DimMismatch("z0 size mismatch");
  const double znorm = z0.cwiseAbs().maxCoeff();
  if (znorm == 0.0) throw BadParams("z0 must be nonzero");
  if (std::abs(ms.masses.dot(z0)) > 1e-10 * ms.total_mass() * znorm)
    throw BadParams("z0 must have mass-weighted mean zero");

  FourierLoop base = relative_equilibrium_loop(x0_in, ms, T);
  // The rescaled planar configuration the loop actually rotates.
  Configuration x0(base.position_at(0.0));

  FourierLoop var(ms.n(), ms.dim, 1, T);
  for (int i = 0; i < ms.n(); ++i) var.coeff(var.row_of(i, 2), 1) = z0[i];

  const double scale = configuration_scale(x0.r);
  const double h = 1e-4 * scale / znorm;
  QuadratureSpec quad{256};
  HessianIdentity out;
  out.lhs = hessian_form(base, var, h, ms, quad);

  const double I0 = mass_dot(x0.r, x0.r, ms);
  out.rhs = scaled_potential_vertical_d2(x0, ms, z0) / std::sqrt(I0) * (T / 2.0);

  double zmass = 0.0;
  for (int i = 0; i < ms.n(); ++i) zmass += ms.masses[i] * z0[i] * z0[i];
  const double w = 2.0 * M_PI / T;
  out.scale = 0.5 * T * w * w * zmass;
  return out;
}

std::pair<Vector, double> most_negative_vertical(const Configuration& x0,
                                                 const MassSystem& ms) {
  const int n = ms.n();
  // Mass-orthonormal basis of the mean-zero vertical shapes.
  std::vector<Vector> basis;
  for (int k = 0; k < n; ++k) {
    Vector v = Vector::Zero(n);
    v[k] = 1.0;
    v.array() -= ms.masses.dot(v) / ms.total_mass();
    for (const Vector& b : basis) {
      double proj = 0.0, nb = 0.0;
      for (int i = 0; i < n; ++i) {
        proj += ms.masses[i] * v[i] * b[i];
        nb += ms.masses[i] * b[i] * b[i];
      }
      v -= (proj / nb) * b;
    }
    double nv = 0.0;
    for (int i = 0; i < n; ++i) nv += ms.masses[i] * v[i] * v[i];
    if (nv > 1e-18) basis.push_back(v / std::sqrt(nv));
  }
  const int m = static_cast<int>(basis.size());
  Matrix Q(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) {
      // Polarization from the diagonal of the quadratic form.
      const double qpp = scaled_potential_vertical_d2(x0, ms, basis[a] + basis[b]);
      const double qmm = scaled_potential_vertical_d2(x0, ms, basis[a] - basis[b]);
      Q(a, b) = Q(b, a) = 0.25 * (qpp - qmm);
    }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Q);
  const int lo = 0;  // eigenvalues ascending
  Vector z = Vector::Zero(n);
  for (int a = 0; a < m; ++a) z += eig.eigenvectors()(a, lo) * basis[a];
  return {z, eig.eigenvalues()[lo]};
}

double a2_hat(double T) {
  return std::pow(2.0, -5.0 / 3.0) * std::pow(3.0, 2.0 / 3.0) *
         std::pow(M_PI, 2.0 / 3.0) * std::cbrt(T);
}

double p12_action_bound(double u, double T) {
  if (u < 0.0 || u > M_PI / 3.0 + 1e-12)
    throw BadParams("p12_action_bound: u outside [0, pi/3]");
  return a2_hat(T) * std::pow(3.0 / M_PI * (M_PI / 3.0 - u), 2.0 / 3.0);
}

NodePath lagrange_arc_p12(double u, double T, int nodes) {
  if (u < 0.0 || u >= M_PI / 3.0 - 1e-9)
    throw BadParams("lagrange_arc_p12: u must lie in [0, pi/3) (degenerate at pi/3)");
  if (nodes < 1) throw BadParams("lagrange_arc_p12: need >= 1 interior node");
  const double w = 12.0 * (M_PI / 3.0 - u) / T;  // clockwise rotation rate
  const double side = std::cbrt(3.0 / (w * w));
  const double rc = side / std::sqrt(3.0);
  const double arcT = T / 12.0;
  auto at = [&](double t) {
    Matrix r(3, 3);
    for (int i = 0; i < 3; ++i) {
      const double th = 2.0 * M_PI * i / 3.0 - w * t;
      r(i, 0) = rc * std::cos(th);
      r(i, 1) = rc * std::sin(th);
      r(i, 2) = 0.0;
    }
    return r;
  };
  NodePath path;
  path.duration = arcT;
  path.x_start = Configuration(at(0.0));
  path.x_end = Configuration(at(arcT));
  path.interior.resize(nodes);
  const double h = arcT / (nodes + 1);
  for (int k = 1; k <= nodes; ++k) path.interior[k - 1] = at(k * h);
  return path;
}

NodePath p12_vertical_variation(double T, int nodes) {
  if (nodes < 1) throw BadParams("p12_vertical_variation: need >= 1 node");
  const double arcT = T / 12.0;
  auto at = [&](double t) {
    Matrix r = Matrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i)
      r(i, 2) = std::sin(2.0 * M_PI * t / T + 2.0 * M_PI * i / 3.0);
    return r;
  };
  NodePath path;
  path.duration = arcT;
  path.x_start = Configuration(at(0.0));
  path.x_end = Configuration(at(arcT));
  path.interior.resize(nodes);
  const double h = arcT / (nodes + 1);
  for (int k = 1; k <= nodes; ++k) path.interior[k - 1] = at(k * h);
  return path;
}

double p12_hessian_along_xi(double u, double T, int nodes, double h) {
  const MassSystem ms = MassSystem::equal(3, 3);
  NodePath base = lagrange_arc_p12(u, T, nodes);
  NodePath var = p12_vertical_variation(T, nodes);
  return hessian_form(base, var, h, ms);
}

double p12_hessian_sign_flip(double lo, double hi, double T, double utol,
                             int nodes) {
  double flo = p12_hessian_along_xi(lo, T, nodes);
  double fhi = p12_hessian_along_xi(hi, T, nodes);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0))
    throw BadParams("p12_hessian_sign_flip: no sign change on [lo, hi]");
  while (hi - lo > utol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = p12_hessian_along_xi(mid, T, nodes);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace orbitforge
