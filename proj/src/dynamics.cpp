#include "orbitforge/dynamics.hpp"

#include <cmath>
#include <limits>

namespace orbitforge {

namespace {

void check_shape(const Configuration& cfg, const MassSystem& ms) {
  if (cfg.n() != ms.n()) throw DimMismatch("configuration/mass body count mismatch");
  if (cfg.dim() != ms.dim) throw DimMismatch("configuration/mass dimension mismatch");
}

}  // namespace

double potential(const Configuration& cfg, const MassSystem& ms, double eps_coll) {
  check_shape(cfg, ms);
  const double floor = eps_coll * configuration_scale(cfg.r);
  double u = 0.0;
  for (int i = 0; i < cfg.n(); ++i) {
    for (int j = i + 1; j < cfg.n(); ++j) {
      const double d = (cfg.r.row(i) - cfg.r.row(j)).norm();
      if (d < floor)
        throw CollisionError("potential: collision configuration",
                             std::numeric_limits<double>::quiet_NaN(), i, j, d);
      u += ms.masses[i] * ms.masses[j] / d;
    }
  }
  return u;
}

Configuration grad_potential(const Configuration& cfg, const MassSystem& ms,
                             double eps_coll) {
  check_shape(cfg, ms);
  const double floor = eps_coll * configuration_scale(cfg.r);
  Matrix g = Matrix::Zero(cfg.n(), cfg.dim());
  for (int i = 0; i < cfg.n(); ++i) {
    for (int j = i + 1; j < cfg.n(); ++j) {
      Eigen::RowVectorXd dji = cfg.r.row(j) - cfg.r.row(i);
      const double d = dji.norm();
      if (d < floor)
        throw CollisionError("grad_potential: collision configuration",
                             std::numeric_limits<double>::quiet_NaN(), i, j, d);
      Eigen::RowVectorXd pull = dji / (d * d * d);
      g.row(i) += ms.masses[j] * pull;
      g.row(j) -= ms.masses[i] * pull;
    }
  }
  return Configuration(std::move(g));
}

InvariantSet scalar_invariants(const PhaseState& state, const MassSystem& ms,
                               double eps_coll) {
  check_shape(state.q, ms);
  InvariantSet inv;
  inv.I = mass_dot(state.q.r, state.q.r, ms);
  inv.J = mass_dot(state.q.r, state.v, ms);
  inv.K = mass_dot(state.v, state.v, ms);
  inv.U = potential(state.q, ms, eps_coll);
  inv.H = 0.5 * inv.K - inv.U;
  inv.L = 0.5 * inv.K + inv.U;
  return inv;
}

Configuration reduce_to_center_of_mass(const Configuration& cfg,
                                       const MassSystem& ms) {
  check_shape(cfg, ms);
  Matrix r = cfg.r;
  r.rowwise() -= mass_centroid(cfg.r, ms);
  return Configuration(std::move(r));
}

Configuration preset_configuration(PresetKind kind, const PresetParams& params,
                                   const MassSystem& ms) {
  if (params.n != ms.n()) throw BadParams("preset: body count mismatch");
  if (params.scale <= 0.0) throw BadParams("preset: scale must be positive");
  if (params.dim != ms.dim) throw BadParams("preset: dimension mismatch");
  const int n = params.n;
  Matrix r = Matrix::Zero(n, params.dim);
  switch (kind) {
    case PresetKind::equilateral: {
      if (n != 3) throw BadParams("equilateral preset requires 3 bodies");
      const double rc = params.scale / std::sqrt(3.0);  // circumradius of side s
      for (int i = 0; i < 3; ++i) {
        const double th = 2.0 * M_PI * i / 3.0;
        r(i, 0) = rc * std::cos(th);
        r(i, 1) = rc * std::sin(th);
      }
      break;
    }
    case PresetKind::euler_collinear: {
      for (int i = 0; i < n; ++i) r(i, 0) = params.scale * (i - 0.5 * (n - 1));
      break;
    }
    case PresetKind::regular_ngon: {
      for (int i = 0; i < n; ++i) {
        const double th = 2.0 * M_PI * i / n;
        r(i, 0) = params.scale * std::cos(th);
        r(i, 1) = params.scale * std::sin(th);
      }
      break;
    }
    case PresetKind::isosceles: {
      if (n != 3) throw BadParams("isosceles preset requires 3 bodies");
      r(0, 0) = -0.5 * params.scale;
      r(1, 0) = 0.5 * params.scale;
      r(2, 1) = params.aspect * params.scale;
      break;
    }
  }
  return reduce_to_center_of_mass(Configuration(std::move(r)), ms);
}

double centrality_residual(const Configuration& cfg, const MassSystem& ms) {
  const double I = mass_dot(cfg.r, cfg.r, ms);
  const double U = potential(cfg, ms);
  const Matrix g = grad_potential(cfg, ms).r;
  const double mu = U / I;
  return mass_norm(g + mu * cfg.r, ms) / (mu * mass_norm(cfg.r, ms));
}

std::vector<double> lagrange_jacobi_residual(const std::vector<PhaseState>& traj,
                                             double dt, const MassSystem& ms) {
  if (traj.size() < 3) throw GridError("lagrange_jacobi_residual: need >= 3 samples");
  if (dt <= 0.0) throw GridError("lagrange_jacobi_residual: dt must be positive");
  std::vector<double> I(traj.size()), H(traj.size()), U(traj.size());
  for (size_t k = 0; k < traj.size(); ++k) {
    InvariantSet inv = scalar_invariants(traj[k], ms);
    I[k] = inv.I;
    H[k] = inv.H;
    U[k] = inv.U;
  }
  std::vector<double> res(traj.size() - 2);
  for (size_t k = 1; k + 1 < traj.size(); ++k) {
    const double idd = (I[k + 1] - 2.0 * I[k] + I[k - 1]) / (dt * dt);
    res[k - 1] = idd - 4.0 * H[k] - 2.0 * U[k];
  }
  return res;
}

}  // namespace orbitforge
