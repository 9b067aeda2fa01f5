#include "orbitforge/path.hpp"

#include <algorithm>
#include <cmath>

namespace orbitforge {

namespace {

// Basis rows: [1, cos(w_1 t)..cos(w_m t), sin(w_1 t)..sin(w_m t)].
void basis_at(double t, double period, int modes, Vector& phi, Vector& dphi) {
  phi.resize(1 + 2 * modes);
  dphi.resize(1 + 2 * modes);
  phi[0] = 1.0;
  dphi[0] = 0.0;
  for (int k = 1; k <= modes; ++k) {
    const double w = 2.0 * M_PI * k / period;
    const double c = std::cos(w * t);
    const double s = std::sin(w * t);
    phi[k] = c;
    phi[modes + k] = s;
    dphi[k] = -w * s;
    dphi[modes + k] = w * c;
  }
}

Matrix unflatten_column(const Vector& col, int nbody, int dim) {
  Matrix out(nbody, dim);
  for (int i = 0; i < nbody; ++i)
    for (int a = 0; a < dim; ++a) out(i, a) = col[i * dim + a];
  return out;
}

// Potential and force of one flattened configuration column.  Throws
// CollisionError carrying the sample time.
double potential_of_column(const Vector& col, int nbody, int dim,
                           const MassSystem& ms, double t, Vector* force) {
  double scale = col.cwiseAbs().maxCoeff();
  if (scale <= 0.0) scale = 1.0;
  const double floor = kCollisionEps * scale;
  double u = 0.0;
  if (force) force->setZero(nbody * dim);
  for (int i = 0; i < nbody; ++i) {
    for (int j = i + 1; j < nbody; ++j) {
      double d2 = 0.0;
      for (int a = 0; a < dim; ++a) {
        const double diff = col[i * dim + a] - col[j * dim + a];
        d2 += diff * diff;
      }
      const double d = std::sqrt(d2);
      if (d < floor)
        throw CollisionError("action: collision at sample", t, i, j, d);
      const double mm = ms.masses[i] * ms.masses[j];
      u += mm / d;
      if (force) {
        const double f = mm / (d2 * d);
        for (int a = 0; a < dim; ++a) {
          const double diff = col[j * dim + a] - col[i * dim + a];
          (*force)[i * dim + a] += f * diff;
          (*force)[j * dim + a] -= f * diff;
        }
      }
    }
  }
  return u;
}

void check_loop_quad(const FourierLoop& loop, const QuadratureSpec& quad) {
  if (quad.samples < std::max(4, 4 * loop.modes))
    throw BadParams("quadrature: samples below the 4*modes anti-aliasing floor");
}

}  // namespace

FourierLoop::FourierLoop(int nbody_, int dim_, int modes_, double period_)
    : nbody(nbody_), dim(dim_), modes(modes_), period(period_),
      coeff(Matrix::Zero(nbody_ * dim_, 1 + 2 * modes_)) {
  if (nbody < 1 || (dim != 2 && dim != 3) || modes < 0 || period <= 0.0)
    throw BadParams("FourierLoop: invalid shape");
}

Matrix FourierLoop::position_at(double t) const {
  Vector phi, dphi;
  basis_at(t, period, modes, phi, dphi);
  return unflatten_column(coeff * phi, nbody, dim);
}

Matrix FourierLoop::velocity_at(double t) const {
  Vector phi, dphi;
  basis_at(t, period, modes, phi, dphi);
  return unflatten_column(coeff * dphi, nbody, dim);
}

Vector FourierLoop::flatten() const {
  Vector out(rows() * cols());
  int p = 0;
  for (int r = 0; r < rows(); ++r)
    for (int c = 0; c < cols(); ++c) out[p++] = coeff(r, c);
  return out;
}

FourierLoop FourierLoop::from_flat(const Vector& data, int nbody, int dim,
                                   int modes, double period) {
  FourierLoop loop(nbody, dim, modes, period);
  if (data.size() != loop.rows() * loop.cols())
    throw DimMismatch("FourierLoop::from_flat: wrong coefficient count");
  int p = 0;
  for (int r = 0; r < loop.rows(); ++r)
    for (int c = 0; c < loop.cols(); ++c) loop.coeff(r, c) = data[p++];
  return loop;
}

void FourierLoop::mass_balance(const MassSystem& ms) {
  if (ms.n() != nbody || ms.dim != dim)
    throw DimMismatch("mass_balance: system shape mismatch");
  const double total = ms.total_mass();
  for (int a = 0; a < dim; ++a) {
    for (int c = 0; c < cols(); ++c) {
      double mean = 0.0;
      for (int i = 0; i < nbody; ++i) mean += ms.masses[i] * coeff(row_of(i, a), c);
      mean /= total;
      for (int i = 0; i < nbody; ++i) coeff(row_of(i, a), c) -= mean;
    }
  }
}

FourierLoop FourierLoop::with_modes(int new_modes) const {
  FourierLoop out(nbody, dim, new_modes, period);
  const int keep = std::min(modes, new_modes);
  out.coeff.col(0) = coeff.col(0);
  for (int k = 1; k <= keep; ++k) {
    out.coeff.col(k) = coeff.col(k);
    out.coeff.col(new_modes + k) = coeff.col(modes + k);
  }
  return out;
}

const Matrix& NodePath::node(int k) const {
  if (k == 0) return x_start.r;
  if (k == nodes() + 1) return x_end.r;
  return interior[k - 1];
}

Matrix NodePath::position_at(double t) const {
  const double tol = 1e-12 * duration;
  if (t < -tol || t > duration + tol)
    throw OutOfRange("NodePath: evaluation time outside [0, T]");
  t = std::clamp(t, 0.0, duration);
  const double h = spacing();
  int s = std::min(static_cast<int>(t / h), nodes());
  const double frac = (t - s * h) / h;
  return (1.0 - frac) * node(s) + frac * node(s + 1);
}

Matrix NodePath::velocity_at(double t) const {
  const double tol = 1e-12 * duration;
  if (t < -tol || t > duration + tol)
    throw OutOfRange("NodePath: evaluation time outside [0, T]");
  t = std::clamp(t, 0.0, duration);
  const double h = spacing();
  int s = std::min(static_cast<int>(t / h), nodes());
  return (node(s + 1) - node(s)) / h;
}

std::pair<Matrix, Matrix> eval_path(const FourierLoop& loop, double t) {
  return {loop.position_at(t), loop.velocity_at(t)};
}

std::pair<Matrix, Matrix> eval_path(const NodePath& path, double t) {
  return {path.position_at(t), path.velocity_at(t)};
}

double action(const FourierLoop& loop, const MassSystem& ms,
              const QuadratureSpec& quad) {
  if (ms.n() != loop.nbody || ms.dim != loop.dim)
    throw DimMismatch("action: system/loop shape mismatch");
  check_loop_quad(loop, quad);
  const double T = loop.period;

  // Spectral kinetic term: (T/4) sum_i m_i sum_k w_k^2 (A_k^2 + B_k^2).
  double kinetic = 0.0;
  for (int i = 0; i < loop.nbody; ++i) {
    double acc = 0.0;
    for (int a = 0; a < loop.dim; ++a) {
      const auto row = loop.coeff.row(loop.row_of(i, a));
      for (int k = 1; k <= loop.modes; ++k) {
        const double w = 2.0 * M_PI * k / T;
        acc += w * w * (row[k] * row[k] +
                        row[loop.modes + k] * row[loop.modes + k]);
      }
    }
    kinetic += ms.masses[i] * acc;
  }
  kinetic *= T / 4.0;

  const int M = quad.samples;
  double pot = 0.0;
  Vector phi, dphi;
  for (int j = 0; j < M; ++j) {
    const double t = T * j / M;
    basis_at(t, T, loop.modes, phi, dphi);
    Vector col = loop.coeff * phi;
    pot += potential_of_column(col, loop.nbody, loop.dim, ms, t, nullptr);
  }
  pot *= T / M;
  return kinetic + pot;
}

double action(const NodePath& path, const MassSystem& ms) {
  if (ms.n() != path.nbody() || ms.dim != path.dim())
    throw DimMismatch("action: system/path shape mismatch");
  if (path.nodes() < 1) throw GridError("action: NodePath needs >= 1 interior node");
  const double h = path.spacing();
  const int last = path.nodes() + 1;

  double kinetic = 0.0;
  for (int s = 0; s < last; ++s) {
    const Matrix diff = path.node(s + 1) - path.node(s);
    for (int i = 0; i < path.nbody(); ++i)
      kinetic += ms.masses[i] * diff.row(i).squaredNorm();
  }
  kinetic /= 2.0 * h;

  double pot = 0.0;
  for (int k = 0; k <= last; ++k) {
    const double weight = (k == 0 || k == last) ? 0.5 : 1.0;
    try {
      Vector col(path.nbody() * path.dim());
      const Matrix& x = path.node(k);
      for (int i = 0; i < path.nbody(); ++i)
        for (int a = 0; a < path.dim(); ++a) col[i * path.dim() + a] = x(i, a);
      pot += weight * potential_of_column(col, path.nbody(), path.dim(), ms,
                                          k * h, nullptr);
    } catch (const CollisionError&) {
      // Endpoint collisions are admissible inputs of the fixed-ends problem;
      // the endpoint singularity of U is integrable, so its trapezoid term is
      // dropped.  Interior collisions stay fatal.
      if (k != 0 && k != last) throw;
    }
  }
  pot *= h;
  return kinetic + pot;
}

Vector action_gradient(const FourierLoop& loop, const MassSystem& ms,
                       const QuadratureSpec& quad) {
  if (ms.n() != loop.nbody || ms.dim != loop.dim)
    throw DimMismatch("action_gradient: system/loop shape mismatch");
  check_loop_quad(loop, quad);
  const double T = loop.period;
  const int M = quad.samples;

  Matrix grad = Matrix::Zero(loop.rows(), loop.cols());

  // Kinetic part, exact.
  for (int i = 0; i < loop.nbody; ++i) {
    for (int a = 0; a < loop.dim; ++a) {
      const int r = loop.row_of(i, a);
      for (int k = 1; k <= loop.modes; ++k) {
        const double w = 2.0 * M_PI * k / T;
        grad(r, k) = 0.5 * T * ms.masses[i] * w * w * loop.coeff(r, k);
        grad(r, loop.modes + k) =
            0.5 * T * ms.masses[i] * w * w * loop.coeff(r, loop.modes + k);
      }
    }
  }

  // Potential part by the same uniform grid as the action.
  Vector phi, dphi, force;
  for (int j = 0; j < M; ++j) {
    const double t = T * j / M;
    basis_at(t, T, loop.modes, phi, dphi);
    Vector col = loop.coeff * phi;
    potential_of_column(col, loop.nbody, loop.dim, ms, t, &force);
    grad.noalias() += (T / M) * force * phi.transpose();
  }

  Vector out(loop.rows() * loop.cols());
  int p = 0;
  for (int r = 0; r < loop.rows(); ++r)
    for (int c = 0; c < loop.cols(); ++c) out[p++] = grad(r, c);
  return out;
}

Vector action_gradient(const NodePath& path, const MassSystem& ms) {
  const int n = path.nbody();
  const int d = path.dim();
  const double h = path.spacing();
  Vector out(path.nodes() * n * d);
  for (int k = 1; k <= path.nodes(); ++k) {
    Matrix g = Matrix::Zero(n, d);
    const Matrix kin = 2.0 * path.node(k) - path.node(k - 1) - path.node(k + 1);
    Configuration cfg(path.node(k));
    Configuration acc = grad_potential(cfg, ms);
    for (int i = 0; i < n; ++i)
      g.row(i) = ms.masses[i] * (kin.row(i) / h + h * acc.r.row(i));
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < d; ++a) out[(k - 1) * n * d + i * d + a] = g(i, a);
  }
  return out;
}

std::pair<Matrix, Matrix> action_endpoint_gradient(const NodePath& path,
                                                   const MassSystem& ms) {
  const int n = path.nbody();
  const double h = path.spacing();
  const int last = path.nodes() + 1;

  Matrix g0 = (path.node(0) - path.node(1)) / h;
  Matrix g1 = (path.node(last) - path.node(last - 1)) / h;
  Configuration a0 = grad_potential(Configuration(path.node(0)), ms);
  Configuration a1 = grad_potential(Configuration(path.node(last)), ms);
  for (int i = 0; i < n; ++i) {
    g0.row(i) = ms.masses[i] * (g0.row(i) + 0.5 * h * a0.r.row(i));
    g1.row(i) = ms.masses[i] * (g1.row(i) + 0.5 * h * a1.r.row(i));
  }
  return {g0, g1};
}

FourierLoop blow_up(const FourierLoop& loop, double lambda) {
  if (lambda <= 0.0) throw BadParams("blow_up: lambda must be positive");
  FourierLoop out = loop;
  out.period = loop.period / lambda;
  out.coeff *= std::pow(lambda, -2.0 / 3.0);
  return out;
}

NodePath blow_up(const NodePath& path, double lambda) {
  if (lambda <= 0.0) throw BadParams("blow_up: lambda must be positive");
  NodePath out = path;
  const double s = std::pow(lambda, -2.0 / 3.0);
  out.x_start.r *= s;
  out.x_end.r *= s;
  for (Matrix& m : out.interior) m *= s;
  out.duration = path.duration / lambda;
  return out;
}

namespace {

MinDistance min_distance_of_samples(const std::function<Matrix(double)>& pos,
                                    const std::vector<double>& times) {
  MinDistance best;
  best.value = std::numeric_limits<double>::infinity();
  for (double t : times) {
    const Matrix x = pos(t);
    for (int i = 0; i < x.rows(); ++i) {
      for (int j = i + 1; j < x.rows(); ++j) {
        const double d = (x.row(i) - x.row(j)).norm();
        if (d < best.value) best = {d, t, i, j};
      }
    }
  }
  return best;
}

}  // namespace

MinDistance min_pairwise_distance(const FourierLoop& loop,
                                  const QuadratureSpec& quad) {
  std::vector<double> times(quad.samples);
  for (int j = 0; j < quad.samples; ++j)
    times[j] = loop.period * j / quad.samples;
  return min_distance_of_samples([&](double t) { return loop.position_at(t); },
                                 times);
}

MinDistance min_pairwise_distance(const NodePath& path,
                                  const QuadratureSpec& quad) {
  const int M = std::max(2, quad.samples);
  std::vector<double> times(M);
  for (int j = 0; j < M; ++j) times[j] = path.duration * j / (M - 1);
  return min_distance_of_samples([&](double t) { return path.position_at(t); },
                                 times);
}

void gauss_legendre(int npts, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  nodes.assign(npts, 0.0);
  weights.assign(npts, 0.0);
  const int half = (npts + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (npts + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < npts; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
      }
      pp = npts * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[npts - 1 - i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[npts - 1 - i] = weights[i];
  }
}

double action_quadrature(const PathFn& path, const MassSystem& ms, double t0,
                         double t1, int panels, int npts) {
  if (t1 <= t0) throw BadParams("action_quadrature: empty interval");
  std::vector<double> gx, gw;
  gauss_legendre(npts, gx, gw);
  const double h = (t1 - t0) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = t0 + p * h;
    for (int q = 0; q < npts; ++q) {
      const double t = a + 0.5 * h * (gx[q] + 1.0);
      auto [pos, vel] = path(t);
      double lag = 0.0;
      for (int i = 0; i < ms.n(); ++i)
        lag += 0.5 * ms.masses[i] * vel.row(i).squaredNorm();
      lag += potential(Configuration(pos), ms);
      total += 0.5 * h * gw[q] * lag;
    }
  }
  return total;
}

double action_on_interval(const FourierLoop& loop, const MassSystem& ms,
                          double t0, double t1, int panels, int npts) {
  return action_quadrature([&](double t) { return eval_path(loop, t); }, ms, t0,
                           t1, panels, npts);
}

}  // namespace orbitforge
