#include "orbitforge/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <future>
#include <random>

#include "orbitforge/verify.hpp"

namespace orbitforge {

namespace {

struct EngineProblem {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> grad;     // unprojected
  std::function<Vector(const Vector&)> project;  // onto feasible directions
  std::function<double(const Vector&)> min_dist;
  // Optional fixed initial inverse-Hessian (applied inside the two-loop
  // recursion); nodal problems use the inverse kinetic operator to tame the
  // O(N^2) stiffness of the second-difference term.
  std::function<Vector(const Vector&)> precondition;
  double floor = 0.0;
  // Constrained problems terminate on the projected gradient (the normal
  // component is the multiplier part of stationarity); symmetric loop
  // problems keep the full-gradient criterion (symmetric criticality).
  bool projected_criterion = false;
};

struct EngineResult {
  Vector x;
  double f = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  std::string termination;
  std::vector<double> trace;
};

// Limited-memory BFGS with backtracking sufficient-decrease line search.
// Steps whose minimum pairwise distance dips below the floor are rejected by
// shrinking; a search that only fails at the floor terminates the run with
// the collision-floor reason.
EngineResult lbfgs(const EngineProblem& P, Vector x,
                   const MinimizeOptions& opts) {
  EngineResult res;
  x = P.project(x);
  double f = P.value(x);
  Vector gfull = P.grad(x);
  Vector g = P.project(gfull);
  res.trace.push_back(f);

  std::deque<Vector> S, Y;
  std::deque<double> R;  // 1 / (s.y)

  auto direction = [&](const Vector& grad_in) {
    Vector q = grad_in;
    const int m = static_cast<int>(S.size());
    std::vector<double> alpha(m);
    for (int i = m - 1; i >= 0; --i) {
      alpha[i] = R[i] * S[i].dot(q);
      q -= alpha[i] * Y[i];
    }
    if (P.precondition) {
      Vector hq = P.precondition(q);
      if (m > 0)
        hq *= S.back().dot(Y.back()) /
              Y.back().dot(P.precondition(Y.back()));
      q = hq;
    } else if (m > 0) {
      q *= S.back().dot(Y.back()) / Y.back().squaredNorm();
    }
    for (int i = 0; i < m; ++i) {
      const double beta = R[i] * Y[i].dot(q);
      q += (alpha[i] - beta) * S[i];
    }
    return Vector(-q);
  };

  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    res.grad_norm = P.projected_criterion ? g.norm() : gfull.norm();
    if (res.grad_norm <= opts.gtol) {
      res.termination = "converged";
      break;
    }

    Vector d = P.project(direction(g));
    double slope = g.dot(d);
    if (!(slope < 0.0)) {  // bad curvature: steepest descent restart
      S.clear();
      Y.clear();
      R.clear();
      d = -g;
      slope = g.dot(d);
    }

    double alpha = 1.0;
    bool accepted = false;
    bool floor_hit = false;
    Vector xt;
    double ft = 0.0;
    const double dist_here = P.min_dist ? P.min_dist(x) : 0.0;
    while (alpha >= 1e-16) {
      xt = x + alpha * d;
      try {
        if (P.min_dist) {
          const double dist = P.min_dist(xt);
          // Reject steps dragged toward a collision; escaping an already
          // tight spot is still allowed.
          if (dist < P.floor && dist < dist_here) {
            floor_hit = true;
            alpha *= opts.backtrack;
            continue;
          }
        }
        ft = P.value(xt);
      } catch (const CollisionError&) {
        floor_hit = true;
        alpha *= opts.backtrack;
        continue;
      }
      if (ft <= f + opts.sufficient_decrease * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= opts.backtrack;
    }

    if (!accepted) {
      if (floor_hit) {
        res.termination = "collision-floor";
      } else if (!S.empty()) {
        // Retry once from a clean steepest-descent state.
        S.clear();
        Y.clear();
        R.clear();
        continue;
      } else {
        res.termination = "max-iter";
      }
      break;
    }

    Vector gt_full = P.grad(xt);
    Vector gt = P.project(gt_full);
    Vector s = xt - x;
    Vector y = gt - g;
    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm()) {
      S.push_back(s);
      Y.push_back(y);
      R.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > opts.memory) {
        S.pop_front();
        Y.pop_front();
        R.pop_front();
      }
    }
    x = P.project(xt);
    f = ft;
    gfull = gt_full;
    g = gt;
    res.trace.push_back(f);
  }
  if (res.termination.empty()) res.termination = "max-iter";
  res.x = x;
  res.f = f;
  res.grad_norm = P.projected_criterion ? g.norm() : gfull.norm();
  res.iterations = iter;
  return res;
}

// Thomas solve of tridiag(-1, diag, -1) x = rhs, in place.
void solve_tridiag(std::vector<double> diag, std::vector<double>& rhs) {
  const int n = static_cast<int>(diag.size());
  for (int k = 1; k < n; ++k) {
    diag[k] -= 1.0 / diag[k - 1];
    rhs[k] += rhs[k - 1] / diag[k - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (int k = n - 2; k >= 0; --k) rhs[k] = (rhs[k] + rhs[k + 1]) / diag[k];
}

// Orthogonal projection of every coefficient column onto the mass-balanced
// subspace sum_i m_i c_i = 0 (per axis).
void mass_orthogonalize(FourierLoop& loop, const MassSystem& ms) {
  const double mm = ms.masses.squaredNorm();
  for (int a = 0; a < loop.dim; ++a) {
    for (int c = 0; c < loop.cols(); ++c) {
      double dot = 0.0;
      for (int i = 0; i < loop.nbody; ++i)
        dot += ms.masses[i] * loop.coeff(loop.row_of(i, a), c);
      const double fac = dot / mm;
      for (int i = 0; i < loop.nbody; ++i)
        loop.coeff(loop.row_of(i, a), c) -= fac * ms.masses[i];
    }
  }
}

double loop_scale(const FourierLoop& loop) {
  double s = 0.0;
  for (int j = 0; j < 32; ++j) {
    const Matrix x = loop.position_at(loop.period * j / 32.0);
    s = std::max(s, x.cwiseAbs().maxCoeff());
  }
  return s > 0.0 ? s : 1.0;
}

}  // namespace

std::pair<FourierLoop, MinimizeReport> minimize_loop(const MassSystem& ms,
                                                     const SymmetryGroup& G,
                                                     const FourierLoop& init,
                                                     const MinimizeOptions& opts) {
  if (init.nbody != ms.n() || init.dim != ms.dim)
    throw DimMismatch("minimize_loop: system/loop shape mismatch");
  if (G.permutes_bodies() &&
      (ms.masses.array() != ms.masses[0]).any())
    throw BadParams("minimize_loop: body-permuting groups require equal masses");

  const int modes = init.modes;
  QuadratureSpec quad{opts.samples > 0 ? opts.samples
                                       : std::max(256, 4 * modes)};

  FourierLoop start = group_average(G, init);
  start.mass_balance(ms);

  auto to_loop = [&](const Vector& v) {
    return FourierLoop::from_flat(v, ms.n(), ms.dim, modes, init.period);
  };

  EngineProblem P;
  P.value = [&](const Vector& v) { return action(to_loop(v), ms, quad); };
  P.grad = [&](const Vector& v) { return action_gradient(to_loop(v), ms, quad); };
  P.project = [&](const Vector& v) {
    FourierLoop l = group_average(G, to_loop(v));
    mass_orthogonalize(l, ms);
    return l.flatten();
  };
  P.min_dist = [&](const Vector& v) {
    return min_pairwise_distance(to_loop(v), quad).value;
  };
  P.floor = opts.dmin * loop_scale(start);

  EngineResult r = lbfgs(P, start.flatten(), opts);
  if (r.termination == "collision-floor" && opts.throw_on_floor)
    throw CollisionFloor("minimize_loop: dragged toward a collision",
                         P.min_dist(r.x), P.floor);

  FourierLoop out = to_loop(r.x);
  MinimizeReport rep;
  rep.action = r.f;
  rep.grad_norm = r.grad_norm;
  rep.iterations = r.iterations;
  rep.min_distance = min_pairwise_distance(out, quad).value;
  rep.termination = r.termination;
  rep.action_trace = std::move(r.trace);
  rep.seed = opts.seed;
  return {out, rep};
}

std::pair<NodePath, MinimizeReport> minimize_fixed_ends(
    const MassSystem& ms, const Configuration& x_start,
    const Configuration& x_end, double duration, const NodePath& init,
    const MinimizeOptions& opts) {
  if (duration <= 0.0) throw BadParams("minimize_fixed_ends: T must be positive");
  if (init.nodes() < 1) throw BadParams("minimize_fixed_ends: need interior nodes");
  const int n = ms.n();
  const int d = ms.dim;
  NodePath base = init;
  base.duration = duration;
  base.x_start = reduce_to_center_of_mass(x_start, ms);
  base.x_end = reduce_to_center_of_mass(x_end, ms);
  const int N = base.nodes();

  auto to_path = [&](const Vector& v) {
    NodePath p = base;
    for (int k = 0; k < N; ++k)
      for (int i = 0; i < n; ++i)
        for (int a = 0; a < d; ++a) p.interior[k](i, a) = v[k * n * d + i * d + a];
    return p;
  };
  Vector x0(N * n * d);
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < d; ++a) x0[k * n * d + i * d + a] = base.interior[k](i, a);

  EngineProblem P;
  P.value = [&](const Vector& v) { return action(to_path(v), ms); };
  P.grad = [&](const Vector& v) { return action_gradient(to_path(v), ms); };
  P.project = [](const Vector& v) { return v; };
  P.min_dist = [&](const Vector& v) {
    // Interior only: endpoint collisions are admissible inputs.
    NodePath p = to_path(v);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= p.nodes(); ++k) {
      const Matrix& x = p.node(k);
      for (int i = 0; i < x.rows(); ++i)
        for (int j = i + 1; j < x.rows(); ++j)
          best = std::min(best, (x.row(i) - x.row(j)).norm());
    }
    return best;
  };
  const double scale = std::max(configuration_scale(base.x_start.r),
                                configuration_scale(base.x_end.r));
  P.floor = opts.dmin * scale;
  const double h = base.spacing();
  P.precondition = [&, h](const Vector& v) {
    Vector out(v.size());
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < d; ++a) {
        std::vector<double> diag(N, 2.0), rhs(N);
        for (int k = 0; k < N; ++k) rhs[k] = v[k * n * d + i * d + a];
        solve_tridiag(std::move(diag), rhs);
        for (int k = 0; k < N; ++k)
          out[k * n * d + i * d + a] = rhs[k] * h / ms.masses[i];
      }
    return out;
  };

  EngineResult r = lbfgs(P, x0, opts);
  if (r.termination == "collision-floor" && opts.throw_on_floor)
    throw CollisionFloor("minimize_fixed_ends: dragged toward a collision",
                         P.min_dist(r.x), P.floor);

  NodePath out = to_path(r.x);
  MinimizeReport rep;
  rep.action = r.f;
  rep.grad_norm = r.grad_norm;
  rep.iterations = r.iterations;
  rep.min_distance = P.min_dist(r.x);
  rep.termination = r.termination;
  rep.action_trace = std::move(r.trace);
  rep.seed = opts.seed;
  return {out, rep};
}

std::pair<NodePath, MinimizeReport> minimize_p12(const MassSystem& ms, double u,
                                                 double period,
                                                 const MinimizeOptions& opts) {
  if (ms.n() != 3 || ms.dim != 3 || (ms.masses.array() != 1.0).any())
    throw BadParams("minimize_p12: requires 3 unit masses in dim 3");
  const BoundaryConstraint bc = p12_constraint(u);
  const int N = opts.nodes > 0 ? opts.nodes : 128;
  const int n = 3, d = 3;

  NodePath arc = lagrange_arc_p12(u, period, N);
  NodePath xi = p12_vertical_variation(period, N);
  const double bump = 0.2 * configuration_scale(arc.x_start.r);
  NodePath start = arc;
  start.x_start.r += bump * xi.x_start.r;
  start.x_end.r += bump * xi.x_end.r;
  for (int k = 0; k < N; ++k) start.interior[k] += bump * xi.interior[k];
  start.x_start.r = bc.start.project(start.x_start.r);
  start.x_end.r = bc.end.project(start.x_end.r);

  // Variable layout: [start block | interior nodes | end block].
  const int blk = n * d;
  auto to_path = [&](const Vector& v) {
    NodePath p = start;
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < d; ++a) {
        p.x_start.r(i, a) = v[i * d + a];
        p.x_end.r(i, a) = v[blk + N * blk + i * d + a];
      }
    for (int k = 0; k < N; ++k)
      for (int i = 0; i < n; ++i)
        for (int a = 0; a < d; ++a)
          p.interior[k](i, a) = v[blk + k * blk + i * d + a];
    return p;
  };
  auto from_path = [&](const NodePath& p) {
    Vector v(blk * (N + 2));
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < d; ++a) {
        v[i * d + a] = p.x_start.r(i, a);
        v[blk + N * blk + i * d + a] = p.x_end.r(i, a);
      }
    for (int k = 0; k < N; ++k)
      for (int i = 0; i < n; ++i)
        for (int a = 0; a < d; ++a) v[blk + k * blk + i * d + a] = p.interior[k](i, a);
    return v;
  };

  EngineProblem P;
  P.value = [&](const Vector& v) { return action(to_path(v), ms); };
  P.grad = [&](const Vector& v) {
    NodePath p = to_path(v);
    Vector g(blk * (N + 2));
    auto [g0, g1] = action_endpoint_gradient(p, ms);
    Vector gi = action_gradient(p, ms);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < d; ++a) {
        g[i * d + a] = g0(i, a);
        g[blk + N * blk + i * d + a] = g1(i, a);
      }
    for (int k = 0; k < N * blk; ++k) g[blk + k] = gi[k];
    return g;
  };
  P.project = [&](const Vector& v) {
    Vector w = v;
    Matrix b0(n, d), b1(n, d);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < d; ++a) {
        b0(i, a) = v[i * d + a];
        b1(i, a) = v[blk + N * blk + i * d + a];
      }
    b0 = bc.start.project(b0);
    b1 = bc.end.project(b1);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < d; ++a) {
        w[i * d + a] = b0(i, a);
        w[blk + N * blk + i * d + a] = b1(i, a);
      }
    return w;
  };
  P.min_dist = [&](const Vector& v) {
    NodePath p = to_path(v);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= p.nodes() + 1; ++k) {
      const Matrix& x = p.node(k);
      for (int i = 0; i < x.rows(); ++i)
        for (int j = i + 1; j < x.rows(); ++j)
          best = std::min(best, (x.row(i) - x.row(j)).norm());
    }
    return best;
  };
  P.floor = opts.dmin * configuration_scale(arc.x_start.r);
  P.projected_criterion = true;  // endpoints are free only within their sets
  const double h = arc.spacing();
  P.precondition = [&, h](const Vector& v) {
    // Kinetic chains include the free endpoints; a small diagonal shift keeps
    // the endpoint-translation mode invertible.
    Vector out(v.size());
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < d; ++a) {
        std::vector<double> diag(N + 2, 2.25), rhs(N + 2);
        diag.front() = diag.back() = 1.25;
        rhs[0] = v[i * d + a];
        for (int k = 1; k <= N; ++k) rhs[k] = v[blk + (k - 1) * blk + i * d + a];
        rhs[N + 1] = v[blk + N * blk + i * d + a];
        solve_tridiag(std::move(diag), rhs);
        out[i * d + a] = rhs[0] * h;
        for (int k = 1; k <= N; ++k) out[blk + (k - 1) * blk + i * d + a] = rhs[k] * h;
        out[blk + N * blk + i * d + a] = rhs[N + 1] * h;
      }
    return out;
  };

  EngineResult r = lbfgs(P, from_path(start), opts);
  if (r.termination == "collision-floor" && opts.throw_on_floor)
    throw CollisionFloor("minimize_p12: dragged toward a collision",
                         P.min_dist(r.x), P.floor);

  NodePath out = to_path(r.x);
  MinimizeReport rep;
  rep.action = r.f;
  rep.grad_norm = r.grad_norm;
  rep.iterations = r.iterations;
  rep.min_distance = P.min_dist(r.x);
  rep.termination = r.termination;
  rep.action_trace = std::move(r.trace);
  rep.seed = opts.seed;
  return {out, rep};
}

FourierLoop random_init(const MassSystem& ms, double period, unsigned long seed,
                        int modes, double amplitude, const SymmetryGroup& G) {
  if (amplitude < 0.0) throw BadParams("random_init: amplitude must be >= 0");
  std::mt19937_64 rng(seed);
  auto uniform = [&]() {  // (0, 1], portable across standard libraries
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  };
  auto normal = [&]() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  };

  FourierLoop loop(ms.n(), ms.dim, modes, period);
  const double decay = 0.55;
  for (int r = 0; r < loop.rows(); ++r) {
    loop.coeff(r, 0) = amplitude * normal();
    double fac = amplitude;
    for (int k = 1; k <= modes; ++k) {
      fac *= decay;
      loop.coeff(r, k) = fac * normal();
      loop.coeff(r, modes + k) = fac * normal();
    }
  }
  loop = group_average(G, loop);
  loop.mass_balance(ms);
  return loop;
}

MultistartResult multistart_minimize_loop(const MassSystem& ms,
                                          const SymmetryGroup& G, double period,
                                          int modes, double amplitude,
                                          const MinimizeOptions& opts,
                                          int starts, int threads) {
  if (starts < 1) throw BadParams("multistart: need >= 1 start");
  threads = std::max(1, threads);

  std::vector<FourierLoop> loops(starts);
  std::vector<MinimizeReport> reports(starts);
  auto run_one = [&](int idx) {
    MinimizeOptions o = opts;
    o.seed = opts.seed + static_cast<unsigned long>(idx);
    FourierLoop init = random_init(ms, period, o.seed, modes, amplitude, G);
    auto [loop, rep] = minimize_loop(ms, G, init, o);
    loops[idx] = std::move(loop);
    reports[idx] = std::move(rep);
  };

  for (int base = 0; base < starts; base += threads) {
    std::vector<std::future<void>> batch;
    const int hi = std::min(starts, base + threads);
    for (int i = base; i < hi; ++i)
      batch.push_back(std::async(std::launch::async, run_one, i));
    for (auto& f : batch) f.get();
  }

  // Lowest action wins; converged runs take precedence, ties by seed order.
  int best = -1;
  for (int i = 0; i < starts; ++i) {
    if (best < 0) {
      best = i;
      continue;
    }
    const bool ci = reports[i].converged(), cb = reports[best].converged();
    if ((ci && !cb) || (ci == cb && reports[i].action < reports[best].action))
      best = i;
  }
  MultistartResult out;
  out.best = loops[best];
  out.best_report = reports[best];
  out.runs = std::move(reports);
  return out;
}

}  // namespace orbitforge
