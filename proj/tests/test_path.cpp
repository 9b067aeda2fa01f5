#include <doctest.h>

#include <cmath>
#include <limits>

#include "orbitforge/path.hpp"
#include "orbitforge/verify.hpp"
#include "oracles.hpp"

using namespace orbitforge;

namespace {

// A well-separated random loop: bodies parked at distinct anchors with small
// geometrically decaying oscillations.
FourierLoop separated_random_loop(unsigned long seed, int nbody, int dim,
                                  int modes, double period) {
  oracles::NormalStream rnd(seed);
  FourierLoop loop(nbody, dim, modes, period);
  for (int i = 0; i < nbody; ++i) {
    for (int a = 0; a < dim; ++a) {
      auto row = loop.coeff.row(loop.row_of(i, a));
      row[0] = 3.0 * (i + 1) * (a == 0 ? 1.0 : 0.3) + 0.3 * rnd();
      double fac = 0.25;
      for (int k = 1; k <= modes; ++k) {
        row[k] = fac * rnd();
        row[modes + k] = fac * rnd();
        fac *= 0.5;
      }
    }
  }
  return loop;
}

// Circular two-body loop of separation a: bodies opposite on a circle.
FourierLoop circle_pair(double a, double period) {
  FourierLoop loop(2, 2, 1, period);
  const double r = 0.5 * a;
  loop.coeff(loop.row_of(0, 0), 1) = r;   // cos, x
  loop.coeff(loop.row_of(0, 1), 2) = r;   // sin, y
  loop.coeff(loop.row_of(1, 0), 1) = -r;
  loop.coeff(loop.row_of(1, 1), 2) = -r;
  return loop;
}

NodePath parabolic_node_path(double T, int nodes) {
  // Two bodies: one at rest at the origin is not valid (collision at t=0),
  // so park them far apart and send body 1 on the parabolic profile away
  // from a distant body 0.  Used only for blow-up shape checks.
  const double g = std::cbrt(4.5);
  NodePath p;
  p.duration = T;
  auto at = [&](double t) {
    Matrix m(2, 2);
    m << -50.0, 0.0, g * std::cbrt(t * t), 0.0;
    return m;
  };
  p.x_start = Configuration(at(0.0));
  p.x_end = Configuration(at(T));
  p.interior.resize(nodes);
  const double h = T / (nodes + 1);
  for (int k = 1; k <= nodes; ++k) p.interior[k - 1] = at(k * h);
  return p;
}

}  // namespace

TEST_SUITE("path") {

TEST_CASE("eval_path basics") {
  SUBCASE("constant loop has zero velocity") {
    FourierLoop loop(2, 2, 3, 5.0);
    loop.coeff(0, 0) = 1.0;
    loop.coeff(2, 0) = -1.0;
    for (double t : {0.0, 1.3, 4.9})
      CHECK(loop.velocity_at(t).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("single-mode circle has speed 2 pi rho / T") {
    const double rho = 1.7, T = 3.0;
    FourierLoop loop(2, 2, 1, T);
    loop.coeff(loop.row_of(0, 0), 1) = rho;
    loop.coeff(loop.row_of(0, 1), 2) = rho;
    loop.coeff(loop.row_of(1, 0), 0) = 5.0;
    for (double t : {0.0, 0.4, 2.2})
      CHECK(loop.velocity_at(t).row(0).norm() ==
            doctest::Approx(2.0 * M_PI * rho / T).epsilon(1e-12));
  }

  SUBCASE("periodicity: t and t + T agree") {
    FourierLoop loop = separated_random_loop(5, 3, 3, 6, 2.7);
    for (double t : {0.1, 1.9}) {
      CHECK((loop.position_at(t) - loop.position_at(t + loop.period))
                .cwiseAbs()
                .maxCoeff() <= 1e-12);
    }
  }

  SUBCASE("node path evaluation hits stored nodes and rejects out-of-range") {
    NodePath p = parabolic_node_path(1.0, 7);
    const double h = p.spacing();
    for (int k = 1; k <= 7; ++k)
      CHECK((p.position_at(k * h) - p.interior[k - 1]).cwiseAbs().maxCoeff() <=
            1e-12);
    CHECK((p.position_at(0.0) - p.x_start.r).cwiseAbs().maxCoeff() == 0.0);
    CHECK((p.position_at(1.0) - p.x_end.r).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(p.position_at(1.5), OutOfRange);
    CHECK_THROWS_AS(p.velocity_at(-0.5), OutOfRange);
  }
}

TEST_CASE("action of a uniformly translating pair") {
  // Both bodies drift with the same velocity at fixed separation a: the
  // integrand is constant, so the nodal action is exact.
  MassSystem ms = MassSystem::equal(2, 2);
  const double a = 2.0, T = 3.0;
  Eigen::RowVector2d v(0.4, -0.1);
  NodePath p;
  p.duration = T;
  const int N = 9;
  auto at = [&](double t) {
    Matrix m(2, 2);
    m.row(0) = t * v;
    m.row(1) = t * v;
    m(1, 0) += a;
    return m;
  };
  p.x_start = Configuration(at(0.0));
  p.x_end = Configuration(at(T));
  p.interior.resize(N);
  for (int k = 1; k <= N; ++k) p.interior[k - 1] = at(k * T / (N + 1));
  const double expected = T * (0.5 * 2.0 * v.squaredNorm() + 1.0 / a);
  CHECK(action(p, ms) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("rotating equilateral arc action equals the closed form") {
  // Rotation by pi/3 over T/12 at the relative-equilibrium radius.
  MassSystem ms = MassSystem::equal(3, 2);
  for (double T : {1.0, 12.0}) {
    const double w = (M_PI / 3.0) / (T / 12.0);
    const double side = std::cbrt(3.0 / (w * w));
    const double rc = side / std::sqrt(3.0);
    PathFn arc = [&](double t) {
      Matrix pos(3, 2), vel(3, 2);
      for (int i = 0; i < 3; ++i) {
        const double th = 2.0 * M_PI * i / 3.0 + w * t;
        pos(i, 0) = rc * std::cos(th);
        pos(i, 1) = rc * std::sin(th);
        vel(i, 0) = -rc * w * std::sin(th);
        vel(i, 1) = rc * w * std::cos(th);
      }
      return std::make_pair(pos, vel);
    };
    const double got = action_quadrature(arc, ms, 0.0, T / 12.0, 32, 8);
    CHECK(got == doctest::Approx(a2_hat(T)).epsilon(1e-10));
  }
  CHECK(a2_hat(1.0) == doctest::Approx(1.4053909).epsilon(1e-6));
}

TEST_CASE("parabolic ejection action matches the closed form") {
  // Kepler problem with attraction 1: L(t) = (2/gamma) t^{-2/3} integrates to
  // 6 (T^{1/3} - t1^{1/3}) / gamma.
  const double g = std::cbrt(4.5);
  const double t1 = 0.05, T = 2.0;
  const double oracle = oracles::gl_integrate(
      [&](double t) {
        const double r = g * std::cbrt(t * t);
        const double v = (2.0 / 3.0) * g / std::cbrt(t);
        return 0.5 * v * v + 1.0 / r;
      },
      t1, T, 256, 12);
  const double closed = 6.0 * (std::cbrt(T) - std::cbrt(t1)) / g;
  CHECK(oracle == doctest::Approx(closed).epsilon(1e-9));
}

TEST_CASE("action gradient agrees with finite differences") {
  MassSystem ms = MassSystem::equal(3, 2);
  QuadratureSpec quad{128};
  oracles::NormalStream rnd(17);
  for (int trial = 0; trial < 20; ++trial) {
    FourierLoop loop = separated_random_loop(100 + trial, 3, 2, 5, 2.0);
    Vector g = action_gradient(loop, ms, quad);
    Vector dir(g.size());
    for (int i = 0; i < dir.size(); ++i) dir[i] = rnd();
    dir.normalize();
    const double h = 1e-5;
    FourierLoop plus = FourierLoop::from_flat(loop.flatten() + h * dir, 3, 2, 5,
                                              loop.period);
    FourierLoop minus = FourierLoop::from_flat(loop.flatten() - h * dir, 3, 2, 5,
                                               loop.period);
    const double fd =
        (action(plus, ms, quad) - action(minus, ms, quad)) / (2.0 * h);
    CHECK(fd == doctest::Approx(g.dot(dir)).epsilon(1e-6));
  }
}

TEST_CASE("kinetic-only gradient of a single mode scales as (2 pi k / T)^2") {
  MassSystem ms = MassSystem::equal(2, 2);
  const double T = 2.0;
  QuadratureSpec quad{64};
  auto kinetic_grad_component = [&](int k, double c) {
    FourierLoop loop(2, 2, 8, T);
    loop.coeff(loop.row_of(0, 0), 0) = 10.0;  // separated anchors
    loop.coeff(loop.row_of(1, 0), 0) = -10.0;
    loop.coeff(loop.row_of(0, 1), k) = c;
    // Subtract the potential quadrature part computed independently, leaving
    // the spectral kinetic gradient.
    Vector g = action_gradient(loop, ms, quad);
    double pot_part = 0.0;
    {
      const double h = 1e-6;
      auto pot_only = [&](const FourierLoop& l) {
        double pot = 0.0;
        for (int j = 0; j < quad.samples; ++j) {
          const double t = T * j / quad.samples;
          pot += potential(Configuration(l.position_at(t)), ms);
        }
        return pot * T / quad.samples;
      };
      FourierLoop lp = loop, lm = loop;
      lp.coeff(loop.row_of(0, 1), k) += h;
      lm.coeff(loop.row_of(0, 1), k) -= h;
      pot_part = (pot_only(lp) - pot_only(lm)) / (2.0 * h);
    }
    const int idx = loop.row_of(0, 1) * loop.cols() + k;
    return g[idx] - pot_part;
  };
  const double c = 0.3;
  const double base = kinetic_grad_component(1, c);
  for (int k : {2, 4}) {
    const double got = kinetic_grad_component(k, c);
    CHECK(got == doctest::Approx(base * k * k).epsilon(1e-6));
  }
  const double w1 = 2.0 * M_PI / T;
  CHECK(base == doctest::Approx(0.5 * T * w1 * w1 * c).epsilon(1e-6));
}

TEST_CASE("exact relative equilibrium is a critical point of the discrete action") {
  MassSystem ms = MassSystem::equal(2, 2);
  const double T = 4.0;
  const double w = 2.0 * M_PI / T;
  const double a = std::cbrt(2.0 / (w * w));
  FourierLoop loop = circle_pair(a, T);
  QuadratureSpec quad{64};
  CHECK(action_gradient(loop, ms, quad).norm() <= 1e-10);
}

TEST_CASE("blow-up") {
  SUBCASE("lambda = 1 is the identity") {
    FourierLoop loop = separated_random_loop(9, 2, 2, 4, 3.0);
    FourierLoop same = blow_up(loop, 1.0);
    CHECK((same.coeff - loop.coeff).cwiseAbs().maxCoeff() == 0.0);
    CHECK(same.period == loop.period);
  }

  SUBCASE("action scaling identity on random smooth loops") {
    MassSystem ms = MassSystem::equal(3, 3);
    for (int trial = 0; trial < 10; ++trial) {
      FourierLoop loop = separated_random_loop(40 + trial, 3, 3, 4, 2.0);
      for (double lam : {0.5, 2.0, 3.0}) {
        const double T1 = 0.3, T2 = 0.9;
        FourierLoop scaled = blow_up(loop, lam);
        const double lhs = action_on_interval(scaled, ms, T1, T2, 96, 10);
        const double rhs = std::pow(lam, -1.0 / 3.0) *
                           action_on_interval(loop, ms, lam * T1, lam * T2, 96, 10);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
      }
    }
  }

  SUBCASE("the parabolic ejection profile is a fixed point") {
    NodePath p = parabolic_node_path(1.0, 15);
    NodePath q = blow_up(p, 2.0);
    NodePath direct = parabolic_node_path(0.5, 15);
    // Body 1 runs gamma t^{2/3}: rescaling reproduces the same profile on the
    // shrunken window.
    for (int k = 0; k < 15; ++k)
      CHECK(q.interior[k](1, 0) ==
            doctest::Approx(direct.interior[k](1, 0)).epsilon(1e-12));
    CHECK(q.duration == doctest::Approx(0.5));
  }

  SUBCASE("rejects nonpositive lambda") {
    FourierLoop loop = separated_random_loop(2, 2, 2, 2, 1.0);
    CHECK_THROWS_AS(blow_up(loop, 0.0), BadParams);
  }
}

TEST_CASE("minimum pairwise distance") {
  const double a = 1.5;
  FourierLoop tri(3, 2, 1, 1.0);
  const double rc = a / std::sqrt(3.0);
  for (int i = 0; i < 3; ++i) {
    const double th = 2.0 * M_PI * i / 3.0;
    tri.coeff(tri.row_of(i, 0), 1) = rc * std::cos(th);
    tri.coeff(tri.row_of(i, 1), 1) = rc * std::sin(th);
    tri.coeff(tri.row_of(i, 0), 2) = -rc * std::sin(th);
    tri.coeff(tri.row_of(i, 1), 2) = rc * std::cos(th);
  }
  MinDistance md = min_pairwise_distance(tri, QuadratureSpec{128});
  CHECK(md.value == doctest::Approx(a).epsilon(1e-12));

  SUBCASE("near-collision sample is found") {
    FourierLoop pair(2, 2, 1, 1.0);
    pair.coeff(pair.row_of(0, 0), 0) = 1.0;
    pair.coeff(pair.row_of(1, 0), 0) = -1.0;
    pair.coeff(pair.row_of(0, 0), 1) = -0.99;  // closest near t = 0
    pair.coeff(pair.row_of(1, 0), 1) = 0.99;
    MinDistance near = min_pairwise_distance(pair, QuadratureSpec{256});
    CHECK(near.value == doctest::Approx(0.02).epsilon(1e-6));
    CHECK(near.time == doctest::Approx(0.0));
  }

  SUBCASE("refinement never increases the sampled minimum") {
    FourierLoop loop = separated_random_loop(77, 3, 2, 5, 2.0);
    const double d1 = min_pairwise_distance(loop, QuadratureSpec{64}).value;
    const double d2 = min_pairwise_distance(loop, QuadratureSpec{128}).value;
    CHECK(d2 <= d1 + 1e-15);
  }
}

TEST_CASE("quadrature behavior") {
  MassSystem ms = MassSystem::equal(3, 3);
  FourierLoop loop = separated_random_loop(55, 3, 3, 6, 2.0);

  SUBCASE("spectral convergence on smooth loops") {
    const double a1 = action(loop, ms, QuadratureSpec{128});
    const double a2 = action(loop, ms, QuadratureSpec{256});
    CHECK(std::abs(a1 - a2) < 1e-8 * std::abs(a2));
  }

  SUBCASE("Parseval: spectral kinetic equals time-quadrature kinetic") {
    const int M = 4 * loop.modes;
    QuadratureSpec quad{M};
    double pot = 0.0, kin_time = 0.0;
    for (int j = 0; j < M; ++j) {
      const double t = loop.period * j / M;
      pot += potential(Configuration(loop.position_at(t)), ms);
      const Matrix v = loop.velocity_at(t);
      for (int i = 0; i < 3; ++i) kin_time += 0.5 * v.row(i).squaredNorm();
    }
    pot *= loop.period / M;
    kin_time *= loop.period / M;
    const double kin_spectral = action(loop, ms, quad) - pot;
    CHECK(kin_spectral == doctest::Approx(kin_time).epsilon(1e-10));
  }

  SUBCASE("anti-aliasing floor is enforced") {
    CHECK_THROWS_AS(action(loop, ms, QuadratureSpec{loop.modes * 4 - 1}),
                    BadParams);
  }

  SUBCASE("collision inside the grid names the sample and pair") {
    FourierLoop bad(2, 2, 1, 1.0);  // both bodies at the origin
    MassSystem two = MassSystem::equal(2, 2);
    try {
      action(bad, two, QuadratureSpec{16});
      CHECK(false);
    } catch (const CollisionError& e) {
      CHECK(e.body_a == 0);
      CHECK(e.body_b == 1);
    }
  }
}

}  // TEST_SUITE
