#include "orbitforge/marchal.hpp"

#include <cmath>
#include <functional>

#include "orbitforge/dynamics.hpp"
#include "orbitforge/path.hpp"

namespace orbitforge {

namespace {

double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int panels, int npts = 8) {
  std::vector<double> gx, gw;
  gauss_legendre(npts, gx, gw);
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (int q = 0; q < npts; ++q)
      total += 0.5 * h * gw[q] * f(lo + 0.5 * h * (gx[q] + 1.0));
  }
  return total;
}

// Monotone-crossing bisection of f on [lo, hi] with f(lo) < 0 < f(hi).
double bisect(const std::function<double(double)>& f, double lo, double hi) {
  for (int i = 0; i < 140; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ParabolicEjection::ParabolicEjection(int dim, double attraction_, double horizon_)
    : gamma(std::cbrt(4.5 * attraction_)), attraction(attraction_),
      horizon(horizon_) {
  if (dim != 2 && dim != 3) throw BadParams("ParabolicEjection: dim must be 2 or 3");
  if (attraction <= 0.0) throw BadParams("ParabolicEjection: attraction must be > 0");
  if (horizon <= 0.0) throw BadParams("ParabolicEjection: horizon must be > 0");
  direction = Vector::Zero(dim);
  direction[0] = 1.0;
}

Vector ParabolicEjection::velocity(double t) const {
  if (t <= 0.0) throw OutOfRange("ParabolicEjection: velocity needs t > 0");
  return (2.0 / 3.0) * gamma / std::cbrt(t) * direction;
}

double ParabolicEjection::kepler_residual_max(int samples) const {
  double worst = 0.0;
  for (int i = 1; i <= samples; ++i) {
    const double t = horizon * i / samples;
    const double t43 = std::pow(t, 4.0 / 3.0);
    const Vector acc = -(2.0 / 9.0) * gamma / t43 * direction;
    const Vector pull = -attraction / (gamma * gamma * t43) * direction;
    worst = std::max(worst, (acc - pull).norm());
  }
  return worst;
}

double ParabolicEjection::action_closed_form(double t1, double t2) const {
  if (t1 < 0.0 || t2 < t1) throw BadParams("action_closed_form: bad interval");
  return (4.0 * gamma * gamma / 3.0) * (std::cbrt(t2) - std::cbrt(t1));
}

double sphere_shell_potential(double r, double R) {
  if (R <= 0.0) throw BadParams("sphere_shell_potential: R must be positive");
  if (r < 0.0) throw BadParams("sphere_shell_potential: r must be >= 0");
  return r <= R ? 1.0 / R : 1.0 / r;
}

double disk_potential(double r, double R) {
  if (R <= 0.0) throw BadParams("disk_potential: R must be positive");
  if (r < 0.0) throw BadParams("disk_potential: r must be >= 0");
  if (r <= R) return M_PI / (2.0 * R);
  return std::asin(R / r) / R;
}

AveragedAction averaged_action_difference(int dim, double rho, double T,
                                          int panels) {
  if (dim != 2 && dim != 3) throw BadParams("averaged_action_difference: dim");
  if (rho <= 0.0 || T <= 0.0) throw BadParams("averaged_action_difference: rho, T");
  const ParabolicEjection ej(dim, 1.0, T);
  const double g = ej.gamma;
  if (rho > 0.1 * g * std::cbrt(T * T) * (1.0 + 1e-12))
    throw BadParams("averaged_action_difference: rho outside the small-rho window");

  auto radius = [&](double t) { return g * std::cbrt(t * t); };
  auto envelope = [&](double t) { return (1.0 - t / T) * rho; };
  const double t0 =
      bisect([&](double t) { return radius(t) - envelope(t); }, 0.0, T);

  // Inside part over [0, t0] with the substitution t = tau^3; the integrand
  // 3 tau^2 [U0 - 1/r] is smooth down to tau = 0.
  const double inside_u0 = dim == 3 ? 1.0 : M_PI / 2.0;
  auto inside = [&](double tau) {
    const double t = tau * tau * tau;
    return 3.0 * tau * tau * inside_u0 / envelope(t) - 3.0 / g;
  };
  double integral = integrate_gl(inside, 0.0, std::cbrt(t0), panels);

  if (dim == 2) {
    // Outside part over [t0, T].  The disk potential exceeds 1/r out there;
    // the excess is controlled through arcsin(x) <= x + (pi/2 - 1) x^3, whose
    // cubic term integrates to the (pi/2 - 1)/gamma t0^{1/3} piece of the
    // pi - 4 constant.  The returned difference is therefore the sharp upper
    // bound the argument runs on (the plain average sits strictly below it).
    auto outside = [&](double t) {
      const double r = radius(t);
      const double R = envelope(t);
      return (M_PI / 2.0 - 1.0) * R * R / (r * r * r);
    };
    // The integrand decays like t^{-2} from t0: geometric panels resolve it.
    double lo = t0;
    while (lo < T) {
      const double hi = std::min(T, 2.0 * lo);
      integral += integrate_gl(outside, lo, hi, 8);
      lo = hi;
    }
  }

  AveragedAction out;
  out.t0 = t0;
  out.action = ej.action_closed_form(0.0, T);
  out.difference = rho * rho / (2.0 * T) + integral;
  out.action_mean = out.action + out.difference;
  return out;
}

double montgomery_deformation_gain(double epsilon, double T, int panels) {
  if (epsilon < 0.0) throw BadParams("montgomery_deformation_gain: epsilon < 0");
  if (epsilon == 0.0) return 0.0;
  const double a = std::pow(epsilon, 1.5);
  const double b = a + epsilon;
  if (b >= T) throw BadParams("montgomery_deformation_gain: support exceeds T");
  const ParabolicEjection ej(3, 1.0, T);
  const double g = ej.gamma;
  auto radius = [&](double t) { return g * std::cbrt(t * t); };

  // phi = 1: potential gain with the t = tau^3 substitution.
  auto plateau = [&](double tau) {
    const double r = g * tau * tau;
    return 3.0 / g - 3.0 * tau * tau / std::sqrt(r * r + epsilon * epsilon);
  };
  double gain = integrate_gl(plateau, 0.0, std::cbrt(a), panels);

  // Linear ramp down: potential gain minus the kinetic cost eps/2.
  auto ramp = [&](double t) {
    const double r = radius(t);
    const double phi = (b - t) / epsilon;
    return 1.0 / r - 1.0 / std::sqrt(r * r + epsilon * epsilon * phi * phi);
  };
  gain += integrate_gl(ramp, a, b, panels);
  gain -= 0.5 * epsilon;
  return gain;
}

double nbody_averaged_bound(const Configuration& x0_in, const MassSystem& ms,
                            int k, double rho, double T, int panels) {
  if (k < 0 || k >= ms.n()) throw BadParams("nbody_averaged_bound: bad body index");
  if (rho <= 0.0 || T <= 0.0) throw BadParams("nbody_averaged_bound: rho, T");
  Configuration x0 = reduce_to_center_of_mass(x0_in, ms);
  if (centrality_residual(x0, ms) > 1e-8)
    throw BadParams("nbody_averaged_bound: configuration is not central");

  const double U0 = potential(x0, ms);
  const double I0 = mass_dot(x0.r, x0.r, ms);
  const double beta = std::cbrt(4.5 * U0 / I0);

  double cmin = std::numeric_limits<double>::infinity();
  std::vector<double> c(ms.n(), 0.0);
  for (int j = 0; j < ms.n(); ++j) {
    if (j == k) continue;
    c[j] = beta * (x0.r.row(j) - x0.r.row(k)).norm();
    cmin = std::min(cmin, c[j]);
  }
  if (rho > 0.1 * cmin * std::cbrt(T * T) * (1.0 + 1e-12))
    throw BadParams("nbody_averaged_bound: rho outside the small-rho window");

  auto envelope = [&](double t) { return (1.0 - t / T) * rho; };
  double bound = ms.masses[k] * rho * rho / (2.0 * T);
  for (int j = 0; j < ms.n(); ++j) {
    if (j == k) continue;
    const double cjk = c[j];
    const double tjk = bisect(
        [&](double t) { return cjk * std::cbrt(t * t) - envelope(t); }, 0.0, T);
    auto inside = [&](double tau) {
      const double t = tau * tau * tau;
      return 3.0 * tau * tau / envelope(t) - 3.0 / cjk;
    };
    bound += ms.masses[j] * ms.masses[k] *
             integrate_gl(inside, 0.0, std::cbrt(tjk), panels);
  }
  return bound;
}

}  // namespace orbitforge
