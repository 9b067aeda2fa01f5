// Test-side oracles: independent quadratures and brute-force averages used to
// freeze expected values.  Nothing here calls the implementation paths they
// check.
#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracles {

inline double gl_integrate(const std::function<double(double)>& f, double a,
                           double b, int panels = 64, int npts = 12) {
  // Gauss-Legendre nodes by Newton iteration on the Legendre recurrence.
  std::vector<double> gx(npts), gw(npts);
  for (int i = 0; i < (npts + 1) / 2; ++i) {
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
    gx[i] = -x;
    gx[npts - 1 - i] = x;
    gw[i] = gw[npts - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p)
    for (int q = 0; q < npts; ++q)
      total += 0.5 * h * gw[q] * f(a + p * h + 0.5 * h * (gx[q] + 1.0));
  return total;
}

/// Potential of the unit-mass disk of radius R with the projected-sphere
/// density, by direct 2d quadrature of sigma(s)/|r - s| in polar coordinates
/// with the radial substitution |s| = R sin(psi).
inline double disk_potential_quadrature(double r, double R, int npsi = 96,
                                        int ntheta = 512) {
  double total = 0.0;
  for (int it = 0; it < ntheta; ++it) {
    const double theta = 2.0 * M_PI * it / ntheta;
    const double ct = std::cos(theta);
    total += gl_integrate(
        [&](double psi) {
          const double s = R * std::sin(psi);
          const double d2 = r * r + s * s - 2.0 * r * s * ct;
          return std::sin(psi) / (2.0 * M_PI) / std::sqrt(d2);
        },
        0.0, M_PI / 2.0, 8, npsi / 8);
  }
  return total * (2.0 * M_PI / ntheta);
}

/// Action of one perturbed parabolic ejection r(t) c + R(t) s over [0, T],
/// by Gauss-Legendre quadrature after the smoothing substitution t = tau^3:
///   3 tau^2 (|v|^2/2 + 1/|r_s|)
///     = 2/3 gamma^2 + 2 gamma Rdot s_x tau + 3/2 Rdot^2 tau^2
///       + 3 tau^2 / |r_s|.
inline double perturbed_ejection_action(const Eigen::Vector3d& s, double rho,
                                        double T, int panels = 48) {
  const double gamma = std::cbrt(4.5);
  const double rdot = -rho / T;
  auto f = [&](double tau) {
    const double t = tau * tau * tau;
    const double R = (1.0 - t / T) * rho;
    const Eigen::Vector3d pos(gamma * tau * tau + R * s[0], R * s[1], R * s[2]);
    return (2.0 / 3.0) * gamma * gamma + 2.0 * gamma * rdot * s[0] * tau +
           1.5 * rdot * rdot * tau * tau + 3.0 * tau * tau / pos.norm();
  };
  return gl_integrate(f, 0.0, std::cbrt(T), panels);
}

/// Brute-force mean perturbed action over the sphere: antipodally symmetrized
/// Fibonacci directions (the odd kinetic cross term cancels exactly).
inline double sphere_mean_action_bruteforce(double rho, double T,
                                            int ndirections = 10000,
                                            int panels = 48) {
  const int half = ndirections / 2;
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  double mean = 0.0;
  for (int i = 0; i < half; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / half;
    const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    const Eigen::Vector3d s(rxy * std::cos(phi), rxy * std::sin(phi), z);
    mean += perturbed_ejection_action(s, rho, T, panels);
    mean += perturbed_ejection_action(-s, rho, T, panels);
  }
  return mean / (2.0 * half);
}

/// Deterministic standard normal stream (Box-Muller over the raw generator).
struct NormalStream {
  std::mt19937_64 rng;
  explicit NormalStream(unsigned long seed) : rng(seed) {}
  double uniform() { return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53; }
  double operator()() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
};

}  // namespace oracles
