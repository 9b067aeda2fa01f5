#include "orbitforge/symmetry.hpp"

#include <cmath>
#include <numeric>

namespace orbitforge {

namespace {

long gcd_positive(long a, long b) {
  while (b != 0) {
    const long t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

}  // namespace

TimeShift::TimeShift(long n, long d) {
  if (d == 0) throw BadParams("TimeShift: zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  n %= d;
  if (n < 0) n += d;  // representative in [0, 1)
  const long g = n == 0 ? d : gcd_positive(n, d);
  num = n / g;
  den = d / g;
}

SymmetryElement SymmetryElement::identity(int nbody, int dim) {
  SymmetryElement e;
  e.rho = Matrix::Identity(dim, dim);
  e.perm.resize(nbody);
  std::iota(e.perm.begin(), e.perm.end(), 0);
  e.time_sign = 1;
  e.shift = TimeShift(0, 1);
  return e;
}

SymmetryElement SymmetryElement::compose(const SymmetryElement& h) const {
  if (rho.rows() != h.rho.rows() || perm.size() != h.perm.size())
    throw DimMismatch("SymmetryElement::compose: shape mismatch");
  SymmetryElement out;
  out.rho = rho * h.rho;
  out.perm.resize(perm.size());
  for (size_t i = 0; i < perm.size(); ++i) out.perm[i] = h.perm[perm[i]];
  out.time_sign = time_sign * h.time_sign;
  // beta_g(beta_h(t)) = eps_g eps_h t + (eps_g shift_h + shift_g) T.
  const long den = shift.den * h.shift.den;
  const long num = time_sign * h.shift.num * shift.den + shift.num * h.shift.den;
  out.shift = TimeShift(num, den);
  return out;
}

SymmetryElement SymmetryElement::inverse() const {
  SymmetryElement out;
  out.rho = rho.transpose();  // orthogonal
  out.perm.resize(perm.size());
  for (size_t i = 0; i < perm.size(); ++i) out.perm[perm[i]] = static_cast<int>(i);
  out.time_sign = time_sign;
  out.shift = TimeShift(-time_sign * shift.num, shift.den);
  return out;
}

bool SymmetryElement::same_as(const SymmetryElement& o, double tol) const {
  if (perm != o.perm || time_sign != o.time_sign || !(shift == o.shift))
    return false;
  return (rho - o.rho).cwiseAbs().maxCoeff() <= tol;
}

bool SymmetryElement::permutes_bodies() const {
  for (size_t i = 0; i < perm.size(); ++i)
    if (perm[i] != static_cast<int>(i)) return true;
  return false;
}

bool SymmetryGroup::permutes_bodies() const {
  for (const auto& g : elements)
    if (g.permutes_bodies()) return true;
  return false;
}

bool SymmetryGroup::contains(const SymmetryGroup& sub, double tol) const {
  for (const auto& g : sub.elements) {
    bool found = false;
    for (const auto& h : elements)
      if (g.same_as(h, tol)) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

SymmetryGroup generate_group(const std::string& name,
                             const std::vector<SymmetryElement>& generators,
                             int nbody, int dim, int max_order) {
  SymmetryGroup G;
  G.name = name;
  G.elements.push_back(SymmetryElement::identity(nbody, dim));
  for (const auto& g : generators) {
    if (g.rho.rows() != dim || static_cast<int>(g.perm.size()) != nbody)
      throw BadParams("generate_group: generator shape mismatch");
    if ((g.rho * g.rho.transpose() - Matrix::Identity(dim, dim))
            .cwiseAbs()
            .maxCoeff() > 1e-12)
      throw BadParams("generate_group: generator isometry is not orthogonal");
  }

  auto known = [&](const SymmetryElement& e) {
    for (const auto& h : G.elements)
      if (e.same_as(h)) return true;
    return false;
  };

  std::vector<SymmetryElement> frontier = generators;
  while (!frontier.empty()) {
    std::vector<SymmetryElement> next;
    for (const auto& g : frontier) {
      if (known(g)) continue;
      G.elements.push_back(g);
      if (G.order() > max_order)
        throw BadParams("generate_group: closure exceeds max_order");
      for (const auto& h : generators) {
        next.push_back(g.compose(h));
        next.push_back(h.compose(g));
      }
    }
    frontier = std::move(next);
  }

  // Closure and inverse-closure check.
  for (const auto& g : G.elements) {
    if (!known(g.inverse()))
      throw BadParams("generate_group: element inverse escapes the closure");
    for (const auto& h : G.elements)
      if (!known(g.compose(h)))
        throw BadParams("generate_group: composition escapes the closure");
  }
  return G;
}

FourierLoop apply_element(const SymmetryElement& g, const FourierLoop& loop) {
  if (g.rho.rows() != loop.dim)
    throw DimMismatch("apply_element: isometry dimension mismatch");
  if (static_cast<int>(g.perm.size()) != loop.nbody)
    throw DimMismatch("apply_element: permutation size mismatch");

  const int d = loop.dim;
  const int m = loop.modes;
  FourierLoop out(loop.nbody, d, m, loop.period);
  const double eps = g.time_sign;
  for (int i = 0; i < loop.nbody; ++i) {
    const int j = g.perm[i];
    // Source blocks, axes as rows.
    Matrix c0(d, 1), A(d, m), B(d, m);
    for (int a = 0; a < d; ++a) {
      const auto row = loop.coeff.row(loop.row_of(j, a));
      c0(a, 0) = row[0];
      for (int k = 1; k <= m; ++k) {
        A(a, k - 1) = row[k];
        B(a, k - 1) = row[m + k];
      }
    }
    Matrix nc0 = g.rho * c0;
    Matrix nA(d, m), nB(d, m);
    for (int k = 1; k <= m; ++k) {
      // x_j(eps (t - theta T)): phase phi_k = 2 pi k theta, sine block
      // flipped by eps.
      const double phi = 2.0 * M_PI * k * g.shift.value();
      const double c = std::cos(phi);
      const double s = std::sin(phi);
      nA.col(k - 1) = g.rho * (A.col(k - 1) * c - eps * B.col(k - 1) * s);
      nB.col(k - 1) = g.rho * (A.col(k - 1) * s + eps * B.col(k - 1) * c);
    }
    for (int a = 0; a < d; ++a) {
      auto row = out.coeff.row(out.row_of(i, a));
      row[0] = nc0(a, 0);
      for (int k = 1; k <= m; ++k) {
        row[k] = nA(a, k - 1);
        row[m + k] = nB(a, k - 1);
      }
    }
  }
  return out;
}

FourierLoop group_average(const SymmetryGroup& G, const FourierLoop& loop) {
  if (G.order() == 0) throw BadParams("group_average: empty group");
  FourierLoop acc(loop.nbody, loop.dim, loop.modes, loop.period);
  for (const auto& g : G.elements) acc.coeff += apply_element(g, loop).coeff;
  acc.coeff /= static_cast<double>(G.order());
  return acc;
}

double invariance_defect(const SymmetryGroup& G, const FourierLoop& loop,
                         const MassSystem& ms, int samples) {
  double worst = 0.0;
  for (const auto& g : G.elements) {
    FourierLoop gx = apply_element(g, loop);
    for (int j = 0; j < samples; ++j) {
      const double t = loop.period * j / samples;
      const double d = mass_norm(gx.position_at(t) - loop.position_at(t), ms);
      worst = std::max(worst, d);
    }
  }
  return worst;
}

SymmetryGroup preset_group(PresetGroup which, int nbody, int dim) {
  switch (which) {
    case PresetGroup::choreography: {
      if (nbody < 2) throw BadParams("choreography: need n >= 2");
      SymmetryElement g = SymmetryElement::identity(nbody, dim);
      for (int i = 0; i < nbody; ++i) g.perm[i] = (i + 1) % nbody;
      g.shift = TimeShift(1, nbody);
      return generate_group("choreography", {g}, nbody, dim);
    }
    case PresetGroup::italian: {
      SymmetryElement g = SymmetryElement::identity(nbody, dim);
      g.rho = -Matrix::Identity(dim, dim);
      g.shift = TimeShift(1, 2);
      return generate_group("italian", {g}, nbody, dim);
    }
    case PresetGroup::d6_eight:
    case PresetGroup::z6:
    case PresetGroup::d3: {
      if (nbody != 3) throw BadParams("d6 family: requires 3 bodies");
      if (dim != 3) throw BadParams("d6 family: requires dim = 3");
      SymmetryElement s = SymmetryElement::identity(3, 3);
      s.rho = Matrix::Identity(3, 3);
      s.rho(2, 2) = -1.0;  // reflection through the horizontal plane
      s.perm = {2, 0, 1};
      s.shift = TimeShift(1, 6);
      SymmetryElement sig = SymmetryElement::identity(3, 3);
      sig.rho = Matrix::Identity(3, 3);
      sig.rho(1, 1) = -1.0;
      sig.rho(2, 2) = -1.0;  // half-turn about the horizontal axis
      sig.perm = {0, 2, 1};
      sig.time_sign = -1;
      if (which == PresetGroup::d6_eight)
        return generate_group("d6_eight", {s, sig}, 3, 3);
      if (which == PresetGroup::z6) return generate_group("z6", {s}, 3, 3);
      return generate_group("d3", {s.compose(s), sig}, 3, 3);
    }
  }
  throw BadParams("preset_group: unknown preset");
}

SymmetryGroup preset_group(const std::string& name, int nbody, int dim) {
  if (name == "choreography") return preset_group(PresetGroup::choreography, nbody, dim);
  if (name == "italian") return preset_group(PresetGroup::italian, nbody, dim);
  if (name == "d6_eight") return preset_group(PresetGroup::d6_eight, nbody, dim);
  if (name == "z6") return preset_group(PresetGroup::z6, nbody, dim);
  if (name == "d3") return preset_group(PresetGroup::d3, nbody, dim);
  throw BadParams("preset_group: unknown name '" + name + "'");
}

Matrix ConfigInvolution::apply(const Matrix& x) const {
  if (x.cols() != rho.rows() || x.rows() != static_cast<long>(perm.size()))
    throw DimMismatch("ConfigInvolution: shape mismatch");
  Matrix out(x.rows(), x.cols());
  for (size_t i = 0; i < perm.size(); ++i)
    out.row(i) = (rho * x.row(perm[i]).transpose()).transpose();
  return out;
}

BoundaryConstraint p12_constraint(double u) {
  if (u < 0.0 || u > M_PI / 3.0 + 1e-12)
    throw BadParams("p12_constraint: u outside [0, pi/3]");
  BoundaryConstraint bc;
  bc.u = u;

  // t = 0: half-turn about the horizontal line (x-axis), bodies 1,2 swapped.
  bc.start.rho = Matrix::Identity(3, 3);
  bc.start.rho(1, 1) = -1.0;
  bc.start.rho(2, 2) = -1.0;
  bc.start.perm = {0, 2, 1};

  // t = T/12: reflection through the vertical plane at angle u, bodies 0,1
  // swapped, body 2 contained in the plane.
  Matrix refl = Matrix::Identity(3, 3);
  refl(0, 0) = std::cos(2.0 * u);
  refl(0, 1) = std::sin(2.0 * u);
  refl(1, 0) = std::sin(2.0 * u);
  refl(1, 1) = -std::cos(2.0 * u);
  bc.end.rho = refl;
  bc.end.perm = {1, 0, 2};
  return bc;
}

}  // namespace orbitforge
