#include "relhydro/setup.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace relhydro {

namespace {

const Eos kSystemI = Eos::ultra_relativistic(1.0 / 3.0);
const Eos kSystemII = Eos::perfect_gas(4.0 / 3.0);

// Signed separation folded onto the nearest periodic image.
double periodic_delta(double a, double b, double length) {
  const double d = a - b;
  return d - length * std::round(d / length);
}

} // namespace

RiemannProblem table1_problem(char label) {
  RiemannProblem p;
  p.label = label;
  switch (label) {
  case 'a':
    p.eos = kSystemI;
    p.left = make_ultra(0.5, {0.2, 0.2, 0.0}, p.eos);
    p.right = make_ultra(0.5, {-0.2, -0.2, 0.0}, p.eos);
    break;
  case 'b':
    p.eos = kSystemI;
    p.left = make_ultra(0.5, {-0.2, 0.2, 0.0}, p.eos);
    p.right = make_ultra(0.5, {0.2, -0.2, 0.0}, p.eos);
    break;
  case 'c':
    p.eos = kSystemI;
    p.left = make_ultra(0.5, {0.0, 0.2, 0.0}, p.eos);
    p.right = make_ultra(1.0, {0.0, -0.2, 0.0}, p.eos);
    break;
  case 'd':
    p.eos = kSystemII;
    p.left = make_gas(1.0, 0.5, {0.2, 0.2, 0.0}, p.eos);
    p.right = make_gas(1.0, 0.5, {-0.2, -0.2, 0.0}, p.eos);
    break;
  case 'e':
    p.eos = kSystemII;
    p.left = make_gas(1.0, 0.5, {-0.2, 0.2, 0.0}, p.eos);
    p.right = make_gas(1.0, 0.5, {0.2, -0.2, 0.0}, p.eos);
    break;
  case 'f':
    p.eos = kSystemII;
    p.left = make_gas(1.0, 0.5, {0.0, 0.2, 0.0}, p.eos);
    p.right = make_gas(1.0, 1.0, {0.0, -0.2, 0.0}, p.eos);
    break;
  default:
    throw std::invalid_argument(std::string("unknown problem label '") + label + "' (expected a-f)");
  }
  return p;
}

std::vector<double> figure_times(char label) {
  switch (label) {
  case 'a': return {0.5, 1.0, 1.5, 2.0, 2.5};
  case 'b': return {0.4, 0.8, 1.2, 1.6, 2.0};
  case 'c': return {0.0, 0.6, 1.2, 1.8, 2.4};
  case 'd': return {0.9, 1.8, 2.7, 3.6, 4.5};
  case 'e': return {0.6, 1.2, 1.8, 2.4, 3.0};
  case 'f': return {0.0, 0.9, 1.8, 2.7, 3.6};
  default: throw std::invalid_argument(std::string("unknown problem label '") + label + "' (expected a-f)");
  }
}

namespace {

Primitive rebuild(const Primitive& p, const Vec3& v, const Eos& eos) {
  return eos.system == System::UltraRelativistic ? make_ultra(p.rho, v, eos) : make_gas(p.n, p.eps, v, eos);
}

} // namespace

RiemannProblem without_tangential_velocity(const RiemannProblem& p) {
  RiemannProblem q = p;
  q.left = rebuild(p.left, {p.left.v[0], 0.0, 0.0}, p.eos);
  q.right = rebuild(p.right, {p.right.v[0], 0.0, 0.0}, p.eos);
  q.label.reset();
  return q;
}

RiemannProblem mirrored(const RiemannProblem& p) {
  RiemannProblem q = p;
  q.left = rebuild(p.right, {-p.right.v[0], p.right.v[1], p.right.v[2]}, p.eos);
  q.right = rebuild(p.left, {-p.left.v[0], p.left.v[1], p.left.v[2]}, p.eos);
  q.label.reset();
  return q;
}

void PerturbationSpec::validate(const GridGeometry& geom) const {
  const double ly = geom.hi[1] - geom.lo[1], lz = geom.hi[2] - geom.lo[2];
  const double rmax = 0.5 * std::min(ly, lz);
  double total = 0.0;
  for (const Bump& b : bumps) {
    if (!(b.radius > 0.0) || !(b.radius < rmax))
      throw std::invalid_argument("perturbation: bump radius must lie in (0, " + std::to_string(rmax) + ")");
    if (!std::isfinite(b.amplitude) || !std::isfinite(b.yc) || !std::isfinite(b.zc))
      throw std::invalid_argument("perturbation: non-finite bump parameter");
    total += std::abs(b.amplitude);
  }
  if (!(total < 0.5 * (geom.hi[0] - geom.lo[0])))
    throw std::invalid_argument("perturbation: summed amplitudes reach the x half-length");
}

double corrugation_offset(const PerturbationSpec& pert, double y, double z, const GridGeometry& geom) {
  const double ly = geom.hi[1] - geom.lo[1], lz = geom.hi[2] - geom.lo[2];
  double x = 0.0;
  for (const Bump& b : pert.bumps) {
    const double dy = periodic_delta(y, b.yc, ly), dz = periodic_delta(z, b.zc, lz);
    const double r = std::hypot(dy, dz);
    if (r <= b.radius) x += b.amplitude * std::cos(std::numbers::pi * r / (2.0 * b.radius));
  }
  return x;
}

PerturbationSpec sample_perturbations(std::uint64_t seed, const PerturbationRanges& ranges, const GridGeometry& geom) {
  if (ranges.count < 0) throw std::invalid_argument("perturbation: negative bump count");
  if (!(ranges.amplitude_min > 0.0 && ranges.amplitude_min <= ranges.amplitude_max))
    throw std::invalid_argument("perturbation: amplitude range must satisfy 0 < min <= max");
  if (!(ranges.radius_min > 0.0 && ranges.radius_min <= ranges.radius_max))
    throw std::invalid_argument("perturbation: radius range must satisfy 0 < min <= max");

  PerturbationSpec spec;
  spec.seed = seed;
  spec.ranges = ranges;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(ranges.amplitude_min, ranges.amplitude_max);
  std::uniform_real_distribution<double> rad(ranges.radius_min, ranges.radius_max);
  std::uniform_real_distribution<double> ypos(geom.lo[1], geom.hi[1]);
  std::uniform_real_distribution<double> zpos(geom.lo[2], geom.hi[2]);
  for (int i = 0; i < ranges.count; ++i) {
    Bump b;
    b.amplitude = amp(rng);
    b.radius = rad(rng);
    b.yc = ypos(rng);
    b.zc = zpos(rng);
    spec.bumps.push_back(b);
  }
  spec.validate(geom);
  return spec;
}

GridGeometry full_geometry(int scale, int dim) {
  if (scale < 1) throw std::invalid_argument("scale must be >= 1");
  if (dim != 1 && dim != 3) throw std::invalid_argument("dim must be 1 or 3");
  if (1800 % scale || 600 % scale || 300 % scale)
    throw std::invalid_argument("scale must divide 1800, 600 and 300");
  GridGeometry g;
  g.lo = {-1.5, 0.0, 0.0};
  g.hi = {1.5, 1.0, 0.5};
  g.n = {1800 / scale, dim == 3 ? 600 / scale : 1, dim == 3 ? 300 / scale : 1};
  return g;
}

GridField initialize_grid(const RiemannProblem& problem, const PerturbationSpec& pert, const GridGeometry& geom) {
  GridField grid(geom, problem.eos);
  const bool corrugate = (geom.active(1) || geom.active(2)) && !pert.bumps.empty();
  if (corrugate) pert.validate(geom);
  const StateVector ul = primitive_to_conserved(problem.left, problem.eos);
  const StateVector ur = primitive_to_conserved(problem.right, problem.eos);
  const double x0 = 0.5 * (geom.lo[0] + geom.hi[0]);
  for (int k = 0; k < geom.n[2]; ++k)
    for (int j = 0; j < geom.n[1]; ++j) {
      const double xs = x0 + (corrugate ? corrugation_offset(pert, geom.center(1, j), geom.center(2, k), geom) : 0.0);
      for (int i = 0; i < geom.n[0]; ++i) grid.set(i, j, k, geom.center(0, i) < xs ? ul : ur);
    }
  apply_boundaries(grid, BoundarySpec{});
  return grid;
}

} // namespace relhydro
