#include "relhydro/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relhydro {

namespace {

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0, carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

GridGeometry line_geometry(const GridGeometry& g) {
  GridGeometry l = g;
  l.n = {g.n[0], 1, 1};
  return l;
}

} // namespace

ScalarField conserved_energy_field(const GridField& grid) {
  const GridGeometry& g = grid.geometry();
  ScalarField e;
  e.reserve(std::size_t(g.interior_cells()));
  for (int k = 0; k < g.n[2]; ++k)
    for (int j = 0; j < g.n[1]; ++j)
      for (int i = 0; i < g.n[0]; ++i) e.push_back(grid.at(i, j, k)[kEnergy]);
  return e;
}

NormTriple perturbation_norms(const GridField& grid, const ScalarField& reference, double t) {
  const GridGeometry& g = grid.geometry();
  if (reference.size() != std::size_t(g.interior_cells()))
    throw std::invalid_argument("perturbation_norms: reference has " + std::to_string(reference.size()) +
                                " cells, grid has " + std::to_string(g.interior_cells()));
  const double dv = g.cell_volume();
  CompensatedSum s1, s2;
  double mx = 0.0;
  std::size_t c = 0;
  for (int k = 0; k < g.n[2]; ++k)
    for (int j = 0; j < g.n[1]; ++j)
      for (int i = 0; i < g.n[0]; ++i, ++c) {
        const double d = std::abs(grid.at(i, j, k)[kEnergy] - reference[c]);
        s1.add(d);
        s2.add(d * d);
        mx = std::max(mx, d);
      }
  return {t, s1.value() * dv, std::sqrt(s2.value() * dv), mx};
}

std::string to_string(ReferenceMethod m) { return m == ReferenceMethod::Exact ? "exact" : "numerical1d"; }

ReferenceMethod parse_reference_method(const std::string& s) {
  if (s == "exact") return ReferenceMethod::Exact;
  if (s == "numerical1d") return ReferenceMethod::Numerical1D;
  throw std::invalid_argument("unknown reference method '" + s + "' (expected exact or numerical1d)");
}

ReferenceTracker::ReferenceTracker(const RiemannProblem& problem, const GridGeometry& geom, const SchemeOptions& opts)
    : geom_(geom), line_(initialize_grid(problem, PerturbationSpec{}, line_geometry(geom))),
      integrator_(line_geometry(geom), problem.eos, BoundarySpec{}, opts) {}

ScalarField ReferenceTracker::energy() const {
  ScalarField e;
  e.reserve(std::size_t(geom_.interior_cells()));
  const std::size_t rows = std::size_t(geom_.n[1]) * geom_.n[2];
  for (std::size_t r = 0; r < rows; ++r)
    for (int i = 0; i < geom_.n[0]; ++i) e.push_back(line_.at(i, 0, 0)[kEnergy]);
  return e;
}

namespace {

ScalarField exact_energy(const RiemannProblem& problem, double t, const GridGeometry& geom) {
  const ExactSolution sol = solve_star_state(problem.left, problem.right, problem.eos);
  const double x0 = 0.5 * (geom.lo[0] + geom.hi[0]);
  const double el = primitive_to_conserved(problem.left, problem.eos)[kEnergy];
  const double er = primitive_to_conserved(problem.right, problem.eos)[kEnergy];
  std::vector<double> line(geom.n[0]);
  for (int i = 0; i < geom.n[0]; ++i) {
    const double x = geom.center(0, i) - x0;
    if (t <= 0.0)
      line[i] = x < 0.0 ? el : er;
    else
      line[i] = primitive_to_conserved(sample(sol, x / t), problem.eos)[kEnergy];
  }
  ScalarField e;
  e.reserve(std::size_t(geom.interior_cells()));
  const std::size_t rows = std::size_t(geom.n[1]) * geom.n[2];
  for (std::size_t r = 0; r < rows; ++r) e.insert(e.end(), line.begin(), line.end());
  return e;
}

} // namespace

ReferenceResult unperturbed_reference(const RiemannProblem& problem, double t, const GridGeometry& geom,
                                      ReferenceMethod method, const SchemeOptions& opts, double cfl_1d) {
  if (!(t >= 0.0)) throw std::invalid_argument("unperturbed_reference: t must be >= 0");
  ReferenceResult out;
  if (method == ReferenceMethod::Exact) {
    try {
      out.energy = exact_energy(problem, t, geom);
      out.method_used = ReferenceMethod::Exact;
      return out;
    } catch (const PhysicsError& e) {
      out.warning = std::string("exact solver failed (") + e.what() + "); using numerical1d";
    }
  }
  ReferenceTracker tracker(problem, geom, opts);
  while (tracker.time() < t) {
    double dt = tracker.timestep(cfl_1d);
    const bool last = tracker.time() + dt * (1.0 + 1e-9) >= t;
    if (last) dt = t - tracker.time();
    tracker.step(dt);
    if (last) tracker.set_time(t);
  }
  out.energy = tracker.energy();
  out.method_used = ReferenceMethod::Numerical1D;
  return out;
}

FrontProfile front_profile(const GridField& grid, const ExactSolution& solution, WaveFront wave, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("front_profile: fraction must lie in (0, 1)");
  const Eos& eos = solution.eos;
  const bool left = wave == WaveFront::Left;
  const double ahead = primitive_to_conserved(left ? solution.left : solution.right, eos)[kEnergy];
  const double behind = primitive_to_conserved(left ? solution.left_star : solution.right_star, eos)[kEnergy];
  if (!(std::abs(behind - ahead) > 1e-12 * std::abs(ahead)))
    throw std::invalid_argument("front_profile: the wave carries no jump in e");
  const double thr = ahead + fraction * (behind - ahead);
  const bool ahead_below = ahead < thr;

  const GridGeometry& g = grid.geometry();
  const double dx = g.spacing(0);
  FrontProfile out;
  out.wave = wave;
  for (int k = 0; k < g.n[2]; ++k)
    for (int j = 0; j < g.n[1]; ++j) {
      auto e_at = [&](int i) { return grid.at(i, j, k)[kEnergy]; };
      bool found = false;
      double xf = 0.0;
      const int n = g.n[0];
      const int start = left ? 0 : n - 1, step = left ? 1 : -1;
      if ((e_at(start) < thr) == ahead_below && e_at(start) != thr) {
        for (int i = start; i + step >= 0 && i + step < n; i += step) {
          const double a = e_at(i), b = e_at(i + step);
          if ((b < thr) != ahead_below || b == thr) {
            const double s = (thr - a) / (b - a);
            xf = g.center(0, i) + step * s * dx;
            found = true;
            break;
          }
        }
      }
      if (!found) {
        ++out.missing_columns;
        continue;
      }
      out.y.push_back(g.center(1, j));
      out.z.push_back(g.center(2, k));
      out.x_front.push_back(xf);
    }
  if (!out.x_front.empty()) {
    const auto [mn, mx] = std::minmax_element(out.x_front.begin(), out.x_front.end());
    out.amplitude = *mx - *mn;
    CompensatedSum s;
    for (double x : out.x_front) s.add(x);
    const double mean = s.value() / double(out.x_front.size());
    CompensatedSum v;
    for (double x : out.x_front) v.add((x - mean) * (x - mean));
    out.stddev = std::sqrt(v.value() / double(out.x_front.size()));
  }
  return out;
}

StateVector conservation_totals(const GridField& grid) {
  const GridGeometry& g = grid.geometry();
  std::array<CompensatedSum, kMaxVars> s{};
  for (int k = 0; k < g.n[2]; ++k)
    for (int j = 0; j < g.n[1]; ++j)
      for (int i = 0; i < g.n[0]; ++i) {
        const double* u = grid.at(i, j, k);
        for (int v = 0; v < grid.nvar(); ++v) s[v].add(u[v]);
      }
  StateVector out{};
  const double dv = g.cell_volume();
  for (int v = 0; v < grid.nvar(); ++v) out[v] = s[v].value() * dv;
  return out;
}

} // namespace relhydro
