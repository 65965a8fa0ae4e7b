#pragma once

// Perturbation norms of the conserved energy against an unperturbed
// reference, wave-front flatness and conservation totals.

#include "relhydro/evolution.hpp"
#include "relhydro/exact_riemann.hpp"
#include "relhydro/setup.hpp"

#include <string>
#include <vector>

namespace relhydro {

// Interior-only scalar field, x-fastest, n[0]*n[1]*n[2] entries.
using ScalarField = std::vector<double>;

// Component 0 of U in every interior cell.
ScalarField conserved_energy_field(const GridField& grid);

struct NormTriple {
  double t = 0.0;
  double l1 = 0.0;   // sum |de| dV
  double l2 = 0.0;   // sqrt(sum |de|^2 dV)
  double linf = 0.0; // max |de|
};

// Throws std::invalid_argument when the reference size does not match.
NormTriple perturbation_norms(const GridField& grid, const ScalarField& reference, double t);

enum class ReferenceMethod { Exact, Numerical1D };

std::string to_string(ReferenceMethod m);
ReferenceMethod parse_reference_method(const std::string& s);

// The unperturbed 1D evolution on the x axis of a 3D geometry, broadcast
// along y and z. Stepping it with the same dt as the 3D run keeps the two in
// lockstep, so their difference isolates the perturbation.
class ReferenceTracker {
public:
  ReferenceTracker(const RiemannProblem& problem, const GridGeometry& geom, const SchemeOptions& opts);

  double timestep(double cfl) { return integrator_.timestep(line_, cfl); }
  void step(double dt) { integrator_.step(line_, dt); }
  double time() const { return line_.time; }
  void set_time(double t) { line_.time = t; }
  const GridField& line() const { return line_; }

  // Energy of the 1D solution broadcast onto the full geometry.
  ScalarField energy() const;

private:
  GridGeometry geom_;
  GridField line_;
  Integrator integrator_;
};

struct ReferenceResult {
  ScalarField energy;
  ReferenceMethod method_used = ReferenceMethod::Exact;
  std::string warning; // non-empty when the exact solver failed
};

// `Exact` samples the exact solution at xi = x/t (sharp split at t = 0);
// `Numerical1D` evolves the unperturbed problem on the x axis with `opts`
// and CFL `cfl_1d`. An exact-solver failure falls back to Numerical1D.
ReferenceResult unperturbed_reference(const RiemannProblem& problem, double t, const GridGeometry& geom,
                                      ReferenceMethod method, const SchemeOptions& opts = {},
                                      double cfl_1d = 0.5);

// Which outer wave to track.
enum class WaveFront { Left, Right };

struct FrontProfile {
  WaveFront wave = WaveFront::Left;
  std::vector<double> y, z, x_front; // one entry per column with a crossing
  int missing_columns = 0;
  double amplitude = 0.0; // max - min of x_front
  double stddev = 0.0;
};

// Per (y, z) column, the x where e first crosses
//   ahead + fraction * (behind - ahead)
// scanning inward from the boundary ahead of the wave, with linear
// interpolation between cell centres. `ahead` is the outer initial state,
// `behind` the adjacent star state of the exact solution.
FrontProfile front_profile(const GridField& grid, const ExactSolution& solution, WaveFront wave,
                           double fraction = 0.5);

// sum U dV over interior cells, per component, in a fixed order.
StateVector conservation_totals(const GridField& grid);

} // namespace relhydro
