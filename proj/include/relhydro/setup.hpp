#pragma once

// Initial data: the six two-state sample problems, corrugated interfaces and
// grid construction on the cuboid [-1.5, 1.5] x [0, 1] x [0, 0.5].

#include "relhydro/evolution.hpp"
#include "relhydro/state.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace relhydro {

struct RiemannProblem {
  Eos eos;
  Primitive left, right;
  std::optional<char> label;
};

// Problems 'a'..'f'; throws std::invalid_argument for anything else.
RiemannProblem table1_problem(char label);

// Snapshot times of the problem's published 3D sequence.
std::vector<double> figure_times(char label);

// Same problem with the tangential velocity removed on both sides.
RiemannProblem without_tangential_velocity(const RiemannProblem& p);

// Reflection x -> -x: states swapped, normal velocities negated.
RiemannProblem mirrored(const RiemannProblem& p);

// One interface bump: x-offset A cos(pi r / 2R) for r <= R around (yc, zc).
struct Bump {
  double amplitude = 0.0;
  double radius = 0.0;
  double yc = 0.0, zc = 0.0;
};

struct PerturbationRanges {
  int count = 20;
  double amplitude_min = 0.005, amplitude_max = 0.02;
  double radius_min = 0.05, radius_max = 0.15;
};

struct PerturbationSpec {
  std::vector<Bump> bumps;
  std::optional<std::uint64_t> seed; // set when sampled
  PerturbationRanges ranges;

  // Radii must stay below half the shorter periodic length, so only the
  // nearest periodic image of each centre contributes; the summed amplitude
  // must stay below the x half-length.
  void validate(const GridGeometry& geom) const;
};

// Sum of bump contributions at (y, z), distances taken over periodic images
// in y and z.
double corrugation_offset(const PerturbationSpec& pert, double y, double z, const GridGeometry& geom);

// Deterministic in `seed` (std::mt19937_64). Centres are uniform over the
// (y, z) face. Throws std::invalid_argument for infeasible ranges.
PerturbationSpec sample_perturbations(std::uint64_t seed, const PerturbationRanges& ranges, const GridGeometry& geom);

// Full-size cuboid divided by `scale` (1800x600x300 / scale). dim = 1
// keeps only the x axis.
GridGeometry full_geometry(int scale, int dim);

// Each interior cell gets the left state if its centre lies at
// x < offset(y, z), else the right state. Perturbations are ignored for grids
// without active y/z axes. Ghost zones are filled for outflow-x/periodic-yz.
GridField initialize_grid(const RiemannProblem& problem, const PerturbationSpec& pert, const GridGeometry& geom);

} // namespace relhydro
