#pragma once

// Run configuration, snapshot and CSV files, and the batch driver behind the
// command-line tool.

#include "relhydro/diagnostics.hpp"
#include "relhydro/evolution.hpp"
#include "relhydro/setup.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace relhydro {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SnapshotError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // Problem: a preset label 'a'..'f', or custom states.
  char problem = 'a';
  bool custom_problem = false;
  RiemannProblem custom;
  bool zero_tangential = false;

  // Grid.
  int dim = 3;
  int scale = 6;
  GridGeometry geometry; // resolved from dim/scale unless overridden
  BoundarySpec boundaries;

  // Scheme.
  double cfl = 0.25;
  SchemeOptions scheme;

  // Time.
  double t_end = 2.5;
  std::vector<double> snapshot_times;

  // Perturbation.
  bool perturbed = true;
  std::uint64_t seed = 1;
  PerturbationRanges ranges;
  std::vector<Bump> bumps; // explicit list; overrides seeded sampling when non-empty

  // Output.
  std::string output_dir = "relhydro_out";
  ReferenceMethod reference = ReferenceMethod::Numerical1D;
  int norm_every = 1;
  int slice_k = -1; // z index of the exported slice; -1 = middle
  bool write_snapshots = true;
  double wall_clock_limit = 0.0;

  RiemannProblem resolved_problem() const;
  bool wants_norms() const { return perturbed && dim == 3; }
};

// Defaults for a preset problem: figure times as snapshots, last one as t_end,
// CFL 0.25 (3D) or 0.5 (1D).
RunConfig default_config(char problem, int dim = 3, int scale = 6);

// INI text: top-level `key = value` lines and optional [grid], [scheme],
// [perturbation], [output], [left], [right], [eos] sections. Unknown keys,
// bad values and missing `problem` raise ConfigError. `overrides` replace
// top-level keys (as given on the command line) before defaults are resolved.
RunConfig parse_config(const std::string& text, const std::map<std::string, std::string>& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const std::map<std::string, std::string>& overrides = {});

// Fully resolved config (all defaults written out), parseable by parse_config.
std::string format_config(const RunConfig& cfg);

// Binary snapshot: "RHSNAP\0\0", u32 version, u32 system, f64 cs2, f64 gamma,
// i32 n[3], f64 lo[3], f64 hi[3], f64 time, i64 step, then interior cells as
// little-endian f64, x fastest, nvar per cell.
void write_snapshot(const GridField& grid, const std::filesystem::path& path);
GridField read_snapshot(const std::filesystem::path& path);
GridField read_snapshot(const std::filesystem::path& path, const GridGeometry& expected);

// CSV of the plane k = const: x,y,e,<n|rho>,vy (n for the perfect gas, rho for
// the ultrarelativistic system).
void write_slice_csv(const GridField& grid, int k, const std::filesystem::path& path);

void write_norms_csv(const std::vector<NormTriple>& norms, const std::filesystem::path& path);
std::vector<NormTriple> read_norms_csv(const std::filesystem::path& path);
void write_front_csv(const FrontProfile& front, const std::filesystem::path& path);
void write_bumps_csv(const PerturbationSpec& pert, const std::filesystem::path& path);

// Exact solution sampled at `points` equally spaced x in [x_min, x_max] at
// time t: x,e,p,vx,vy[,n].
std::string exact_csv(const RiemannProblem& problem, double t, int points, double x_min = -1.5,
                      double x_max = 1.5);

std::string snapshot_name(double t);

struct RunResult {
  EvolveResult evolve;
  std::vector<NormTriple> norms;
  PerturbationSpec perturbation;
  GridField final_grid;
  std::filesystem::path output_dir;
  std::vector<std::filesystem::path> files;
  double wall_seconds = 0.0;
};

// build problem -> perturb -> initialize -> evolve (snapshots at the
// configured times, norms every `norm_every` steps) -> write outputs.
// Throws on any abort; `log` receives progress lines.
RunResult run(const RunConfig& cfg, std::ostream& log);

// Norm series from two directories of snapshots with matching file names.
std::vector<NormTriple> norms_from_snapshots(const std::filesystem::path& perturbed,
                                             const std::filesystem::path& reference);

// Writes {"error": kind, "message": text} to dir/error.json.
void write_error_report(const std::filesystem::path& dir, const std::string& kind, const std::string& message);

} // namespace relhydro
