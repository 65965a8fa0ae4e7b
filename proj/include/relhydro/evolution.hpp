#pragma once

// Method-of-lines finite-volume evolution on a uniform Cartesian grid.
//
//   dU/dt = -(F_{i+1/2} - F_{i-1/2})/dx - (F_{j+1/2} - F_{j-1/2})/dy - (F_{k+1/2} - F_{k-1/2})/dz
//
// with CENO face states and Marquina/HLLE interface fluxes, advanced by RK4 or
// the RK2 midpoint rule.

#include "relhydro/flux.hpp"
#include "relhydro/state.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace relhydro {

// Ghost layers on each side of every active axis. A face state reaches two
// zones beyond its owner, so the outermost face needs three.
inline constexpr int kGhost = 3;

class EvolutionError : public PhysicsError {
public:
  using PhysicsError::PhysicsError;
};

struct GridGeometry {
  std::array<int, 3> n{1, 1, 1};
  std::array<double, 3> lo{0.0, 0.0, 0.0};
  std::array<double, 3> hi{1.0, 1.0, 1.0};

  bool active(int d) const { return n[d] > 1; }
  int ghost(int d) const { return active(d) ? kGhost : 0; }
  int total(int d) const { return n[d] + 2 * ghost(d); }
  double spacing(int d) const { return (hi[d] - lo[d]) / n[d]; }
  double center(int d, int i) const { return lo[d] + (i + 0.5) * spacing(d); }
  double cell_volume() const { return spacing(0) * spacing(1) * spacing(2); }
  double volume() const { return (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]); }
  std::int64_t interior_cells() const { return std::int64_t(n[0]) * n[1] * n[2]; }
  int dimensions() const { return int(active(0)) + int(active(1)) + int(active(2)); }

  void validate() const;
  bool operator==(const GridGeometry&) const = default;
};

// Cell-averaged conserved variables including ghost layers. Storage is
// x-fastest, nvar doubles per cell. Indices are interior-relative, so ghosts
// have i < 0 or i >= n.
class GridField {
public:
  GridField() = default;
  GridField(const GridGeometry& geom, const Eos& eos);

  const GridGeometry& geometry() const { return geom_; }
  const Eos& eos() const { return eos_; }
  int nvar() const { return nvar_; }

  std::size_t offset(int i, int j, int k) const {
    return ((std::size_t(k + gz_) * ty_ + std::size_t(j + gy_)) * tx_ + std::size_t(i + gx_)) * nvar_;
  }
  double* at(int i, int j, int k) { return data_.data() + offset(i, j, k); }
  const double* at(int i, int j, int k) const { return data_.data() + offset(i, j, k); }

  StateVector get(int i, int j, int k) const;
  void set(int i, int j, int k, const StateVector& u);

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  double time = 0.0;
  std::int64_t step = 0;

private:
  GridGeometry geom_;
  Eos eos_;
  int nvar_ = 4;
  int gx_ = 0, gy_ = 0, gz_ = 0;
  std::size_t tx_ = 1, ty_ = 1, tz_ = 1;
  std::vector<double> data_;
};

enum class BoundaryKind { Periodic, Outflow };

struct BoundarySpec {
  // face[axis][0] is the low face, face[axis][1] the high face.
  std::array<std::array<BoundaryKind, 2>, 3> face{{{BoundaryKind::Outflow, BoundaryKind::Outflow},
                                                   {BoundaryKind::Periodic, BoundaryKind::Periodic},
                                                   {BoundaryKind::Periodic, BoundaryKind::Periodic}}};

  static BoundarySpec outflow_x_periodic_yz() { return {}; }
  static BoundarySpec periodic();
  void validate() const;
};

void apply_boundaries(GridField& grid, const BoundarySpec& spec);

struct SchemeOptions {
  FluxKind flux = FluxKind::Marquina;
  int rk_order = 4;
  bool reconstruct = true;
  int threads = 1;
  // Faces whose six-zone stencil is constant to this fraction of e take the
  // physical flux directly; 0 requires exact equality.
  double uniform_tolerance = 1e-13;
};

struct StepStats {
  std::int64_t fallback_faces = 0; // faces reduced to first order after a failed recovery
  std::int64_t hlle_faces = 0;     // Marquina faces that fell back to HLLE
  std::int64_t floored_cells = 0;
};

// One explicit Runge-Kutta step for du/dt = rhs(u) on a flat state vector:
//   order 4: u += dt (k1 + 2 k2 + 2 k3 + k4)/6
//   order 2: u += dt k2, k2 = rhs(u + dt k1 / 2)
// rhs(v, out) writes dv/dt; fill(v) completes a freshly built stage (e.g.
// ghost zones) before it is evaluated. `stage`, `k`, `acc` are scratch.
template <class Rhs, class Fill>
void rk_advance(std::vector<double>& u, double dt, int order, Rhs&& rhs, Fill&& fill, std::vector<double>& stage,
                std::vector<double>& k, std::vector<double>& acc) {
  const std::size_t n = u.size();
  stage.resize(n);
  auto make_stage = [&](double c) {
    for (std::size_t i = 0; i < n; ++i) stage[i] = u[i] + c * k[i];
    fill(stage);
  };
  rhs(u, k);
  if (order == 2) {
    make_stage(0.5 * dt);
    rhs(stage, k);
    for (std::size_t i = 0; i < n; ++i) u[i] += dt * k[i];
    return;
  }
  acc = k;
  make_stage(0.5 * dt);
  rhs(stage, k);
  for (std::size_t i = 0; i < n; ++i) acc[i] += 2.0 * k[i];
  make_stage(0.5 * dt);
  rhs(stage, k);
  for (std::size_t i = 0; i < n; ++i) acc[i] += 2.0 * k[i];
  make_stage(dt);
  rhs(stage, k);
  const double c = dt / 6.0;
  for (std::size_t i = 0; i < n; ++i) u[i] += c * (acc[i] + k[i]);
}

// Owns the work buffers of one evolution and performs RHS evaluations and
// Runge-Kutta steps on grids of a fixed geometry.
class Integrator {
public:
  Integrator(const GridGeometry& geom, const Eos& eos, const BoundarySpec& bc, const SchemeOptions& opts);

  // dU/dt for every interior cell (ghost entries of `rhs` are zero).
  // Ghost zones of `grid` must be filled.
  void rhs(const GridField& grid, std::vector<double>& out);

  // Advances grid by dt; ghost zones are refilled before each stage.
  void step(GridField& grid, double dt);

  // cfl * min over interior cells and active axes of dx_d / max|lambda|.
  double timestep(const GridField& grid, double cfl);

  const StepStats& stats() const { return stats_; }
  const SchemeOptions& options() const { return opts_; }
  const BoundarySpec& boundaries() const { return bc_; }

private:
  void refresh_primitives(const GridField& grid);
  void sweep(const GridField& grid, int axis, std::vector<double>& out);

  GridGeometry geom_;
  Eos eos_;
  BoundarySpec bc_;
  SchemeOptions opts_;
  std::vector<Primitive> prims_;
  std::vector<double> k_, acc_;
  GridField stage_;
  StepStats stats_;
  // Identifies the grid state that prims_ currently describes.
  const GridField* prims_grid_ = nullptr;
  std::int64_t prims_step_ = -1;
  double prims_time_ = 0.0;
};

// Free-function forms of the integrator operations.
std::vector<double> mol_rhs(const GridField& grid, const SchemeOptions& opts);
void rk_step(GridField& grid, const BoundarySpec& bc, double dt, const SchemeOptions& opts);
double compute_timestep(const GridField& grid, double cfl);

// Called after every step with the step size just taken; `stop` is true when
// the step landed on one of the requested stop times.
using StepObserver = std::function<void(const GridField& grid, double dt, bool stop)>;

enum class EvolveStatus { Completed, WallClockExceeded };

struct EvolveResult {
  EvolveStatus status = EvolveStatus::Completed;
  std::int64_t steps = 0;
  StepStats stats;
};

struct EvolveSettings {
  double t_end = 0.0;
  double cfl = 0.25;
  std::vector<double> stop_times; // steps are clipped to land exactly on these
  double wall_clock_limit = 0.0;  // seconds, 0 = unlimited
  // Optional extra bound on each step size (e.g. a companion grid's CFL limit).
  std::function<double()> dt_limit;
};

EvolveResult evolve(GridField& grid, Integrator& integrator, const EvolveSettings& settings,
                    const StepObserver& observer = {});

std::string to_string(FluxKind k);
FluxKind parse_flux_kind(const std::string& s);

} // namespace relhydro
