#include "relhydro/evolution.hpp"

#include "relhydro/reconstruction.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace relhydro {

void GridGeometry::validate() const {
  for (int d = 0; d < 3; ++d) {
    if (n[d] < 1) throw std::invalid_argument("grid: cell counts must be >= 1");
    if (!(hi[d] > lo[d])) throw std::invalid_argument("grid: extents must satisfy hi > lo");
    if (active(d) && n[d] < 2 * kGhost)
      throw std::invalid_argument("grid: active axes need at least " + std::to_string(2 * kGhost) + " cells");
  }
}

GridField::GridField(const GridGeometry& geom, const Eos& eos) : geom_(geom), eos_(eos), nvar_(eos.nvar()) {
  geom_.validate();
  gx_ = geom_.ghost(0);
  gy_ = geom_.ghost(1);
  gz_ = geom_.ghost(2);
  tx_ = geom_.total(0);
  ty_ = geom_.total(1);
  tz_ = geom_.total(2);
  data_.assign(tx_ * ty_ * tz_ * nvar_, 0.0);
}

StateVector GridField::get(int i, int j, int k) const {
  StateVector u{};
  const double* p = at(i, j, k);
  for (int c = 0; c < nvar_; ++c) u[c] = p[c];
  return u;
}

void GridField::set(int i, int j, int k, const StateVector& u) {
  double* p = at(i, j, k);
  for (int c = 0; c < nvar_; ++c) p[c] = u[c];
}

BoundarySpec BoundarySpec::periodic() {
  BoundarySpec b;
  for (auto& f : b.face) f = {BoundaryKind::Periodic, BoundaryKind::Periodic};
  return b;
}

void BoundarySpec::validate() const {
  for (const auto& f : face)
    if ((f[0] == BoundaryKind::Periodic) != (f[1] == BoundaryKind::Periodic))
      throw std::invalid_argument("boundary: periodic faces must be paired on opposite sides");
}

void apply_boundaries(GridField& grid, const BoundarySpec& spec) {
  const GridGeometry& g = grid.geometry();
  const int nv = grid.nvar();
  // Axis by axis over the full extent of the already-filled axes, so edges
  // and corners end up consistent.
  for (int d = 0; d < 3; ++d) {
    if (!g.active(d)) continue;
    const int n = g.n[d];
    std::array<int, 3> lo{0, 0, 0}, hi{g.n[0], g.n[1], g.n[2]};
    for (int e = 0; e < d; ++e) {
      lo[e] = -g.ghost(e);
      hi[e] = g.n[e] + g.ghost(e);
    }
    const int a = (d + 1) % 3, b = (d + 2) % 3;
    for (int jb = lo[b]; jb < hi[b]; ++jb) {
      for (int ja = lo[a]; ja < hi[a]; ++ja) {
        std::array<int, 3> idx{};
        idx[a] = ja;
        idx[b] = jb;
        auto cell = [&](int i) -> double* {
          idx[d] = i;
          return grid.at(idx[0], idx[1], idx[2]);
        };
        for (int gI = 1; gI <= kGhost; ++gI) {
          const int src_lo = spec.face[d][0] == BoundaryKind::Periodic ? n - gI : 0;
          const int src_hi = spec.face[d][1] == BoundaryKind::Periodic ? gI - 1 : n - 1;
          const double* s = cell(src_lo);
          std::copy(s, s + nv, cell(-gI));
          s = cell(src_hi);
          std::copy(s, s + nv, cell(n - 1 + gI));
        }
      }
    }
  }
}

namespace {

// Runs fn(begin, end) over [0, count) split into contiguous blocks.
template <class F>
void parallel_for(int count, int threads, F&& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    fn(0, count);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int t = 0; t < threads; ++t) {
    const int b = int(std::int64_t(count) * t / threads), e = int(std::int64_t(count) * (t + 1) / threads);
    pool.emplace_back([&, t, b, e] {
      try {
        fn(b, e);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

Axis axis_of(int d) { return static_cast<Axis>(d); }

} // namespace

Integrator::Integrator(const GridGeometry& geom, const Eos& eos, const BoundarySpec& bc, const SchemeOptions& opts)
    : geom_(geom), eos_(eos), bc_(bc), opts_(opts) {
  geom_.validate();
  bc_.validate();
  if (opts_.rk_order != 2 && opts_.rk_order != 4) throw std::invalid_argument("rk order must be 2 or 4");
  if (opts_.threads < 1) opts_.threads = 1;
  if (!(opts_.uniform_tolerance >= 0.0)) throw std::invalid_argument("uniform tolerance must be >= 0");
}

void Integrator::refresh_primitives(const GridField& grid) {
  const GridGeometry& g = grid.geometry();
  const std::size_t cells = grid.data().size() / grid.nvar();
  const bool have_guess = prims_.size() == cells && eos_.system == System::PerfectGas;
  prims_.resize(cells);
  const int nz = g.total(2), ny = g.total(1), nx = g.total(0);
  const int gx = g.ghost(0), gy = g.ghost(1), gz = g.ghost(2);
  std::int64_t floored = 0;
  std::mutex first_error_lock;
  std::string first_error;
  std::int64_t first_index = std::numeric_limits<std::int64_t>::max();

  auto body = [&](int kb, int ke) {
    std::int64_t local_floor = 0;
    for (int k = kb; k < ke; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          const std::size_t c = (std::size_t(k) * ny + j) * nx + i;
          const double* p = grid.data().data() + c * grid.nvar();
          StateVector u{};
          for (int v = 0; v < grid.nvar(); ++v) u[v] = p[v];
          RecoveryInfo info;
          try {
            prims_[c] = have_guess ? recover_primitive(u, eos_, prims_[c], &info) : recover_primitive(u, eos_, std::nullopt, &info);
          } catch (const RecoveryError& e) {
            std::lock_guard<std::mutex> lk(first_error_lock);
            if (std::int64_t(c) < first_index) {
              first_index = std::int64_t(c);
              std::ostringstream msg;
              msg << "cell (" << i - gx << ", " << j - gy << ", " << k - gz << ") at t = " << grid.time << ": "
                  << e.what();
              first_error = msg.str();
            }
            continue;
          }
          if (info.floored) ++local_floor;
        }
    return local_floor;
  };
  parallel_for(nz, opts_.threads, [&](int b, int e) {
    const std::int64_t f = body(b, e);
    std::lock_guard<std::mutex> lk(first_error_lock);
    floored += f;
  });
  if (!first_error.empty()) throw EvolutionError("unrecoverable state in " + first_error);
  stats_.floored_cells += floored;
  prims_grid_ = &grid;
  prims_step_ = grid.step;
  prims_time_ = grid.time;
}

void Integrator::sweep(const GridField& grid, int d, std::vector<double>& out) {
  const GridGeometry& g = grid.geometry();
  const int nv = grid.nvar();
  const int n = g.n[d];
  const int a = (d + 1) % 3, b = (d + 2) % 3;
  const int na = g.n[a], nb = g.n[b];
  const int len = n + 2 * kGhost;
  const double inv_dx = 1.0 / g.spacing(d);
  std::array<int, 3> unit{0, 0, 0};
  unit[d] = 1;
  const std::ptrdiff_t stride =
      std::ptrdiff_t(grid.offset(unit[0], unit[1], unit[2])) - std::ptrdiff_t(grid.offset(0, 0, 0));
  const std::ptrdiff_t pstride = stride / nv;
  const Axis dir = axis_of(d);
  const FluxKind kind = opts_.flux;
  const bool reconstruct = opts_.reconstruct;
  const double tolerance = opts_.uniform_tolerance;

  std::mutex stats_lock;
  auto body = [&](int pb, int pe) {
    // Pencil buffers, one contiguous line per variable; index c + kGhost for cell c.
    std::vector<double> line(std::size_t(nv) * len), plus(std::size_t(nv) * len), minus(std::size_t(nv) * len);
    std::vector<StateVector> flux(n + 1);
    std::vector<char> same(len), uniform(n + 1);
    std::int64_t fallback = 0, hlle = 0;
    for (int p = pb; p < pe; ++p) {
      std::array<int, 3> idx{};
      idx[a] = p % na;
      idx[b] = p / na;
      idx[d] = 0;
      const std::size_t off0 = grid.offset(idx[0], idx[1], idx[2]);
      const double* u0 = grid.data().data() + off0;
      const Primitive* w0 = prims_.data() + off0 / nv;

      for (int c = -kGhost; c < n + kGhost; ++c) {
        const double* cu = u0 + std::ptrdiff_t(c) * stride;
        for (int v = 0; v < nv; ++v) line[std::size_t(v) * len + c + kGhost] = cu[v];
      }
      // same[c + kGhost]: cell c matches cell c + 1 in every component to
      // uniform_tolerance * e. A face whose whole stencil (cells f-3 .. f+2)
      // is uniform gets the physical flux F(U), which both numerical fluxes
      // reduce to for equal states.
      for (int c = -kGhost; c < n + kGhost - 1; ++c) {
        const double tol = tolerance * line[c + kGhost];
        bool eq = true;
        for (int v = 0; v < nv && eq; ++v)
          eq = std::abs(line[std::size_t(v) * len + c + kGhost] - line[std::size_t(v) * len + c + kGhost + 1]) <= tol;
        same[c + kGhost] = eq;
      }
      for (int f = 0; f <= n; ++f) {
        bool u = true;
        for (int c = f - 3; c <= f + 1 && u; ++c) u = same[c + kGhost];
        uniform[f] = u;
      }
      if (reconstruct) {
        // CENO only on runs of cells that touch a non-uniform face.
        int c = -1;
        while (c <= n) {
          while (c <= n && uniform[std::max(c, 0)] && uniform[std::min(c + 1, n)]) ++c;
          const int begin = c;
          while (c <= n && !(uniform[std::max(c, 0)] && uniform[std::min(c + 1, n)])) ++c;
          if (c > begin)
            for (int v = 0; v < nv; ++v) {
              const std::size_t o = std::size_t(v) * len;
              ceno_line(line.data() + o, begin + kGhost, c + kGhost, plus.data() + o, minus.data() + o);
            }
        }
      }

      for (int f = 0; f <= n; ++f) {
        const int cl = f - 1 + kGhost, cr = f + kGhost;
        const Primitive& pl = w0[std::ptrdiff_t(f - 1) * pstride];
        const Primitive& pr = w0[std::ptrdiff_t(f) * pstride];
        if (uniform[f]) {
          StateVector uf{};
          for (int v = 0; v < nv; ++v) uf[v] = line[std::size_t(v) * len + cl];
          flux[f] = physical_flux(pl, uf, eos_, dir);
          continue;
        }
        FaceState L, R;
        bool first_order = !reconstruct;
        if (reconstruct) {
          for (int v = 0; v < nv; ++v) {
            L.u[v] = plus[std::size_t(v) * len + cl];
            R.u[v] = minus[std::size_t(v) * len + cr];
          }
          try {
            L.prim = recover_primitive(L.u, eos_, pl);
            R.prim = recover_primitive(R.u, eos_, pr);
          } catch (const RecoveryError&) {
            ++fallback;
            first_order = true;
          }
        }
        if (first_order) {
          for (int v = 0; v < nv; ++v) {
            L.u[v] = line[std::size_t(v) * len + cl];
            R.u[v] = line[std::size_t(v) * len + cr];
          }
          L.prim = pl;
          R.prim = pr;
        }
        if (kind == FluxKind::Marquina) {
          try {
            flux[f] = marquina_flux(L, R, eos_, dir);
          } catch (const DecompositionError&) {
            ++hlle;
            flux[f] = hlle_flux(L, R, eos_, dir);
          }
        } else {
          flux[f] = hlle_flux(L, R, eos_, dir);
        }
      }

      double* r0 = out.data() + off0;
      for (int i = 0; i < n; ++i) {
        double* r = r0 + std::ptrdiff_t(i) * stride;
        for (int v = 0; v < nv; ++v) r[v] -= (flux[i + 1][v] - flux[i][v]) * inv_dx;
      }
    }
    std::lock_guard<std::mutex> lk(stats_lock);
    stats_.fallback_faces += fallback;
    stats_.hlle_faces += hlle;
  };
  parallel_for(na * nb, opts_.threads, body);
}

void Integrator::rhs(const GridField& grid, std::vector<double>& out) {
  if (!(grid.geometry() == geom_) || !(grid.eos() == eos_))
    throw std::invalid_argument("integrator: grid does not match geometry/EOS");
  if (!(prims_grid_ == &grid && prims_step_ == grid.step && prims_time_ == grid.time)) refresh_primitives(grid);
  prims_grid_ = nullptr; // consumed; the next stage changes the data
  out.assign(grid.data().size(), 0.0);
  for (int d = 0; d < 3; ++d)
    if (geom_.active(d)) sweep(grid, d, out);
}

void Integrator::step(GridField& grid, double dt) {
  apply_boundaries(grid, bc_);
  if (stage_.data().size() != grid.data().size()) stage_ = grid;
  // Stage data never matches a cached primitive set.
  stage_.step = -1;
  stage_.time = grid.time;
  auto rhs = [&](const std::vector<double>& v, std::vector<double>& out) {
    this->rhs(&v == &grid.data() ? static_cast<const GridField&>(grid) : stage_, out);
  };
  auto fill = [&](std::vector<double>&) { apply_boundaries(stage_, bc_); };
  rk_advance(grid.data(), dt, opts_.rk_order, rhs, fill, stage_.data(), k_, acc_);
  grid.time += dt;
  grid.step += 1;
  apply_boundaries(grid, bc_);
}

double Integrator::timestep(const GridField& grid, double cfl) {
  if (!(cfl > 0.0 && cfl < 1.0)) throw std::invalid_argument("cfl must lie in (0, 1)");
  if (!(prims_grid_ == &grid && prims_step_ == grid.step && prims_time_ == grid.time)) refresh_primitives(grid);
  const GridGeometry& g = grid.geometry();
  const int nv = grid.nvar();
  std::vector<double> best(g.n[2], std::numeric_limits<double>::infinity());
  parallel_for(g.n[2], opts_.threads, [&](int kb, int ke) {
    for (int k = kb; k < ke; ++k) {
      double m = std::numeric_limits<double>::infinity();
      for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i) {
          const Primitive& p = prims_[grid.offset(i, j, k) / nv];
          for (int d = 0; d < 3; ++d) {
            if (!g.active(d)) continue;
            const double s = max_signal_speed(p, eos_, axis_of(d));
            if (!std::isfinite(s)) throw EvolutionError("non-finite characteristic speed");
            m = std::min(m, g.spacing(d) / s);
          }
        }
      best[k] = m;
    }
  });
  return cfl * *std::min_element(best.begin(), best.end());
}

std::vector<double> mol_rhs(const GridField& grid, const SchemeOptions& opts) {
  Integrator it(grid.geometry(), grid.eos(), BoundarySpec{}, opts);
  std::vector<double> out;
  it.rhs(grid, out);
  return out;
}

void rk_step(GridField& grid, const BoundarySpec& bc, double dt, const SchemeOptions& opts) {
  Integrator it(grid.geometry(), grid.eos(), bc, opts);
  it.step(grid, dt);
}

double compute_timestep(const GridField& grid, double cfl) {
  Integrator it(grid.geometry(), grid.eos(), BoundarySpec{}, SchemeOptions{});
  return it.timestep(grid, cfl);
}

EvolveResult evolve(GridField& grid, Integrator& integrator, const EvolveSettings& settings,
                    const StepObserver& observer) {
  using clock = std::chrono::steady_clock;
  const auto started = clock::now();
  EvolveResult result;
  std::vector<double> stops;
  for (double t : settings.stop_times)
    if (t < settings.t_end) stops.push_back(t);
  stops.push_back(settings.t_end);
  std::sort(stops.begin(), stops.end());

  apply_boundaries(grid, integrator.boundaries());
  while (grid.time < settings.t_end) {
    if (settings.wall_clock_limit > 0.0 &&
        std::chrono::duration<double>(clock::now() - started).count() > settings.wall_clock_limit) {
      result.status = EvolveStatus::WallClockExceeded;
      break;
    }
    double dt = integrator.timestep(grid, settings.cfl);
    if (settings.dt_limit) dt = std::min(dt, settings.dt_limit());
    const auto next = std::upper_bound(stops.begin(), stops.end(), grid.time);
    const double target = next == stops.end() ? settings.t_end : *next;
    bool landed = false;
    if (grid.time + dt * (1.0 + 1e-9) >= target) {
      dt = target - grid.time;
      landed = true;
    }
    integrator.step(grid, dt);
    if (landed) grid.time = target;
    ++result.steps;
    if (observer) observer(grid, dt, landed);
  }
  result.stats = integrator.stats();
  return result;
}

std::string to_string(FluxKind k) { return k == FluxKind::Marquina ? "marquina" : "hlle"; }

FluxKind parse_flux_kind(const std::string& s) {
  if (s == "marquina") return FluxKind::Marquina;
  if (s == "hlle") return FluxKind::Hlle;
  throw std::invalid_argument("unknown flux kind '" + s + "' (expected marquina or hlle)");
}

} // namespace relhydro
