// Acceptance checks. Each invocation runs one criterion and prints a single
// "criterion N: PASS|FAIL" line followed by indented details; the exit code is
// 0 on pass.

#include "oracles.hpp"

#include "relhydro/cli_io.hpp"
#include "relhydro/diagnostics.hpp"
#include "relhydro/evolution.hpp"
#include "relhydro/exact_riemann.hpp"
#include "relhydro/flux.hpp"
#include "relhydro/reconstruction.hpp"
#include "relhydro/setup.hpp"
#include "relhydro/state.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace relhydro;

namespace {

struct Outcome {
  bool pass = true;
  std::string title;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    pass = pass && ok;
  }
  void note(const std::string& what) { details.push_back("     " + what); }
};

std::string num(double x, int digits = 4) {
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

const Eos kUltra = Eos::ultra_relativistic(1.0 / 3.0);
const Eos kGas = Eos::perfect_gas(4.0 / 3.0);
constexpr Axis kAxes[] = {Axis::X, Axis::Y, Axis::Z};

double inf_norm(const StateVector& u, int n) {
  double m = 0.0;
  for (int i = 0; i < n; ++i) m = std::max(m, std::abs(u[i]));
  return m;
}

// ---------------------------------------------------------------------------

Outcome classification() {
  Outcome out{true, "Riemann pattern of problems a-f is SS, RR, RS, SS, RR, RS", {}};
  const std::string expected[] = {"SS", "RR", "RS", "SS", "RR", "RS"};
  Stopwatch sw;
  std::vector<std::string> got;
  for (char label = 'a'; label <= 'f'; ++label) {
    const RiemannProblem p = table1_problem(label);
    got.push_back(to_string(classify_pattern(p.left, p.right, p.eos)));
  }
  const double elapsed = sw.seconds();
  for (int i = 0; i < 6; ++i) {
    const char label = char('a' + i);
    std::string what = std::string("(") + label + ") " + got[i] + ", expected " + expected[i];
    if (got[i] != expected[i]) {
      const ExactSolution s = solve_star_state(table1_problem(label).left, table1_problem(label).right,
                                               table1_problem(label).eos);
      what += " [left wave " + to_string(s.left_wave) + ", right wave " + to_string(s.right_wave) +
              ", p_L " + num(s.left.p) + " < p* " + num(s.p_star) + " < p_R " + num(s.right.p) + "]";
    }
    out.check(got[i] == expected[i], what);
  }
  out.check(elapsed < 1.0, "runtime " + num(elapsed, 3) + " s < 1 s");
  return out;
}

// ---------------------------------------------------------------------------

// Independent sound speed from the thermodynamic variables.
double sound_speed_oracle(const Primitive& w, const Eos& eos) {
  if (eos.system == System::UltraRelativistic) return std::sqrt(eos.cs2);
  const double g = eos.gamma;
  return std::sqrt(g * (g - 1.0) * w.eps / (1.0 + g * w.eps));
}

Outcome eigen_algebra() {
  Outcome out{true, "characteristic projections and eigenvalues on 10^4 random states per system", {}};
  Stopwatch sw;
  constexpr int kStates = 10000;
  for (const Eos& eos : {kUltra, kGas}) {
    const char* name = eos.system == System::UltraRelativistic ? "system I" : "system II";
    const int n = eos.nvar();
    std::mt19937_64 rng(eos.system == System::UltraRelativistic ? 11 : 12);
    double worst_sum = 0.0, worst_eig = 0.0, worst_1d = 0.0;
    int failures = 0;
    for (int s = 0; s < kStates; ++s) {
      const Primitive w = oracle::random_primitive(rng, eos);
      const StateVector u = primitive_to_conserved(w, eos);
      for (Axis dir : kAxes) {
        try {
          const CharacteristicDecomposition d = characteristic_projection(w, u, eos, dir);
          double err = 0.0;
          for (int c = 0; c < n; ++c) err = std::max(err, std::abs(d.degenerate[c] + d.minus[c] + d.plus[c] - u[c]));
          worst_sum = std::max(worst_sum, err / inf_norm(u, n));

          const auto spectrum = oracle::real_eigenvalues(oracle::flux_jacobian(u, eos, dir));
          for (double lam : {d.lambda.lambda_minus, d.lambda.lambda0, d.lambda.lambda_plus})
            worst_eig = std::max(worst_eig, oracle::eigen_distance(spectrum, lam) / std::max(1.0, std::abs(lam)));
        } catch (const PhysicsError& e) {
          ++failures;
        }
      }
      // Purely normal motion along each axis.
      for (Axis dir : kAxes) {
        Vec3 v{0.0, 0.0, 0.0};
        v[axis_index(dir)] = w.v[0] >= 0 ? std::sqrt(w.v2()) : -std::sqrt(w.v2());
        const Primitive wn = eos.system == System::UltraRelativistic ? make_ultra(w.rho, v, eos)
                                                                      : make_gas(w.n, w.eps, v, eos);
        const double vn = v[axis_index(dir)];
        const double cs = sound_speed_oracle(wn, eos);
        const Eigenvalues lam = eigenvalues(wn, eos, dir);
        worst_1d = std::max({worst_1d, std::abs(lam.lambda_plus - (vn + cs) / (1.0 + vn * cs)),
                             std::abs(lam.lambda_minus - (vn - cs) / (1.0 - vn * cs))});
      }
    }
    out.check(failures == 0, std::string(name) + ": states where the decomposition or the FD Jacobian threw: " + std::to_string(failures));
    out.check(worst_sum <= 1e-9, std::string(name) + ": max |sum P - U| / |U| = " + num(worst_sum) + " <= 1e-9");
    out.check(worst_eig <= 1e-6, std::string(name) + ": max eigenvalue distance to FD Jacobian spectrum / max(1,|lambda|) = " +
                                     num(worst_eig) + " <= 1e-6");
    out.check(worst_1d <= 1e-12, std::string(name) + ": zero tangential velocity, max |lambda_pm - (v +- cs)/(1 +- v cs)| = " +
                                     num(worst_1d) + " <= 1e-12");
  }
  const double elapsed = sw.seconds();
  out.check(elapsed < 60.0, "runtime " + num(elapsed, 3) + " s < 60 s");
  return out;
}

// ---------------------------------------------------------------------------

double primitive_mismatch(const Primitive& a, const Primitive& b, const Eos& eos) {
  auto rel = [](double x, double ref) { return std::abs(x - ref) / std::abs(ref); };
  double err = 0.0;
  if (eos.system == System::UltraRelativistic) {
    err = rel(b.rho, a.rho);
  } else {
    err = std::max(rel(b.n, a.n), rel(b.eps, a.eps));
  }
  const double dv = std::sqrt((b.v[0] - a.v[0]) * (b.v[0] - a.v[0]) + (b.v[1] - a.v[1]) * (b.v[1] - a.v[1]) +
                              (b.v[2] - a.v[2]) * (b.v[2] - a.v[2]));
  return std::max(err, dv / std::sqrt(a.v2()));
}

Outcome roundtrip() {
  Outcome out{true, "primitive -> conserved -> primitive on 10^5 random states per system", {}};
  Stopwatch sw;
  constexpr int kStates = 100000;
  for (const Eos& eos : {kUltra, kGas}) {
    const bool ultra = eos.system == System::UltraRelativistic;
    const double tol = ultra ? 1e-12 : 1e-10;
    std::mt19937_64 rng(ultra ? 21 : 22);
    double worst = 0.0;
    int failures = 0;
    for (int s = 0; s < kStates; ++s) {
      const Primitive w = oracle::random_primitive(rng, eos);
      try {
        worst = std::max(worst, primitive_mismatch(w, recover_primitive(primitive_to_conserved(w, eos), eos), eos));
      } catch (const PhysicsError&) {
        ++failures;
      }
    }
    const std::string name = ultra ? "system I" : "system II";
    out.check(failures == 0, name + ": recoveries that threw: " + std::to_string(failures));
    out.check(worst <= tol, name + ": max relative error " + num(worst) + " <= " + num(tol));
  }
  const double elapsed = sw.seconds();
  out.check(elapsed < 60.0, "runtime " + num(elapsed, 3) + " s < 60 s");
  return out;
}

// ---------------------------------------------------------------------------

GridField run_1d(const RiemannProblem& problem, int zones, double t_end) {
  GridGeometry g;
  g.n = {zones, 1, 1};
  g.lo = {-1.5, 0.0, 0.0};
  g.hi = {1.5, 1.0, 0.5};
  GridField grid = initialize_grid(problem, {}, g);
  const BoundarySpec bc = BoundarySpec::outflow_x_periodic_yz();
  apply_boundaries(grid, bc);
  Integrator integrator(g, problem.eos, bc, SchemeOptions{});
  EvolveSettings settings;
  settings.t_end = t_end;
  settings.cfl = 0.5;
  evolve(grid, integrator, settings);
  return grid;
}

// Relative L1 distance of e from the exact solution's cell averages
// (32-point midpoint rule per cell).
double exact_l1_error(const GridField& grid, const ExactSolution& sol, double t) {
  const GridGeometry& g = grid.geometry();
  const double dx = g.spacing(0);
  constexpr int kSub = 32;
  double err = 0.0, ref = 0.0;
  for (int i = 0; i < g.n[0]; ++i) {
    double avg = 0.0;
    for (int s = 0; s < kSub; ++s) {
      const double x = g.lo[0] + (i + (s + 0.5) / kSub) * dx;
      avg += primitive_to_conserved(sample(sol, x / t), sol.eos)[kEnergy];
    }
    avg /= kSub;
    err += std::abs(grid.at(i, 0, 0)[kEnergy] - avg) * dx;
    ref += std::abs(avg) * dx;
  }
  return err / ref;
}

Outcome shock_tube_convergence() {
  Outcome out{true, "1D runs of problems a-f converge to the exact solution in L1(e)", {}};
  Stopwatch sw;
  const int zones[] = {200, 400, 800};
  for (char label = 'a'; label <= 'f'; ++label) {
    const RiemannProblem p = table1_problem(label);
    double t = 0.0;
    for (double ft : figure_times(label))
      if (ft > 0.0) {
        t = ft;
        break;
      }
    const ExactSolution sol = solve_star_state(p.left, p.right, p.eos);
    double errs[3];
    for (int r = 0; r < 3; ++r) errs[r] = exact_l1_error(run_1d(p, zones[r], t), sol, t);
    // Least-squares slope of log(err) against log(dx) over the three grids.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int r = 0; r < 3; ++r) {
      const double x = std::log(3.0 / zones[r]), y = std::log(errs[r]);
      sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double order = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
    const bool monotone = errs[1] < errs[0] && errs[2] < errs[1];
    const std::string head = std::string("(") + label + ") t = " + num(t, 2) + ": ";
    out.note(head + "rel. L1 errors " + num(errs[0]) + ", " + num(errs[1]) + ", " + num(errs[2]) +
             " at 200/400/800 zones; pairwise orders " + num(std::log2(errs[0] / errs[1]), 3) + ", " +
             num(std::log2(errs[1] / errs[2]), 3));
    out.check(monotone, head + "error decreases monotonically with refinement");
    out.check(order >= 0.8, head + "fitted order " + num(order, 3) + " >= 0.8");
    out.check(errs[2] < 0.02, head + "800-zone error " + num(errs[2]) + " < 0.02");
  }
  const double elapsed = sw.seconds();
  out.check(elapsed < 120.0, "runtime " + num(elapsed, 3) + " s < 120 s");
  return out;
}

// ---------------------------------------------------------------------------

// Smooth periodic data plus a top-hat density region, so that limiters and
// both flux branches are exercised.
GridField periodic_box(const Eos& eos) {
  GridGeometry g;
  g.n = {32, 32, 32};
  g.lo = {0.0, 0.0, 0.0};
  g.hi = {1.0, 1.0, 1.0};
  GridField grid(g, eos);
  const double tau = 2.0 * std::numbers::pi;
  for (int k = 0; k < 32; ++k)
    for (int j = 0; j < 32; ++j)
      for (int i = 0; i < 32; ++i) {
        const double x = g.center(0, i), y = g.center(1, j), z = g.center(2, k);
        const double r2 = (x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5) + (z - 0.5) * (z - 0.5);
        const double bump = r2 < 0.04 ? 2.0 : 1.0;
        const Vec3 v{0.3 * std::sin(tau * y), 0.2 * std::cos(tau * z), 0.25 * std::sin(tau * (x + y))};
        const double rho = bump * (1.0 + 0.3 * std::sin(tau * (x + z)));
        const Primitive w = eos.system == System::UltraRelativistic ? make_ultra(rho, v, eos)
                                                                     : make_gas(rho, 0.5 + 0.2 * std::cos(tau * x), v, eos);
        grid.set(i, j, k, primitive_to_conserved(w, eos));
      }
  return grid;
}

Outcome flux_consistency() {
  Outcome out{true, "flux consistency and conservation on a periodic 32^3 box", {}};
  Stopwatch sw;
  constexpr double kRoundoff = 1e-12;
  for (const Eos& eos : {kUltra, kGas}) {
    const bool ultra = eos.system == System::UltraRelativistic;
    const std::string name = ultra ? "system I" : "system II";
    const int n = eos.nvar();
    std::mt19937_64 rng(ultra ? 31 : 32);
    double worst[2] = {0.0, 0.0};
    for (int s = 0; s < 10000; ++s) {
      const Primitive w = oracle::random_primitive(rng, eos);
      const StateVector u = primitive_to_conserved(w, eos);
      for (Axis dir : kAxes) {
        const StateVector f = physical_flux(w, eos, dir);
        const double scale = std::max(inf_norm(f, n), inf_norm(u, n));
        const StateVector fm = marquina_flux(u, u, eos, dir);
        const StateVector fh = hlle_flux(u, u, eos, dir);
        for (int c = 0; c < n; ++c) {
          worst[0] = std::max(worst[0], std::abs(fm[c] - f[c]) / scale);
          worst[1] = std::max(worst[1], std::abs(fh[c] - f[c]) / scale);
        }
      }
    }
    out.check(worst[0] <= kRoundoff, name + ": max |F_marquina(U,U) - F(U)| / max(|F|,|U|) = " + num(worst[0]) +
                                         " <= " + num(kRoundoff));
    out.check(worst[1] <= kRoundoff, name + ": max |F_hlle(U,U) - F(U)| / max(|F|,|U|) = " + num(worst[1]) +
                                         " <= " + num(kRoundoff));
  }

  for (const Eos& eos : {kUltra, kGas}) {
    const std::string name = eos.system == System::UltraRelativistic ? "system I" : "system II";
    const int n = eos.nvar();
    GridField grid = periodic_box(eos);
    const BoundarySpec bc = BoundarySpec::periodic();
    apply_boundaries(grid, bc);
    SchemeOptions opts;
    Integrator integrator(grid.geometry(), eos, bc, opts);
    const StateVector start = conservation_totals(grid);
    StateVector magnitude{};
    const double dv = grid.geometry().cell_volume();
    for (int k = 0; k < 32; ++k)
      for (int j = 0; j < 32; ++j)
        for (int i = 0; i < 32; ++i)
          for (int c = 0; c < n; ++c) magnitude[c] += std::abs(grid.at(i, j, k)[c]) * dv;
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
      integrator.step(grid, integrator.timestep(grid, 0.25));
      const StateVector now = conservation_totals(grid);
      for (int c = 0; c < n; ++c) worst = std::max(worst, std::abs(now[c] - start[c]) / magnitude[c]);
    }
    out.check(worst < 1e-11, name + ": 100 steps, max per-component |total - total_0| / sum|U| dV = " + num(worst) +
                                 " < 1e-11 (t = " + num(grid.time, 3) + ", HLLE faces " +
                                 std::to_string(integrator.stats().hlle_faces) + ")");
  }
  const double elapsed = sw.seconds();
  out.check(elapsed < 120.0, "runtime " + num(elapsed, 3) + " s < 120 s");
  return out;
}

// ---------------------------------------------------------------------------

Outcome ceno_accuracy() {
  Outcome out{true, "CENO face values: sine convergence, constants and linears", {}};
  const double tau = 2.0 * std::numbers::pi;
  const int sizes[] = {16, 32, 64, 128};
  double errs[4];
  for (int r = 0; r < 4; ++r) {
    const int n = sizes[r];
    const double h = 1.0 / n;
    std::vector<double> u(n + 6), plus(n + 6), minus(n + 6);
    // Exact averages of sin(2 pi x) on a periodic line, two ghosts per side.
    for (int i = -3; i < n + 3; ++i) {
      const double a = i * h, b = a + h;
      u[i + 3] = (std::cos(tau * a) - std::cos(tau * b)) / (tau * h);
    }
    ceno_line(u.data(), 3, n + 3, plus.data(), minus.data());
    // Skip zones whose five-zone stencil touches an extremum at x = 1/4, 3/4.
    auto near_extremum = [&](int i) {
      for (double xe : {0.25, 0.75})
        if ((i - 2) * h <= xe && xe <= (i + 3) * h) return true;
      return false;
    };
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      if (near_extremum(i)) continue;
      err = std::max({err, std::abs(plus[i + 3] - std::sin(tau * (i + 1) * h)),
                      std::abs(minus[i + 3] - std::sin(tau * i * h))});
    }
    errs[r] = err;
  }
  std::string list;
  for (int r = 0; r < 4; ++r) list += (r ? ", " : "") + num(errs[r]);
  out.note("max face error on monotone zones at N = 16, 32, 64, 128: " + list);
  for (int r = 0; r < 3; ++r) {
    const double p = std::log2(errs[r] / errs[r + 1]);
    out.check(p >= 2.5, "exponent N = " + std::to_string(sizes[r]) + " -> " + std::to_string(sizes[r + 1]) + ": " +
                            num(p, 3) + " >= 2.5");
  }

  constexpr double kRoundoff = 1e-13;
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> coef(-10.0, 10.0), width(0.2, 2.0);
  double worst_const = 0.0, worst_lin = 0.0;
  for (int s = 0; s < 10000; ++s) {
    const double a = coef(rng), b = coef(rng);
    std::array<double, 5> w;
    for (double& x : w) x = width(rng);
    // Zone centres with zone 2 at the origin.
    std::array<double, 5> xc;
    xc[2] = 0.0;
    xc[3] = 0.5 * (w[2] + w[3]);
    xc[4] = xc[3] + 0.5 * (w[3] + w[4]);
    xc[1] = -0.5 * (w[2] + w[1]);
    xc[0] = xc[1] - 0.5 * (w[1] + w[0]);
    std::array<double, 5> uc, ul;
    for (int i = 0; i < 5; ++i) {
      uc[i] = a;
      ul[i] = a + b * xc[i];
    }
    const double scale = std::abs(a) + std::abs(b) * 4.0;
    const FacePair c1 = ceno_faces(uc), c2 = ceno_faces(uc, w);
    worst_const = std::max({worst_const, std::abs(c1.left_of_plus_face - a) / std::abs(a),
                            std::abs(c1.right_of_minus_face - a) / std::abs(a),
                            std::abs(c2.left_of_plus_face - a) / std::abs(a),
                            std::abs(c2.right_of_minus_face - a) / std::abs(a)});
    const FacePair l2 = ceno_faces(ul, w);
    worst_lin = std::max({worst_lin, std::abs(l2.left_of_plus_face - (a + b * 0.5 * w[2])) / scale,
                          std::abs(l2.right_of_minus_face - (a - b * 0.5 * w[2])) / scale});
    std::array<double, 5> uu;
    for (int i = 0; i < 5; ++i) uu[i] = a + b * (i - 2);
    const FacePair l1 = ceno_faces(uu);
    worst_lin = std::max({worst_lin, std::abs(l1.left_of_plus_face - (a + 0.5 * b)) / scale,
                          std::abs(l1.right_of_minus_face - (a - 0.5 * b)) / scale});
  }
  out.check(worst_const <= kRoundoff, "constants (uniform and random widths): max relative face error " +
                                          num(worst_const) + " <= " + num(kRoundoff));
  out.check(worst_lin <= kRoundoff, "linears (uniform and random widths): max relative face error " + num(worst_lin) +
                                        " <= " + num(kRoundoff));
  return out;
}

// ---------------------------------------------------------------------------

struct CorrugationRun {
  RunResult result;
  RunConfig config;
  bool reused = false;
};

RunConfig corrugation_config(int scale, int threads, bool zero_tangential, const fs::path& dir) {
  RunConfig cfg = default_config('a', 3, scale);
  cfg.zero_tangential = zero_tangential;
  cfg.scheme.threads = threads;
  cfg.output_dir = dir.string();
  cfg.snapshot_times.clear();
  for (int i = 1; i <= 10; ++i) cfg.snapshot_times.push_back(0.25 * i);
  cfg.t_end = 2.5;
  return cfg;
}

RunResult run_logged(const RunConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  std::ofstream log(fs::path(cfg.output_dir) / "acceptance.log");
  return run(cfg, log);
}

// Initial-interface amplitude max - min of the offset over the grid columns.
double initial_amplitude(const PerturbationSpec& pert, const GridGeometry& g) {
  double lo = 1e300, hi = -1e300;
  for (int k = 0; k < g.n[2]; ++k)
    for (int j = 0; j < g.n[1]; ++j) {
      const double off = corrugation_offset(pert, g.center(1, j), g.center(2, k), g);
      lo = std::min(lo, off);
      hi = std::max(hi, off);
    }
  return hi - lo;
}

// Transverse e fluctuation in a slab around the contact: for each x index in
// the slab, e minus its (y, z) mean; sqrt(sum of squares * dV).
double contact_spread(const GridField& grid, double x_contact, double half_width) {
  const GridGeometry& g = grid.geometry();
  const double dv = g.cell_volume();
  double sum = 0.0;
  for (int i = 0; i < g.n[0]; ++i) {
    if (std::abs(g.center(0, i) - x_contact) > half_width) continue;
    double mean = 0.0;
    for (int k = 0; k < g.n[2]; ++k)
      for (int j = 0; j < g.n[1]; ++j) mean += grid.at(i, j, k)[kEnergy];
    mean /= double(g.n[1]) * g.n[2];
    for (int k = 0; k < g.n[2]; ++k)
      for (int j = 0; j < g.n[1]; ++j) {
        const double d = grid.at(i, j, k)[kEnergy] - mean;
        sum += d * d * dv;
      }
  }
  return std::sqrt(sum);
}

struct SpreadSeries {
  std::vector<double> t, spread;
};

SpreadSeries contact_spread_series(const RunConfig& cfg, const RiemannProblem& problem) {
  const ExactSolution sol = solve_star_state(problem.left, problem.right, problem.eos);
  SpreadSeries s;
  for (double t : cfg.snapshot_times) {
    const GridField g = read_snapshot(fs::path(cfg.output_dir) / ("snap_" + snapshot_name(t) + ".bin"));
    s.t.push_back(t);
    s.spread.push_back(contact_spread(g, sol.contact * t, 0.2));
  }
  return s;
}

double max_over(const std::vector<NormTriple>& norms, double t0, double t1, double NormTriple::*field) {
  double m = 0.0;
  for (const NormTriple& n : norms)
    if (n.t >= t0 && n.t <= t1) m = std::max(m, n.*field);
  return m;
}

double value_at(const std::vector<NormTriple>& norms, double t, double NormTriple::*field) {
  // First sample at or after t.
  for (const NormTriple& n : norms)
    if (n.t >= t - 1e-12) return n.*field;
  return norms.back().*field;
}

double slope_over(const std::vector<NormTriple>& norms, double t0, double t1, double NormTriple::*field) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const NormTriple& n : norms)
    if (n.t >= t0 && n.t <= t1) {
      sx += n.t, sy += n.*field, sxx += n.t * n.t, sxy += n.t * (n.*field);
      ++m;
    }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

// Marker holding the resolved config of a completed run, so that a later
// criterion can reuse its outputs.
fs::path marker(const RunConfig& cfg) { return fs::path(cfg.output_dir) / "completed.ini"; }

bool completed_with(const RunConfig& cfg) {
  std::ifstream in(marker(cfg));
  if (!in) return false;
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str() == format_config(cfg) && fs::exists(fs::path(cfg.output_dir) / "norms.csv");
}

void mark_completed(const RunConfig& cfg) { std::ofstream(marker(cfg)) << format_config(cfg); }

std::string budget_line(double seconds) {
  return "wall time " + num(seconds, 4) + " s on this host (" + std::to_string(std::thread::hardware_concurrency()) +
         " hardware threads) <= 3600 s";
}

Outcome corrugation(int scale, const fs::path& work) {
  Outcome out{true, "problem (a), scale " + std::to_string(scale) + ", seeded corrugation to t = 2.5", {}};
  const RunConfig cfg = corrugation_config(scale, 1, false, work / "corrugation_threads1");
  fs::remove(marker(cfg));
  const RunResult res = run_logged(cfg);
  mark_completed(cfg);
  const auto& norms = res.norms;
  const double T = cfg.t_end;
  const GridGeometry& g = cfg.geometry;
  out.note("grid " + std::to_string(g.n[0]) + "x" + std::to_string(g.n[1]) + "x" + std::to_string(g.n[2]) + ", " +
           std::to_string(res.perturbation.bumps.size()) + " bumps (seed " + std::to_string(cfg.seed) + "), " +
           std::to_string(res.evolve.steps) + " steps, " + std::to_string(norms.size()) + " norm samples");

  // (i) growth, then non-increase over the final third.
  const double l2_0 = norms.front().l2;
  const double early_max = max_over(norms, 0.0, T / 3.0, &NormTriple::l2);
  const double l2_23 = value_at(norms, 2.0 * T / 3.0, &NormTriple::l2);
  const double l2_T = norms.back().l2;
  const double slope = slope_over(norms, 2.0 * T / 3.0, T, &NormTriple::l2);
  out.note("L2: t=0 " + num(l2_0) + ", max over first third " + num(early_max) + ", overall max " +
           num(max_over(norms, 0.0, T, &NormTriple::l2)) + ", t=2T/3 " + num(l2_23) + ", t=T " + num(l2_T));
  out.check(early_max > l2_0, "(i) L2 grows from its initial value within the first third");
  out.check(l2_T <= l2_23 && slope <= 0.0, "(i) L2 non-increasing over the final third: L2(T) <= L2(2T/3) and "
                                           "least-squares slope " + num(slope) + " <= 0");

  // (ii) L-infinity plateaus or oscillates.
  const double linf_first = max_over(norms, 0.0, T / 2.0, &NormTriple::linf);
  const double linf_second = max_over(norms, T / 2.0, T, &NormTriple::linf);
  bool monotone_up = true;
  double prev = -1.0;
  for (const NormTriple& n : norms)
    if (n.t >= T / 2.0) {
      if (n.linf < prev) monotone_up = false;
      prev = n.linf;
    }
  out.note("Linf: max over first half " + num(linf_first) + ", over second half " + num(linf_second) + ", t=T " +
           num(norms.back().linf));
  out.check(!monotone_up && norms.back().linf <= 1.25 * linf_first,
            "(ii) Linf not monotonically growing over the second half, and Linf(T) <= 1.25 x first-half max");

  // (iii) shock fronts flatter than the initial interface.
  const RiemannProblem problem = cfg.resolved_problem();
  const ExactSolution sol = solve_star_state(problem.left, problem.right, problem.eos);
  const double a0 = initial_amplitude(res.perturbation, g);
  for (WaveFront w : {WaveFront::Left, WaveFront::Right}) {
    const FrontProfile fp = front_profile(res.final_grid, sol, w);
    const std::string side = w == WaveFront::Left ? "left" : "right";
    out.check(fp.missing_columns == 0 && fp.amplitude < a0,
              "(iii) " + side + " shock amplitude at t = 2.5: " + num(fp.amplitude) + " < initial " + num(a0) +
                  " (dx = " + num(g.spacing(0)) + ", columns without a crossing: " +
                  std::to_string(fp.missing_columns) + ")");
  }

  const SpreadSeries spread = contact_spread_series(cfg, problem);
  std::string list;
  for (std::size_t i = 0; i < spread.t.size(); ++i) list += (i ? ", " : "") + num(spread.spread[i], 3);
  out.note("transverse e spread within 0.2 of the contact at t = 0.25..2.5: " + list);

  out.check(res.wall_seconds <= 3600.0, budget_line(res.wall_seconds));
  return out;
}

Outcome tangential_control(int scale, const fs::path& work) {
  Outcome out{true, "problem (a) with zero tangential velocity, same perturbations", {}};
  const RunConfig cfg = corrugation_config(scale, 1, true, work / "control_threads1");
  const RunResult res = run_logged(cfg);
  const auto& norms = res.norms;
  const double T = cfg.t_end;
  const double early_max = max_over(norms, 0.0, T / 3.0, &NormTriple::l2);
  out.note(std::to_string(res.perturbation.bumps.size()) + " bumps, " + std::to_string(res.evolve.steps) + " steps");
  out.check(norms.back().l2 < early_max,
            "late L2 " + num(norms.back().l2) + " < max over first third " + num(early_max));

  const SpreadSeries spread = contact_spread_series(cfg, cfg.resolved_problem());
  double spread_early = 0.0;
  std::string list;
  for (std::size_t i = 0; i < spread.t.size(); ++i) {
    if (spread.t[i] <= T / 3.0) spread_early = std::max(spread_early, spread.spread[i]);
    list += (i ? ", " : "") + num(spread.spread[i], 3);
  }
  out.note("transverse e spread within 0.2 of the contact at t = 0.25..2.5: " + list);
  out.check(spread.spread.back() < spread_early, "no disturbance grows at the contact: spread at t = 2.5 " +
                                                     num(spread.spread.back()) + " < max over first third " +
                                                     num(spread_early));
  out.check(res.wall_seconds <= 3600.0, budget_line(res.wall_seconds));
  return out;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(int scale, int threads, const fs::path& work) {
  Outcome out{true, "corrugation run with 1 and " + std::to_string(threads) + " threads gives identical norms", {}};
  const RunConfig one = corrugation_config(scale, 1, false, work / "corrugation_threads1");
  if (completed_with(one)) {
    out.note("1-thread series reused from " + one.output_dir);
  } else {
    run_logged(one);
    mark_completed(one);
  }
  const RunConfig many = corrugation_config(scale, threads, false, work / ("corrugation_threads" + std::to_string(threads)));
  run_logged(many);
  const std::string a = read_bytes(fs::path(one.output_dir) / "norms.csv");
  const std::string b = read_bytes(fs::path(many.output_dir) / "norms.csv");
  out.check(!a.empty() && a == b, "norms.csv byte-identical (" + std::to_string(a.size()) + " vs " +
                                      std::to_string(b.size()) + " bytes)");
  return out;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"relhydro acceptance checks"};
  int criterion = 0, scale = 6, threads = 4;
  std::string work = "acceptance_runs";
  app.add_option("criterion", criterion, "criterion number 1-9")->required()->check(CLI::Range(1, 9));
  app.add_option("--scale", scale, "grid scale divisor for criteria 7-9");
  app.add_option("--threads", threads, "worker threads for the second run of criterion 9");
  app.add_option("--work", work, "directory for run outputs");
  CLI11_PARSE(app, argc, argv);

  Outcome out;
  try {
    switch (criterion) {
    case 1: out = classification(); break;
    case 2: out = eigen_algebra(); break;
    case 3: out = roundtrip(); break;
    case 4: out = shock_tube_convergence(); break;
    case 5: out = flux_consistency(); break;
    case 6: out = ceno_accuracy(); break;
    case 7: out = corrugation(scale, work); break;
    case 8: out = tangential_control(scale, work); break;
    case 9: out = determinism(scale, threads, work); break;
    }
  } catch (const std::exception& e) {
    out.pass = false;
    out.check(false, std::string("aborted: ") + e.what());
  }
  std::cout << "criterion " << criterion << ": " << (out.pass ? "PASS" : "FAIL") << "  " << out.title << '\n';
  for (const std::string& d : out.details) std::cout << "  " << d << '\n';
  return out.pass ? 0 : 1;
}
