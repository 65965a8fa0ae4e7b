#include "relhydro/exact_riemann.hpp"

#include "relhydro/flux.hpp"

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace relhydro {

std::string to_string(WavePattern p) {
  switch (p) {
  case WavePattern::SS: return "SS";
  case WavePattern::RR: return "RR";
  case WavePattern::SR: return "SR";
  case WavePattern::RS: return "RS";
  }
  return "?";
}

std::string to_string(WaveKind k) { return k == WaveKind::Shock ? "shock" : "rarefaction"; }

namespace {

constexpr double kStrengthTol = 1e-10;

double tangential_u2(const Primitive& s) {
  const double W = lorentz_factor(s);
  return W * W * (s.v[1] * s.v[1] + s.v[2] * s.v[2]);
}

// Thermodynamic state at pressure p on the isentrope through `a` (velocity
// left at zero).
Primitive isentrope(const Primitive& a, double p, const Eos& eos) {
  Primitive s;
  s.p = p;
  if (eos.system == System::UltraRelativistic) {
    s.rho = p / eos.cs2;
  } else {
    const double g = eos.gamma;
    s.n = a.n * std::pow(p / a.p, 1.0 / g);
    s.eps = p / ((g - 1.0) * s.n);
    s.rho = s.n + p / (g - 1.0);
  }
  return s;
}

// h(p)/h(a) along the isentrope. For the barotropic system h is taken
// relative to the conserved-particle density n ~ p^(1/(1+c_s^2)).
double enthalpy_ratio(const Primitive& a, const Primitive& s, const Eos& eos) {
  if (eos.system == System::UltraRelativistic) {
    const double k = eos.cs2;
    return std::pow(s.p / a.p, k / (1.0 + k));
  }
  return specific_enthalpy(s) / specific_enthalpy(a);
}

double acoustic_speed(double vx, double vt2, double cs2, int sign) {
  const double W2 = 1.0 / (1.0 - vx * vx - vt2);
  const double A = 1.0 / std::sqrt(1.0 + W2 * (1.0 - vx * vx) * (1.0 - cs2) / cs2);
  return (vx + sign * A) / (1.0 + sign * vx * A);
}

// Assemble the fan state at pressure p from its normal velocity.
Primitive fan_state(const Primitive& a, double p, double vx, const Eos& eos) {
  Primitive s = isentrope(a, p, eos);
  const double ratio = 1.0 / enthalpy_ratio(a, s, eos);
  const double Wa = lorentz_factor(a);
  const double uy = Wa * a.v[1] * ratio, uz = Wa * a.v[2] * ratio;
  const double W = std::sqrt((1.0 + uy * uy + uz * uz) / (1.0 - vx * vx));
  s.v = {vx, uy / W, uz / W};
  return s;
}

double rarefaction_velocity(const Primitive& a, double pb, Side side, const Eos& eos) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 1>;
  const int sign = side == Side::Left ? -1 : 1;
  const double Wa = lorentz_factor(a);
  const double ut2_a = Wa * Wa * (a.v[1] * a.v[1] + a.v[2] * a.v[2]);

  auto rhs = [&](const State& y, State& dydt, double lnp) {
    const double p = std::exp(lnp);
    const Primitive s = isentrope(a, p, eos);
    const double vx = y[0];
    const double hr = enthalpy_ratio(a, s, eos);
    const double ut2 = ut2_a / (hr * hr);
    const double W2 = (1.0 + ut2) / (1.0 - vx * vx);
    const double vt2 = ut2 / W2;
    const double cs2 = sound_speed2(s, eos);
    const double xi = acoustic_speed(vx, vt2, cs2, sign);
    const double d = 1.0 - xi * vx;
    const double g = vt2 * (xi * xi - 1.0) / (d * d);
    dydt[0] = sign * p / ((s.rho + p) * W2 * std::sqrt(cs2) * std::sqrt(1.0 + g));
  };

  State y{a.v[0]};
  const double l0 = std::log(a.p), l1 = std::log(pb);
  auto stepper = ode::make_controlled(1e-14, 1e-12, ode::runge_kutta_dopri5<State>());
  ode::integrate_adaptive(stepper, rhs, y, l0, l1, (l1 - l0) / 16.0);
  if (!std::isfinite(y[0]) || std::abs(y[0]) >= 1.0) {
    std::ostringstream msg;
    msg << "rarefaction integration failed (p_behind = " << pb << ")";
    throw RiemannError(msg.str());
  }
  return y[0];
}

// Behind-shock thermodynamics on the Taub adiabat (velocity left at zero).
Primitive shock_thermo(const Primitive& a, double pb, const Eos& eos) {
  Primitive s;
  s.p = pb;
  if (eos.system == System::UltraRelativistic) {
    s.rho = pb / eos.cs2;
    return s;
  }
  const double g = eos.gamma;
  const double ha = specific_enthalpy(a);
  const double dp = a.p - pb;
  const double qa = 1.0 + (g - 1.0) * dp / (g * pb);
  const double qb = -(g - 1.0) * dp / (g * pb);
  const double qc = dp * ha / a.n - ha * ha;
  const double hb = (-qb + std::sqrt(qb * qb - 4.0 * qa * qc)) / (2.0 * qa);
  s.n = g * pb / ((g - 1.0) * (hb - 1.0));
  s.eps = pb / ((g - 1.0) * s.n);
  s.rho = s.n * (1.0 + s.eps);
  return s;
}

Primitive shock_state(const Primitive& a, double pb, Side side, const Eos& eos) {
  Primitive b = shock_thermo(a, pb, eos);
  const double wa = a.rho + a.p;
  const double wb = b.rho + b.p;
  const double jr = b.rho - a.rho, jp = pb - a.p;
  const double g2m1 = jr * jp / (wa * wb);
  const double g = std::sqrt(1.0 + g2m1);
  const double r = g * wa / (a.rho + pb);

  const double Wa = lorentz_factor(a);
  const double uax = Wa * a.v[0];
  const double uat2 = tangential_u2(a);
  const double ubt2 = r * r * uat2;
  const double B = 1.0 + uat2;
  const double G = g + r * uat2;
  const double q = g * jp / (a.rho + pb);
  const double disc = std::max(0.0, g2m1 * B - uat2 * q * q);
  const double sign = side == Side::Left ? -1.0 : 1.0;
  const double ubx = (G * uax + sign * Wa * std::sqrt(disc)) / B;
  const double uby = r * Wa * a.v[1], ubz = r * Wa * a.v[2];
  const double Wb = std::sqrt(1.0 + ubx * ubx + ubt2);
  b.v = {ubx / Wb, uby / Wb, ubz / Wb};
  return b;
}

} // namespace

Primitive state_behind(const Primitive& ahead, double p_behind, Side side, const Eos& eos) {
  if (!(p_behind > 0.0)) throw RiemannError("wave curve: p_behind must be positive");
  if (p_behind == ahead.p) return ahead;
  if (p_behind > ahead.p) return shock_state(ahead, p_behind, side, eos);
  const double vx = rarefaction_velocity(ahead, p_behind, side, eos);
  return fan_state(ahead, p_behind, vx, eos);
}

double wave_curve_velocity(const Primitive& ahead, double p_behind, Side side, const Eos& eos) {
  if (!(p_behind > 0.0)) throw RiemannError("wave curve: p_behind must be positive");
  if (p_behind == ahead.p) return ahead.v[0];
  if (p_behind > ahead.p) return shock_state(ahead, p_behind, side, eos).v[0];
  return rarefaction_velocity(ahead, p_behind, side, eos);
}

double shock_speed(const Primitive& ahead, const Primitive& behind, Side side, const Eos& eos) {
  const StateVector ua = primitive_to_conserved(ahead, eos);
  const StateVector ub = primitive_to_conserved(behind, eos);
  const double de = ub[kEnergy] - ua[kEnergy];
  if (std::abs(de) > 1e-9 * std::max(ua[kEnergy], ub[kEnergy])) return (ub[kMomX] - ua[kMomX]) / de;
  const Eigenvalues la = eigenvalues(ahead, eos, Axis::X);
  const Eigenvalues lb = eigenvalues(behind, eos, Axis::X);
  return side == Side::Left ? 0.5 * (la.lambda_minus + lb.lambda_minus) : 0.5 * (la.lambda_plus + lb.lambda_plus);
}

ExactSolution solve_star_state(const Primitive& left, const Primitive& right, const Eos& eos) {
  ExactSolution sol;
  sol.eos = eos;
  sol.left = left;
  sol.right = right;

  auto f = [&](double p) {
    return wave_curve_velocity(left, p, Side::Left, eos) - wave_curve_velocity(right, p, Side::Right, eos);
  };

  const double pmax = std::max(left.p, right.p);
  const double lo_limit = 1e-14, hi_limit = 1e6 * pmax;
  double lo = 0.5 * (left.p + right.p), hi = lo;
  double flo = f(lo);
  double p_star = lo;
  if (flo != 0.0) {
    double fhi = flo;
    if (flo < 0.0) {
      while (flo < 0.0) {
        hi = lo;
        fhi = flo;
        lo = std::max(lo_limit, 0.5 * lo);
        flo = f(lo);
        if (lo == lo_limit && flo < 0.0) throw RiemannError("no star-pressure bracket (vacuum generated)");
      }
    } else {
      while (fhi > 0.0) {
        lo = hi;
        flo = fhi;
        hi = std::min(hi_limit, 2.0 * hi);
        fhi = f(hi);
        if (hi == hi_limit && fhi > 0.0) throw RiemannError("no star-pressure bracket below 1e6 max(p_L, p_R)");
      }
    }
    if (flo == 0.0) {
      p_star = lo;
    } else if (fhi == 0.0) {
      p_star = hi;
    } else {
      std::uintmax_t iters = 200;
      auto tol = [](double a, double b) { return std::abs(b - a) <= 2e-13 * std::min(std::abs(a), std::abs(b)); };
      const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
      p_star = 0.5 * (r.first + r.second);
    }
  }

  sol.p_star = p_star;
  sol.left_star = state_behind(left, p_star, Side::Left, eos);
  sol.right_star = state_behind(right, p_star, Side::Right, eos);
  sol.vx_star = 0.5 * (sol.left_star.v[0] + sol.right_star.v[0]);
  sol.contact = sol.vx_star;

  sol.left_wave = p_star > left.p * (1.0 + kStrengthTol) ? WaveKind::Shock : WaveKind::Rarefaction;
  sol.right_wave = p_star > right.p * (1.0 + kStrengthTol) ? WaveKind::Shock : WaveKind::Rarefaction;

  if (sol.left_wave == WaveKind::Shock) {
    sol.left_head = sol.left_tail = shock_speed(left, sol.left_star, Side::Left, eos);
  } else {
    sol.left_head = eigenvalues(left, eos, Axis::X).lambda_minus;
    sol.left_tail = eigenvalues(sol.left_star, eos, Axis::X).lambda_minus;
  }
  if (sol.right_wave == WaveKind::Shock) {
    sol.right_head = sol.right_tail = shock_speed(right, sol.right_star, Side::Right, eos);
  } else {
    sol.right_head = eigenvalues(right, eos, Axis::X).lambda_plus;
    sol.right_tail = eigenvalues(sol.right_star, eos, Axis::X).lambda_plus;
  }

  const bool ls = sol.left_wave == WaveKind::Shock, rs = sol.right_wave == WaveKind::Shock;
  sol.pattern = ls ? (rs ? WavePattern::SS : WavePattern::SR) : (rs ? WavePattern::RS : WavePattern::RR);
  return sol;
}

WavePattern classify_pattern(const Primitive& left, const Primitive& right, const Eos& eos) {
  return solve_star_state(left, right, eos).pattern;
}

namespace {

Primitive sample_fan(const Primitive& ahead, const Primitive& star, Side side, double xi, const Eos& eos) {
  const int sign = side == Side::Left ? -1 : 1;
  auto state_at = [&](double lnp) {
    const double p = std::exp(lnp);
    return fan_state(ahead, p, rarefaction_velocity(ahead, p, side, eos), eos);
  };
  auto g = [&](double lnp) {
    const Primitive s = state_at(lnp);
    const double vt2 = s.v[1] * s.v[1] + s.v[2] * s.v[2];
    return acoustic_speed(s.v[0], vt2, sound_speed2(s, eos), sign) - xi;
  };
  double a = std::log(star.p), b = std::log(ahead.p);
  double ga = g(a), gb = g(b);
  if (ga == 0.0) return state_at(a);
  if (gb == 0.0) return ahead;
  if (ga * gb > 0.0) return std::abs(ga) < std::abs(gb) ? star : ahead;
  std::uintmax_t iters = 200;
  auto tol = [](double x, double y) { return std::abs(y - x) <= 1e-13; };
  const auto r = boost::math::tools::toms748_solve(g, a, b, ga, gb, tol, iters);
  return state_at(0.5 * (r.first + r.second));
}

} // namespace

Primitive sample(const ExactSolution& sol, double xi) {
  if (xi < sol.contact) {
    if (xi < sol.left_head) return sol.left;
    if (xi >= sol.left_tail) return sol.left_star;
    return sample_fan(sol.left, sol.left_star, Side::Left, xi, sol.eos);
  }
  if (xi >= sol.right_head) return sol.right;
  if (xi < sol.right_tail) return sol.right_star;
  return sample_fan(sol.right, sol.right_star, Side::Right, xi, sol.eos);
}

} // namespace relhydro
