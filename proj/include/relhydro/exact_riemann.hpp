#pragma once

// Exact self-similar solution of the 1D (x-normal) Riemann problem with
// arbitrary tangential velocities, for both equations of state.
//
// Shocks use the relativistic jump conditions: the invariant relative Lorentz
// factor g between the two fluid states,
//   g^2 = (rho_b + p_a)(rho_a + p_b) / ((rho_a + p_a)(rho_b + p_b)),
// the Taub adiabat for the behind-state thermodynamics, and the tangential
// four-velocity scaling u_t,b = u_t,a * g (rho_a + p_a)/(rho_a + p_b).
// Rarefactions integrate
//   dv_x/dp = +-1 / ((rho + p) W^2 c_s sqrt(1 + v_t^2 (xi^2 - 1)/(1 - xi v_x)^2)),
// xi = lambda_-+, with h W v_t constant along the fan.

#include "relhydro/state.hpp"

#include <string>

namespace relhydro {

class RiemannError : public PhysicsError {
public:
  using PhysicsError::PhysicsError;
};

enum class Side { Left, Right };
enum class WaveKind { Shock, Rarefaction };

// (left-moving wave, right-moving wave)
enum class WavePattern { SS, RR, SR, RS };

std::string to_string(WavePattern p);
std::string to_string(WaveKind k);

// Normal velocity behind a left- or right-moving wave that connects `ahead`
// to pressure p_behind.
double wave_curve_velocity(const Primitive& ahead, double p_behind, Side side, const Eos& eos);

// Full state behind such a wave.
Primitive state_behind(const Primitive& ahead, double p_behind, Side side, const Eos& eos);

// Shock speed from [m_x]/[e]; falls back to the mean characteristic speed for
// vanishing jumps.
double shock_speed(const Primitive& ahead, const Primitive& behind, Side side, const Eos& eos);

struct ExactSolution {
  Eos eos;
  Primitive left, right;
  Primitive left_star, right_star;
  double p_star = 0.0;
  double vx_star = 0.0;
  WaveKind left_wave = WaveKind::Rarefaction;
  WaveKind right_wave = WaveKind::Rarefaction;
  WavePattern pattern = WavePattern::RR;
  double left_head = 0.0, left_tail = 0.0;
  double contact = 0.0;
  double right_tail = 0.0, right_head = 0.0;
};

ExactSolution solve_star_state(const Primitive& left, const Primitive& right, const Eos& eos);

WavePattern classify_pattern(const Primitive& left, const Primitive& right, const Eos& eos);

// State at xi = x/t.
Primitive sample(const ExactSolution& sol, double xi);

} // namespace relhydro
