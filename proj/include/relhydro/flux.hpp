#pragma once

// Characteristic decompositions of the flux Jacobian dF^i/dU and the numerical
// interface fluxes built on them.

#include "relhydro/state.hpp"

namespace relhydro {

struct Eigenvalues {
  double lambda0 = 0.0;     // v^i, degenerate
  double lambda_minus = 0.0;
  double lambda_plus = 0.0;
};

Eigenvalues eigenvalues(const Primitive& prim, const Eos& eos, Axis dir);

// Largest |lambda| over all characteristic fields.
double max_signal_speed(const Primitive& prim, const Eos& eos, Axis dir);

// Projections P_p = (l_p . U) r_p of the conserved vector onto the
// characteristic fields. The degenerate lambda0 fields are summed into one
// vector (`degenerate`), so that degenerate + minus + plus = U.
struct CharacteristicDecomposition {
  Eigenvalues lambda;
  StateVector degenerate{};
  StateVector minus{};
  StateVector plus{};
};

class DecompositionError : public PhysicsError {
public:
  using PhysicsError::PhysicsError;
};

// Closed-form projections for the barotropic (ultrarelativistic) system.
// With the x-direction formulas (other directions by component swap):
//
//   lambda_pm = (v_x +- A) / (1 +- v_x A),
//   A^-2      = 1 + W^2 (1 - v_x^2)(1 - c_s^2) / c_s^2,
//   Omega_pm  = lambda_pm (1 + c_s^2 v^2) - (1 + c_s^2) v_x,
//   Delta_pm  = rho W^2 (1 - lambda_pm v_x) [(1 - v_x^2) Omega_mp - 2 c_s^2 v_t^2 (lambda_mp - v_x)]
//               / ((lambda_mp - lambda_pm)(1 - v_x^2)^2),
//   P_pm      = Delta_pm ((1 - v_x^2)/(1 - lambda_pm v_x), (1 - v_x^2) lambda_pm/(1 - lambda_pm v_x), v_y, v_z),
//   P_0       = p W^2/(1 - v_x^2) (2 v_t^2, 2 v_x v_t^2, v_y (1 - v_x^2 + v_t^2), v_z (1 - v_x^2 + v_t^2)),
//
// in component order (e, m_x, m_y, m_z). The normalisation of Delta_pm
// follows from requiring P_0 + P_- + P_+ = U.
CharacteristicDecomposition characteristic_projection_ultra(const Primitive& prim, const Eos& eos, Axis dir);

// Full eigensystem of the perfect-gas Jacobian, rows of `left` are the left
// eigenvectors and columns of `right` the right eigenvectors, with
// left * right = identity. Field order: lambda_-, lambda0 (x3), lambda_+.
struct Eigensystem5 {
  std::array<double, 5> lambda{};
  std::array<std::array<double, 5>, 5> right{}; // right[row][field]
  std::array<std::array<double, 5>, 5> left{};  // left[field][col]
};

Eigensystem5 eigensystem_gas(const Primitive& prim, const Eos& eos, Axis dir);

CharacteristicDecomposition characteristic_projection_gas(const Primitive& prim, const StateVector& u,
                                                          const Eos& eos, Axis dir);

// Dispatches on the EOS.
CharacteristicDecomposition characteristic_projection(const Primitive& prim, const StateVector& u,
                                                      const Eos& eos, Axis dir);

// An interface state: conserved vector plus its recovered primitive.
struct FaceState {
  StateVector u{};
  Primitive prim;
};

FaceState make_face_state(const StateVector& u, const Eos& eos);

enum class FluxKind { Marquina, Hlle };

// F = 1/2 { F(U_L) + F(U_R) - sum_p max_{L,R}|lambda_p| (P_{p,R} - P_{p,L}) }.
// Throws DecompositionError when a decomposition is ill-conditioned.
StateVector marquina_flux(const FaceState& left, const FaceState& right, const Eos& eos, Axis dir);
StateVector marquina_flux(const StateVector& ul, const StateVector& ur, const Eos& eos, Axis dir);

StateVector hlle_flux(const FaceState& left, const FaceState& right, const Eos& eos, Axis dir);
StateVector hlle_flux(const StateVector& ul, const StateVector& ur, const Eos& eos, Axis dir);

// Marquina with HLLE fallback (or HLLE directly).
StateVector numerical_flux(const FaceState& left, const FaceState& right, const Eos& eos, Axis dir,
                           FluxKind kind);

} // namespace relhydro
