#pragma once

// Equations of state, primitive <-> conserved conversion, physical fluxes and
// primitive recovery for the two conservative systems:
//
//   UltraRelativistic (4 equations):  U = (e, m_x, m_y, m_z),   p = c_s^2 rho
//   PerfectGas        (5 equations):  U = (e, m_x, m_y, m_z, D), p = (gamma-1) n eps
//
// e is the total conserved energy (rest mass included), m the momentum density
// and D = n W the conserved rest mass.

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace relhydro {

enum class System { UltraRelativistic, PerfectGas };

inline constexpr int kMaxVars = 5;
using StateVector = std::array<double, kMaxVars>;
using Vec3 = std::array<double, 3>;

// Component indices into a StateVector.
inline constexpr int kEnergy = 0;
inline constexpr int kMomX = 1;
inline constexpr int kMass = 4;

enum class Axis { X = 0, Y = 1, Z = 2 };

inline constexpr int axis_index(Axis a) { return static_cast<int>(a); }

// Pressure / density floors applied after recovery.
inline constexpr double kFloor = 1e-14;

class PhysicsError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SuperluminalError : public PhysicsError {
public:
  using PhysicsError::PhysicsError;
};

class RecoveryError : public PhysicsError {
public:
  using PhysicsError::PhysicsError;
};

struct Eos {
  System system = System::UltraRelativistic;
  double cs2 = 1.0 / 3.0;   // UltraRelativistic
  double gamma = 4.0 / 3.0; // PerfectGas

  static Eos ultra_relativistic(double cs2);
  static Eos perfect_gas(double gamma);

  int nvar() const { return system == System::UltraRelativistic ? 4 : 5; }
  bool operator==(const Eos&) const = default;
};

// Physical variables. rho is the total energy density for both systems
// (rho = n (1 + eps) for the perfect gas); n and eps are only meaningful for
// the perfect gas. p is cached by the factories below.
struct Primitive {
  double rho = 0.0;
  double n = 0.0;
  double eps = 0.0;
  double p = 0.0;
  Vec3 v{0.0, 0.0, 0.0};

  double enthalpy_density() const { return rho + p; }
  double v2() const { return v[0] * v[0] + v[1] * v[1] + v[2] * v[2]; }
};

Primitive make_ultra(double rho, const Vec3& v, const Eos& eos);
Primitive make_gas(double n, double eps, const Vec3& v, const Eos& eos);

// Throws SuperluminalError when v.v >= 1.
double lorentz_factor(const Vec3& v);
double lorentz_factor(const Primitive& prim);

// Specific enthalpy h = 1 + eps + p/n (perfect gas only).
double specific_enthalpy(const Primitive& prim);

double sound_speed2(const Primitive& prim, const Eos& eos);
double sound_speed(const Primitive& prim, const Eos& eos);

StateVector primitive_to_conserved(const Primitive& prim, const Eos& eos);
StateVector physical_flux(const Primitive& prim, const Eos& eos, Axis dir);

// Flux from a primitive state whose conserved vector is already known.
StateVector physical_flux(const Primitive& prim, const StateVector& u, const Eos& eos, Axis dir);

struct RecoveryInfo {
  bool floored = false;
  int iterations = 0;
};

// Inverts primitive_to_conserved. The ultrarelativistic system is solved in
// closed form; the perfect gas by a bracketed Newton-Raphson iteration on p,
// seeded by `guess` when given. Throws RecoveryError for unphysical input.
Primitive recover_primitive(const StateVector& u, const Eos& eos,
                            const std::optional<Primitive>& guess = std::nullopt,
                            RecoveryInfo* info = nullptr);

// Exchanges the x components with those of `dir` (velocity and momentum).
// It is its own inverse.
void swap_to_x(Primitive& prim, Axis dir);
void swap_to_x(StateVector& u, Axis dir);

std::string describe(const StateVector& u, const Eos& eos);

} // namespace relhydro
