#include "relhydro/state.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

namespace relhydro {

Eos Eos::ultra_relativistic(double cs2) {
  if (!(cs2 > 0.0 && cs2 < 1.0))
    throw std::invalid_argument("ultrarelativistic EOS requires 0 < cs2 < 1");
  Eos eos;
  eos.system = System::UltraRelativistic;
  eos.cs2 = cs2;
  return eos;
}

Eos Eos::perfect_gas(double gamma) {
  if (!(gamma > 1.0 && gamma <= 2.0))
    throw std::invalid_argument("perfect gas EOS requires 1 < gamma <= 2");
  Eos eos;
  eos.system = System::PerfectGas;
  eos.gamma = gamma;
  return eos;
}

double lorentz_factor(const Vec3& v) {
  const double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  if (!(v2 < 1.0)) {
    std::ostringstream msg;
    msg << "superluminal velocity |v|^2 = " << v2;
    throw SuperluminalError(msg.str());
  }
  return 1.0 / std::sqrt(1.0 - v2);
}

double lorentz_factor(const Primitive& prim) { return lorentz_factor(prim.v); }

Primitive make_ultra(double rho, const Vec3& v, const Eos& eos) {
  if (eos.system != System::UltraRelativistic)
    throw std::invalid_argument("make_ultra: EOS is not ultrarelativistic");
  if (!(rho > 0.0)) throw std::invalid_argument("make_ultra: rho must be positive");
  lorentz_factor(v);
  Primitive prim;
  prim.rho = rho;
  prim.p = eos.cs2 * rho;
  prim.v = v;
  return prim;
}

Primitive make_gas(double n, double eps, const Vec3& v, const Eos& eos) {
  if (eos.system != System::PerfectGas)
    throw std::invalid_argument("make_gas: EOS is not a perfect gas");
  if (!(n > 0.0) || !(eps >= 0.0))
    throw std::invalid_argument("make_gas: need n > 0 and eps >= 0");
  lorentz_factor(v);
  Primitive prim;
  prim.n = n;
  prim.eps = eps;
  prim.rho = n * (1.0 + eps);
  prim.p = (eos.gamma - 1.0) * n * eps;
  prim.v = v;
  return prim;
}

double specific_enthalpy(const Primitive& prim) { return 1.0 + prim.eps + prim.p / prim.n; }

double sound_speed2(const Primitive& prim, const Eos& eos) {
  if (eos.system == System::UltraRelativistic) return eos.cs2;
  return eos.gamma * prim.p / (prim.rho + prim.p);
}

double sound_speed(const Primitive& prim, const Eos& eos) {
  return std::sqrt(sound_speed2(prim, eos));
}

StateVector primitive_to_conserved(const Primitive& prim, const Eos& eos) {
  const double W = lorentz_factor(prim.v);
  const double wW2 = (prim.rho + prim.p) * W * W;
  StateVector u{};
  u[kEnergy] = wW2 - prim.p;
  u[1] = wW2 * prim.v[0];
  u[2] = wW2 * prim.v[1];
  u[3] = wW2 * prim.v[2];
  if (eos.system == System::PerfectGas) u[kMass] = prim.n * W;
  return u;
}

StateVector physical_flux(const Primitive& prim, const StateVector& u, const Eos& eos, Axis dir) {
  const int d = axis_index(dir);
  const double vd = prim.v[d];
  StateVector f{};
  f[kEnergy] = u[1 + d];
  f[1] = u[1] * vd;
  f[2] = u[2] * vd;
  f[3] = u[3] * vd;
  f[1 + d] += prim.p;
  if (eos.system == System::PerfectGas) f[kMass] = u[kMass] * vd;
  return f;
}

StateVector physical_flux(const Primitive& prim, const Eos& eos, Axis dir) {
  return physical_flux(prim, primitive_to_conserved(prim, eos), eos, dir);
}

namespace {

std::string recovery_message(const char* what, const StateVector& u, const Eos& eos) {
  std::ostringstream msg;
  msg << "primitive recovery failed (" << what << ") for U = " << describe(u, eos);
  return msg.str();
}

Primitive recover_ultra(const StateVector& u, const Eos& eos, RecoveryInfo* info) {
  const double e = u[kEnergy];
  const double m2 = u[1] * u[1] + u[2] * u[2] + u[3] * u[3];
  const double m = std::sqrt(m2);
  if (!(e > 0.0) || !(m < e)) throw RecoveryError(recovery_message("no positive-pressure root", u, eos));

  // p^2 + (1-k) e p - k (e^2 - m^2) = 0, positive root written without cancellation.
  const double k = eos.cs2;
  const double em = (e - m) * (e + m);
  const double disc = (1.0 - k) * (1.0 - k) * e * e + 4.0 * k * em;
  double p = 2.0 * k * em / ((1.0 - k) * e + std::sqrt(disc));

  Primitive prim;
  const double inv = 1.0 / (e + p);
  prim.v = {u[1] * inv, u[2] * inv, u[3] * inv};
  if (!(prim.v2() < 1.0)) throw RecoveryError(recovery_message("superluminal velocity", u, eos));
  if (p < kFloor) {
    p = kFloor;
    if (info) info->floored = true;
  }
  prim.p = p;
  prim.rho = p / k;
  return prim;
}

Primitive recover_gas(const StateVector& u, const Eos& eos, const std::optional<Primitive>& guess,
                      RecoveryInfo* info) {
  const double e = u[kEnergy];
  const double D = u[kMass];
  const double s2 = u[1] * u[1] + u[2] * u[2] + u[3] * u[3];
  const double s = std::sqrt(s2);
  if (!(e > 0.0) || !(D > 0.0) || !(s < e))
    throw RecoveryError(recovery_message("invalid conserved state", u, eos));
  // f(0+) > 0 is necessary for a positive-pressure root.
  if (!(std::sqrt((e - s) * (e + s)) > D))
    throw RecoveryError(recovery_message("no positive-pressure root", u, eos));

  const double gm1 = eos.gamma - 1.0;
  auto residual = [&](double p, double& slope) {
    const double ep = e + p;
    const double vv = s2 / (ep * ep);
    const double winv2 = 1.0 - vv;
    const double winv = std::sqrt(winv2);
    slope = gm1 * vv * (1.0 - D / (winv * ep)) - 1.0;
    return gm1 * (ep * winv2 - D * winv - p) - p;
  };

  // The root lies in (0, (gamma-1) e]; f is strictly decreasing.
  double lo = 0.0;
  double hi = gm1 * e * (1.0 + 1e-12) + 1e-300;
  double p = guess ? guess->p : std::max(1e-10, gm1 * (e - s - D));
  if (!(p > lo && p < hi)) p = 0.5 * hi;

  bool converged = false;
  int it = 0;
  for (; it < 50; ++it) {
    double slope = 0.0;
    const double f = residual(p, slope);
    if (f == 0.0) {
      converged = true;
      break;
    }
    if (f > 0.0)
      lo = p;
    else
      hi = p;
    double next = p - f / slope;
    if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
    const double change = std::abs(next - p);
    p = next;
    if (change < 1e-13 * p) {
      converged = true;
      break;
    }
  }
  if (info) info->iterations = it + 1;
  if (!converged) throw RecoveryError(recovery_message("Newton iteration did not converge", u, eos));

  Primitive prim;
  const double inv = 1.0 / (e + p);
  prim.v = {u[1] * inv, u[2] * inv, u[3] * inv};
  const double vv = prim.v2();
  if (!(vv < 1.0)) throw RecoveryError(recovery_message("superluminal velocity", u, eos));
  const double W = 1.0 / std::sqrt(1.0 - vv);
  double n = D / W;
  if (n < kFloor) {
    n = kFloor;
    if (info) info->floored = true;
  }
  if (p < kFloor) {
    p = kFloor;
    if (info) info->floored = true;
  }
  prim.n = n;
  prim.p = p;
  prim.eps = p / (gm1 * n);
  prim.rho = n + p / gm1;
  return prim;
}

} // namespace

Primitive recover_primitive(const StateVector& u, const Eos& eos, const std::optional<Primitive>& guess,
                            RecoveryInfo* info) {
  if (info) *info = RecoveryInfo{};
  if (eos.system == System::UltraRelativistic) return recover_ultra(u, eos, info);
  return recover_gas(u, eos, guess, info);
}

void swap_to_x(Primitive& prim, Axis dir) {
  const int d = axis_index(dir);
  if (d != 0) std::swap(prim.v[0], prim.v[d]);
}

void swap_to_x(StateVector& u, Axis dir) {
  const int d = axis_index(dir);
  if (d != 0) std::swap(u[1], u[1 + d]);
}

std::string describe(const StateVector& u, const Eos& eos) {
  std::ostringstream out;
  out.precision(17);
  out << "(";
  for (int i = 0; i < eos.nvar(); ++i) out << (i ? ", " : "") << u[i];
  out << ")";
  return out.str();
}

} // namespace relhydro
