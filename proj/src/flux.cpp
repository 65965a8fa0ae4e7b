#include "relhydro/flux.hpp"

#include <algorithm>

namespace relhydro {

namespace {

// A in lambda_pm = (v_x +- A)/(1 +- v_x A), written in a frame where the
// normal direction is x.
double acoustic_factor(double vx, double v2, double cs2) {
  const double W2 = 1.0 / (1.0 - v2);
  return 1.0 / std::sqrt(1.0 + W2 * (1.0 - vx * vx) * (1.0 - cs2) / cs2);
}

void swap_vector(StateVector& u, Axis dir) { swap_to_x(u, dir); }

} // namespace

Eigenvalues eigenvalues(const Primitive& prim, const Eos& eos, Axis dir) {
  const double vx = prim.v[axis_index(dir)];
  const double A = acoustic_factor(vx, prim.v2(), sound_speed2(prim, eos));
  Eigenvalues ev;
  ev.lambda0 = vx;
  ev.lambda_plus = (vx + A) / (1.0 + vx * A);
  ev.lambda_minus = (vx - A) / (1.0 - vx * A);
  return ev;
}

double max_signal_speed(const Primitive& prim, const Eos& eos, Axis dir) {
  const Eigenvalues ev = eigenvalues(prim, eos, dir);
  return std::max({std::abs(ev.lambda0), std::abs(ev.lambda_minus), std::abs(ev.lambda_plus)});
}

CharacteristicDecomposition characteristic_projection_ultra(const Primitive& prim_in, const Eos& eos,
                                                            Axis dir) {
  Primitive prim = prim_in;
  swap_to_x(prim, dir);
  const double k = eos.cs2;
  const double x = prim.v[0], y = prim.v[1], z = prim.v[2];
  const double vt2 = y * y + z * z;
  const double v2 = x * x + vt2;
  const double one_mx2 = 1.0 - x * x;
  if (!(one_mx2 > 1e-12) || !(v2 < 1.0))
    throw DecompositionError("ill-conditioned decomposition: |v_n| too close to 1");

  const double W2 = 1.0 / (1.0 - v2);
  const double A = acoustic_factor(x, v2, k);
  // With a = 1 + x A, b = 1 - x A: lambda_+ = (x + A)/a, lambda_- = (x - A)/b,
  // 1 - lambda_+ x = (1 - x^2)/a, 1 - lambda_- x = (1 - x^2)/b and
  // lambda_+ - lambda_- = 2 A (1 - x^2)/(a b).
  const double ap = 1.0 + x * A, bm = 1.0 - x * A;
  const double inv_ab = 1.0 / (ap * bm);
  const double lp = (x + A) * bm * inv_ab;
  const double lm = (x - A) * ap * inv_ab;
  if (!(A * one_mx2 * inv_ab > 5e-13)) throw DecompositionError("ill-conditioned decomposition: lambda_+ == lambda_-");

  auto omega = [&](double l) { return l * (1.0 + k * v2) - (1.0 + k) * x; };
  // P_+- = Delta_+- (1 - x^2)/(1 - lambda_+- x) r_+-; the two factors combine to
  //   +- rho W^2 a b [(1 - x^2) Omega(lambda_-+) - 2 c_s^2 v_t^2 (lambda_-+ - x)] / (2 A (1 - x^2)^2).
  const double C = prim.rho * W2 / (2.0 * A * one_mx2 * one_mx2 * inv_ab);
  const double cp = -C * (one_mx2 * omega(lm) - 2.0 * k * vt2 * (lm - x));
  const double cm = C * (one_mx2 * omega(lp) - 2.0 * k * vt2 * (lp - x));
  // Delta_+- itself, for the tangential entries.
  const double dp = cp / ap, dm = cm / bm;

  CharacteristicDecomposition out;
  out.lambda = {x, lm, lp};
  out.plus = {cp, cp * lp, dp * y, dp * z, 0.0};
  out.minus = {cm, cm * lm, dm * y, dm * z, 0.0};
  const double c0 = prim.p * W2 / one_mx2;
  const double shear = one_mx2 + vt2;
  out.degenerate = {c0 * 2.0 * vt2, c0 * 2.0 * x * vt2, c0 * y * shear, c0 * z * shear, 0.0};

  swap_vector(out.plus, dir);
  swap_vector(out.minus, dir);
  swap_vector(out.degenerate, dir);
  return out;
}

namespace {

// Inverts a 5x5 matrix by Gauss-Jordan elimination with partial pivoting.
bool invert5(std::array<std::array<double, 5>, 5> a, std::array<std::array<double, 5>, 5>& inv) {
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) inv[i][j] = (i == j) ? 1.0 : 0.0;
  double scale = 0.0;
  for (const auto& row : a)
    for (double v : row) scale = std::max(scale, std::abs(v));
  for (int col = 0; col < 5; ++col) {
    int piv = col;
    for (int r = col + 1; r < 5; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (!(std::abs(a[piv][col]) > 1e-14 * scale)) return false;
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const double d = 1.0 / a[col][col];
    for (int j = 0; j < 5; ++j) {
      a[col][j] *= d;
      inv[col][j] *= d;
    }
    for (int r = 0; r < 5; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      if (f == 0.0) continue;
      for (int j = 0; j < 5; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return true;
}

} // namespace

Eigensystem5 eigensystem_gas(const Primitive& prim_in, const Eos& eos, Axis dir) {
  Primitive prim = prim_in;
  swap_to_x(prim, dir);
  const double x = prim.v[0], y = prim.v[1], z = prim.v[2];
  const double v2 = prim.v2();
  if (!(1.0 - x * x > 1e-12) || !(v2 < 1.0))
    throw DecompositionError("ill-conditioned decomposition: |v_n| too close to 1");
  const double W = 1.0 / std::sqrt(1.0 - v2);
  const double W2 = W * W;
  const double h = specific_enthalpy(prim);
  const double cs2 = sound_speed2(prim, eos);
  const double A = acoustic_factor(x, v2, cs2);
  const double lp = (x + A) / (1.0 + x * A);
  const double lm = (x - A) / (1.0 - x * A);
  const double kt = eos.gamma - 1.0;
  const double K = kt / (kt - cs2);

  Eigensystem5 es;
  es.lambda = {lm, x, x, x, lp};
  using Col = std::array<double, 5>;
  auto acoustic = [&](double l) {
    const double Al = (1.0 - x * x) / (1.0 - x * l);
    return Col{h * W * Al, h * W * Al * l, h * W * y, h * W * z, 1.0};
  };
  const std::array<Col, 5> cols = {
      acoustic(lm),
      Col{1.0, x, y, z, K / (h * W)},
      Col{2.0 * h * W2 * y, 2.0 * h * W2 * x * y, h * (1.0 + 2.0 * W2 * y * y), 2.0 * h * W2 * y * z, W * y},
      Col{2.0 * h * W2 * z, 2.0 * h * W2 * x * z, 2.0 * h * W2 * y * z, h * (1.0 + 2.0 * W2 * z * z), W * z},
      acoustic(lp),
  };
  for (int f = 0; f < 5; ++f)
    for (int r = 0; r < 5; ++r) es.right[r][f] = cols[f][r];

  if (!invert5(es.right, es.left)) throw DecompositionError("ill-conditioned decomposition: singular eigenbasis");

  // Back to the caller's axis: swap rows of right, columns of left.
  const int d = axis_index(dir);
  if (d != 0) {
    std::swap(es.right[1], es.right[1 + d]);
    for (auto& row : es.left) std::swap(row[1], row[1 + d]);
  }
  return es;
}

CharacteristicDecomposition characteristic_projection_gas(const Primitive& prim, const StateVector& u,
                                                          const Eos& eos, Axis dir) {
  const Eigensystem5 es = eigensystem_gas(prim, eos, dir);
  std::array<double, 5> amp{};
  for (int f = 0; f < 5; ++f)
    for (int c = 0; c < 5; ++c) amp[f] += es.left[f][c] * u[c];

  CharacteristicDecomposition out;
  out.lambda = {es.lambda[1], es.lambda[0], es.lambda[4]};
  for (int r = 0; r < 5; ++r) {
    out.minus[r] = amp[0] * es.right[r][0];
    out.degenerate[r] = amp[1] * es.right[r][1] + amp[2] * es.right[r][2] + amp[3] * es.right[r][3];
    out.plus[r] = amp[4] * es.right[r][4];
  }
  return out;
}

CharacteristicDecomposition characteristic_projection(const Primitive& prim, const StateVector& u,
                                                      const Eos& eos, Axis dir) {
  if (eos.system == System::UltraRelativistic) return characteristic_projection_ultra(prim, eos, dir);
  return characteristic_projection_gas(prim, u, eos, dir);
}

FaceState make_face_state(const StateVector& u, const Eos& eos) {
  return FaceState{u, recover_primitive(u, eos)};
}

StateVector marquina_flux(const FaceState& left, const FaceState& right, const Eos& eos, Axis dir) {
  const auto dl = characteristic_projection(left.prim, left.u, eos, dir);
  const auto dr = characteristic_projection(right.prim, right.u, eos, dir);
  const StateVector fl = physical_flux(left.prim, left.u, eos, dir);
  const StateVector fr = physical_flux(right.prim, right.u, eos, dir);

  const double a0 = std::max(std::abs(dl.lambda.lambda0), std::abs(dr.lambda.lambda0));
  const double am = std::max(std::abs(dl.lambda.lambda_minus), std::abs(dr.lambda.lambda_minus));
  const double ap = std::max(std::abs(dl.lambda.lambda_plus), std::abs(dr.lambda.lambda_plus));

  StateVector f{};
  const int nv = eos.nvar();
  for (int c = 0; c < nv; ++c) {
    const double diss = a0 * (dr.degenerate[c] - dl.degenerate[c]) + am * (dr.minus[c] - dl.minus[c]) +
                        ap * (dr.plus[c] - dl.plus[c]);
    f[c] = 0.5 * (fl[c] + fr[c] - diss);
  }
  return f;
}

StateVector marquina_flux(const StateVector& ul, const StateVector& ur, const Eos& eos, Axis dir) {
  return marquina_flux(make_face_state(ul, eos), make_face_state(ur, eos), eos, dir);
}

StateVector hlle_flux(const FaceState& left, const FaceState& right, const Eos& eos, Axis dir) {
  const Eigenvalues el = eigenvalues(left.prim, eos, dir);
  const Eigenvalues er = eigenvalues(right.prim, eos, dir);
  const double bm = std::min({0.0, el.lambda_minus, er.lambda_minus});
  const double bp = std::max({0.0, el.lambda_plus, er.lambda_plus});
  const StateVector fl = physical_flux(left.prim, left.u, eos, dir);
  const StateVector fr = physical_flux(right.prim, right.u, eos, dir);
  StateVector f{};
  const double inv = 1.0 / (bp - bm);
  for (int c = 0; c < eos.nvar(); ++c)
    f[c] = (bp * fl[c] - bm * fr[c] + bp * bm * (right.u[c] - left.u[c])) * inv;
  return f;
}

StateVector hlle_flux(const StateVector& ul, const StateVector& ur, const Eos& eos, Axis dir) {
  return hlle_flux(make_face_state(ul, eos), make_face_state(ur, eos), eos, dir);
}

StateVector numerical_flux(const FaceState& left, const FaceState& right, const Eos& eos, Axis dir,
                           FluxKind kind) {
  if (kind == FluxKind::Marquina) {
    try {
      return marquina_flux(left, right, eos, dir);
    } catch (const DecompositionError&) {
      // fall through to HLLE
    }
  }
  return hlle_flux(left, right, eos, dir);
}

} // namespace relhydro
