#include "doctest.h"
#include "oracles.hpp"

#include "relhydro/flux.hpp"

using namespace relhydro;

namespace {

const Eos kUltra = Eos::ultra_relativistic(1.0 / 3.0);
const Eos kGas = Eos::perfect_gas(4.0 / 3.0);

double rel_diff(const StateVector& a, const StateVector& b, int n) {
  double err = 0.0, scale = 0.0;
  for (int c = 0; c < n; ++c) {
    err = std::max(err, std::abs(a[c] - b[c]));
    scale = std::max(scale, std::abs(b[c]));
  }
  return err / scale;
}

StateVector sum(const CharacteristicDecomposition& d) {
  StateVector s{};
  for (int c = 0; c < kMaxVars; ++c) s[c] = d.degenerate[c] + d.minus[c] + d.plus[c];
  return s;
}

} // namespace

TEST_SUITE("flux") {

TEST_CASE("eigenvalue examples") {
  auto ev = eigenvalues(make_ultra(1.0, {0, 0, 0}, kUltra), kUltra, Axis::X);
  CHECK(ev.lambda0 == 0.0);
  CHECK(ev.lambda_minus == doctest::Approx(-0.5773503).epsilon(1e-7));
  CHECK(ev.lambda_plus == doctest::Approx(0.5773503).epsilon(1e-7));

  ev = eigenvalues(make_ultra(0.5, {0.2, 0.2, 0}, kUltra), kUltra, Axis::X);
  CHECK(ev.lambda0 == doctest::Approx(0.2));
  CHECK(std::abs(ev.lambda_minus + 0.41661) < 1e-4);
  CHECK(std::abs(ev.lambda_plus - 0.69057) < 1e-4);

  ev = eigenvalues(make_ultra(0.5, {0.5, 0, 0}, kUltra), kUltra, Axis::X);
  const double cs = std::sqrt(1.0 / 3.0);
  CHECK(ev.lambda_plus == doctest::Approx((0.5 + cs) / (1.0 + 0.5 * cs)).epsilon(1e-14));
  CHECK(std::abs(ev.lambda_plus - 0.836014) < 1e-6);
}

TEST_CASE("system I projections at rest vanish in the degenerate field") {
  const auto d = characteristic_projection_ultra(make_ultra(0.7, {0, 0, 0}, kUltra), kUltra, Axis::Y);
  for (double c : d.degenerate) CHECK(c == 0.0);
  const auto u = primitive_to_conserved(make_ultra(0.7, {0, 0, 0}, kUltra), kUltra);
  CHECK(rel_diff(sum(d), u, 4) < 1e-14);
}

TEST_CASE("completeness on problem (a) left state") {
  const Primitive p = make_ultra(0.5, {0.2, 0.2, 0}, kUltra);
  const auto u = primitive_to_conserved(p, kUltra);
  for (Axis d : {Axis::X, Axis::Y, Axis::Z})
    CHECK(rel_diff(sum(characteristic_projection_ultra(p, kUltra, d)), u, 4) < 1e-10);
}

TEST_CASE("completeness on random states") {
  std::mt19937_64 rng(5);
  for (const Eos& eos : {kUltra, kGas}) {
    for (int i = 0; i < 2000; ++i) {
      const Primitive p = oracle::random_primitive(rng, eos);
      const auto u = primitive_to_conserved(p, eos);
      for (Axis d : {Axis::X, Axis::Y, Axis::Z})
        CHECK(rel_diff(sum(characteristic_projection(p, u, eos, d)), u, eos.nvar()) < 1e-9);
    }
  }
}

TEST_CASE("eigen-structure agrees with finite-difference Jacobian") {
  std::mt19937_64 rng(17);
  for (const Eos& eos : {kUltra, kGas}) {
    for (int i = 0; i < 300; ++i) {
      const Primitive p = oracle::random_primitive(rng, eos, 1e-2, 1e2, 0.9);
      const auto u = primitive_to_conserved(p, eos);
      for (Axis d : {Axis::X, Axis::Y, Axis::Z}) {
        const auto J = oracle::flux_jacobian(u, eos, d);
        const auto spec = oracle::real_eigenvalues(J);
        const auto dec = characteristic_projection(p, u, eos, d);
        for (double l : {dec.lambda.lambda0, dec.lambda.lambda_minus, dec.lambda.lambda_plus})
          CHECK(oracle::eigen_distance(spec, l) < 1e-6 * std::max(1.0, std::abs(l)));
        CHECK(oracle::eigvec_residual(J, dec.minus, dec.lambda.lambda_minus) < 1e-6);
        CHECK(oracle::eigvec_residual(J, dec.plus, dec.lambda.lambda_plus) < 1e-6);
        CHECK(oracle::eigvec_residual(J, dec.degenerate, dec.lambda.lambda0) < 1e-6);
      }
    }
  }
}

TEST_CASE("lambda ordering and light-speed bound") {
  std::mt19937_64 rng(3);
  for (const Eos& eos : {kUltra, kGas}) {
    for (int i = 0; i < 1000; ++i) {
      const Primitive p = oracle::random_primitive(rng, eos);
      const auto ev = eigenvalues(p, eos, Axis::X);
      CHECK(ev.lambda_minus < ev.lambda0);
      CHECK(ev.lambda0 <= ev.lambda_plus);
      CHECK(std::abs(ev.lambda_minus) < 1.0);
      CHECK(std::abs(ev.lambda_plus) < 1.0);
    }
  }
}

TEST_CASE("perfect gas eigensystem") {
  const Primitive rest = make_gas(1.0, 0.5, {0, 0, 0}, kGas);
  const auto es = eigensystem_gas(rest, kGas, Axis::X);
  const double cs = sound_speed(rest, kGas);
  CHECK(es.lambda[0] == doctest::Approx(-cs));
  CHECK(es.lambda[1] == 0.0);
  CHECK(es.lambda[4] == doctest::Approx(cs));

  const Primitive p = make_gas(1.3, 0.7, {0.3, -0.2, 0.25}, kGas);
  for (Axis d : {Axis::X, Axis::Y, Axis::Z}) {
    const auto e2 = eigensystem_gas(p, kGas, d);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        double s = 0.0;
        for (int k = 0; k < 5; ++k) s += e2.left[i][k] * e2.right[k][j];
        CHECK(std::abs(s - (i == j ? 1.0 : 0.0)) < 1e-12);
      }
  }
}

TEST_CASE("flux consistency") {
  std::mt19937_64 rng(23);
  for (const Eos& eos : {kUltra, kGas}) {
    for (int i = 0; i < 500; ++i) {
      const Primitive p = oracle::random_primitive(rng, eos);
      const auto u = primitive_to_conserved(p, eos);
      const FaceState s = make_face_state(u, eos);
      const auto f = physical_flux(s.prim, u, eos, Axis::Y);
      const auto fm = marquina_flux(s, s, eos, Axis::Y);
      const auto fh = hlle_flux(s, s, eos, Axis::Y);
      for (int c = 0; c < eos.nvar(); ++c) {
        CHECK(fm[c] == f[c]);
        CHECK(fh[c] == doctest::Approx(f[c]).epsilon(1e-13).scale(u[0]));
      }
    }
  }
}

TEST_CASE("HLLE upwind limits") {
  const Primitive l = make_ultra(1.0, {0.9, 0.1, 0}, kUltra);
  const Primitive r = make_ultra(0.4, {0.8, 0.0, 0}, kUltra);
  const auto ul = primitive_to_conserved(l, kUltra), ur = primitive_to_conserved(r, kUltra);
  auto f = hlle_flux(ul, ur, kUltra, Axis::X);
  const auto fl = physical_flux(l, kUltra, Axis::X);
  for (int c = 0; c < 4; ++c) CHECK(f[c] == doctest::Approx(fl[c]).epsilon(1e-14));

  Primitive ln = l, rn = r;
  ln.v[0] = -0.9;
  rn.v[0] = -0.8;
  const auto uln = primitive_to_conserved(ln, kUltra), urn = primitive_to_conserved(rn, kUltra);
  f = hlle_flux(uln, urn, kUltra, Axis::X);
  const auto fr = physical_flux(rn, kUltra, Axis::X);
  for (int c = 0; c < 4; ++c) CHECK(f[c] == doctest::Approx(fr[c]).epsilon(1e-14));
}

TEST_CASE("Marquina supersonic uniform flow") {
  const Primitive p = make_gas(1.0, 0.1, {0.95, 0.0, 0.1}, kGas);
  const auto u = primitive_to_conserved(p, kGas);
  CHECK(eigenvalues(p, kGas, Axis::X).lambda_minus > 0.0);
  const auto f = marquina_flux(u, u, kGas, Axis::X);
  const auto fp = physical_flux(recover_primitive(u, kGas), u, kGas, Axis::X);
  for (int c = 0; c < 5; ++c) CHECK(f[c] == fp[c]);
}

TEST_CASE("Marquina flux at the problem (a) interface") {
  // Colliding flow: energy flux lies between the one-sided fluxes, while the
  // normal momentum flux exceeds both because the interface is compressed.
  const Primitive l = make_ultra(0.5, {0.2, 0.2, 0}, kUltra);
  const Primitive r = make_ultra(0.5, {-0.2, -0.2, 0}, kUltra);
  const auto f = marquina_flux(primitive_to_conserved(l, kUltra), primitive_to_conserved(r, kUltra), kUltra, Axis::X);
  const auto fl = physical_flux(l, kUltra, Axis::X), fr = physical_flux(r, kUltra, Axis::X);
  for (int c = 0; c < 4; ++c) CHECK(std::isfinite(f[c]));
  CHECK(f[0] >= std::min(fl[0], fr[0]));
  CHECK(f[0] <= std::max(fl[0], fr[0]));
  CHECK(std::abs(f[0]) < 1e-14);
  CHECK(f[1] > std::max(fl[1], fr[1]));
  CHECK(f[3] == 0.0);
}

TEST_CASE("rotational covariance") {
  std::mt19937_64 rng(29);
  for (const Eos& eos : {kUltra, kGas}) {
    for (int i = 0; i < 200; ++i) {
      const Primitive a = oracle::random_primitive(rng, eos, 0.1, 10.0, 0.8);
      const Primitive b = oracle::random_primitive(rng, eos, 0.1, 10.0, 0.8);
      Primitive ay = a, by = b;
      std::swap(ay.v[0], ay.v[1]);
      std::swap(by.v[0], by.v[1]);
      for (FluxKind k : {FluxKind::Marquina, FluxKind::Hlle}) {
        const auto fx = numerical_flux(make_face_state(primitive_to_conserved(a, eos), eos),
                                       make_face_state(primitive_to_conserved(b, eos), eos), eos, Axis::X, k);
        auto fy = numerical_flux(make_face_state(primitive_to_conserved(ay, eos), eos),
                                 make_face_state(primitive_to_conserved(by, eos), eos), eos, Axis::Y, k);
        std::swap(fy[1], fy[2]);
        for (int c = 0; c < eos.nvar(); ++c) CHECK(fy[c] == doctest::Approx(fx[c]).epsilon(1e-10).scale(1.0));
      }
    }
  }
}

TEST_CASE("ill-conditioned decomposition falls back to HLLE") {
  Primitive p = make_ultra(1.0, {0.0, 0.0, 0.0}, kUltra);
  p.v = {1.0 - 1e-14, 0.0, 0.0};
  CHECK_THROWS_AS(characteristic_projection_ultra(p, kUltra, Axis::X), DecompositionError);
}

} // TEST_SUITE
