#include "relhydro/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace relhydro {

double minmod(std::initializer_list<double> values) {
  bool all_pos = true, all_neg = true;
  double lo = *values.begin(), hi = *values.begin();
  for (double v : values) {
    all_pos = all_pos && v >= 0.0;
    all_neg = all_neg && v <= 0.0;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (all_pos) return lo;
  if (all_neg) return hi;
  return 0.0;
}


namespace {

struct Local {
  double slope;     // S~
  double curvature; // S^
};

// Three-point derivatives at the centre zone from centre gaps dp = x_{j+1} - x_j, dm = x_j - x_{j-1}.
Local derivatives(double um, double u0, double up, double dm, double dp) {
  const double den = dp * dm * (dp + dm);
  Local d;
  d.slope = (dm * dm * up + (dp * dp - dm * dm) * u0 - dp * dp * um) / den;
  d.curvature = 2.0 * (dm * up - (dp + dm) * u0 + dp * um) / den;
  return d;
}

double select(double lin, const std::array<double, 3>& quad) {
  const double d0 = quad[0] - lin, d1 = quad[1] - lin, d2 = quad[2] - lin;
  const bool same = (d0 > 0.0 && d1 > 0.0 && d2 > 0.0) || (d0 < 0.0 && d1 < 0.0 && d2 < 0.0);
  if (!same) return lin;
  int best = 0;
  if (std::abs(d1) < std::abs(quad[best] - lin)) best = 1;
  if (std::abs(d2) < std::abs(quad[best] - lin)) best = 2;
  return quad[best];
}

} // namespace

FacePair ceno_faces(const std::array<double, 5>& u, const std::array<double, 5>& w) {
  // Centre positions relative to x_i (index 2).
  std::array<double, 5> x{};
  x[2] = 0.0;
  x[3] = 0.5 * (w[2] + w[3]);
  x[4] = x[3] + 0.5 * (w[3] + w[4]);
  x[1] = -0.5 * (w[2] + w[1]);
  x[0] = x[1] - 0.5 * (w[1] + w[0]);

  std::array<Local, 3> loc{};
  for (int k = 0; k < 3; ++k) {
    const int j = k + 1;
    loc[k] = derivatives(u[j - 1], u[j], u[j + 1], x[j] - x[j - 1], x[j + 1] - x[j]);
  }
  const double s = minmod((u[3] - u[2]) / x[3], loc[1].slope, (u[2] - u[1]) / (-x[1]));

  const double xp = 0.5 * w[2], xm = -0.5 * w[2];
  auto quad_at = [&](double xf) {
    std::array<double, 3> q{};
    for (int k = 0; k < 3; ++k) {
      const int j = k + 1;
      const double dx = xf - x[j];
      q[k] = u[j] - loc[k].curvature * w[j] * w[j] / 24.0 + loc[k].slope * dx + 0.5 * loc[k].curvature * dx * dx;
    }
    return q;
  };

  FacePair out;
  out.left_of_plus_face = select(u[2] + s * xp, quad_at(xp));
  out.right_of_minus_face = select(u[2] + s * xm, quad_at(xm));
  return out;
}

namespace {

// Unit spacing; the result is scale-free on a uniform grid.
inline FacePair ceno_uniform(const double* u) {
  std::array<double, 3> slope{}, curv{};
  for (int k = 0; k < 3; ++k) {
    const int j = k + 1;
    slope[k] = 0.5 * (u[j + 1] - u[j - 1]);
    curv[k] = u[j + 1] - 2.0 * u[j] + u[j - 1];
  }
  const double s = minmod(u[3] - u[2], slope[1], u[2] - u[1]);

  auto quad_at = [&](double xf) {
    std::array<double, 3> q{};
    for (int k = 0; k < 3; ++k) {
      const double dx = xf - (k - 1);
      q[k] = u[k + 1] - curv[k] * (1.0 / 24.0) + slope[k] * dx + 0.5 * curv[k] * dx * dx;
    }
    return q;
  };

  FacePair out;
  out.left_of_plus_face = select(u[2] + 0.5 * s, quad_at(0.5));
  out.right_of_minus_face = select(u[2] - 0.5 * s, quad_at(-0.5));
  return out;
}

} // namespace

FacePair ceno_faces(const std::array<double, 5>& u) { return ceno_uniform(u.data()); }

void ceno_line(const double* u, int begin, int end, double* plus_face, double* minus_face) {
  if (end <= begin) return;
  // Same arithmetic as ceno_uniform, with the per-cell quadratics shared
  // between the three stencils that use them.
  const int m = end - begin + 2;
  thread_local std::vector<double> buf;
  buf.resize(std::size_t(4) * m);
  double* q_p = buf.data();       // own quadratic at +1/2
  double* q_m = q_p + m;          // own quadratic at -1/2
  double* q_pp = q_m + m;         // at +3/2 (face i+1/2 seen from cell i-1)
  double* q_mm = q_pp + m;        // at -3/2 (face i-1/2 seen from cell i+1)
  for (int c = 0; c < m; ++c) {
    const int j = begin - 1 + c;
    const double slope = 0.5 * (u[j + 1] - u[j - 1]);
    const double curv = u[j + 1] - 2.0 * u[j] + u[j - 1];
    const double base = u[j] - curv * (1.0 / 24.0);
    auto q = [&](double dx) { return base + slope * dx + 0.5 * curv * dx * dx; };
    q_p[c] = q(0.5);
    q_m[c] = q(-0.5);
    q_pp[c] = q(1.5);
    q_mm[c] = q(-1.5);
  }
  for (int i = begin; i < end; ++i) {
    const int c = i - begin + 1;
    const double s = minmod(u[i + 1] - u[i], 0.5 * (u[i + 1] - u[i - 1]), u[i] - u[i - 1]);
    plus_face[i] = select(u[i] + 0.5 * s, {q_pp[c - 1], q_p[c], q_m[c + 1]});
    minus_face[i] = select(u[i] - 0.5 * s, {q_p[c - 1], q_m[c], q_mm[c + 1]});
  }
}

FacePair limited_linear_faces(const std::array<double, 5>& u) {
  const double s = minmod(u[3] - u[2], 0.5 * (u[3] - u[1]), u[2] - u[1]);
  return {u[2] + 0.5 * s, u[2] - 0.5 * s};
}

} // namespace relhydro
