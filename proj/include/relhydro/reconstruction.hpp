#pragma once

// CENO (convex ENO) interface reconstruction of cell averages.
//
// For a zone i with neighbours i-2..i+2:
//   S~_j  centred first derivative, S^_j three-point second derivative,
//   S_i   = mm((u_{i+1}-u_i)/dx+, S~_i, (u_i-u_{i-1})/dx-),
//   L_i   = u_i + S_i (x - x_i),
//   Q^(k) = u_{i+k} - S^_{i+k} dx_{i+k}^2/24 + S~_{i+k}(x - x_{i+k}) + S^_{i+k}(x - x_{i+k})^2/2,  k = -1,0,1.
// At each face the candidate closest to L_i is taken when all d^(k) = Q^(k) - L_i
// agree in sign; otherwise L_i itself.

#include <algorithm>
#include <array>
#include <initializer_list>

namespace relhydro {

double minmod(std::initializer_list<double> values);
inline double minmod(double a, double b, double c) {
  if (a > 0.0 && b > 0.0 && c > 0.0) return std::min(a, std::min(b, c));
  if (a < 0.0 && b < 0.0 && c < 0.0) return std::max(a, std::max(b, c));
  return 0.0;
}

struct FacePair {
  double left_of_plus_face = 0.0;  // u^L_{i+1/2}
  double right_of_minus_face = 0.0; // u^R_{i-1/2}
};

// Uniform spacing: only the stencil values matter.
FacePair ceno_faces(const std::array<double, 5>& u);

// Uniform spacing over a contiguous line of zone averages: for i in
// [begin, end) writes u^L_{i+1/2} to plus_face[i] and u^R_{i-1/2} to
// minus_face[i]. Reads u[begin-2 .. end+1].
void ceno_line(const double* u, int begin, int end, double* plus_face, double* minus_face);

// Non-uniform spacing given as the widths of the five stencil zones.
FacePair ceno_faces(const std::array<double, 5>& u, const std::array<double, 5>& widths);

// Piecewise-linear (limited slope only) face values, used for diagnostics
// and tests of the fallback branch.
FacePair limited_linear_faces(const std::array<double, 5>& u);

} // namespace relhydro
