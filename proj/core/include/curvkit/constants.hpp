#pragma once

#include <string>

namespace curvkit {

/// Sharp constant in the cubic Weyl contraction bound
///   2 W.W.W + (1/2) W.W'.W' <= C(n) |W|^3.
double weyl_cubic_constant(int n);

/// The candidate coefficients whose minimum selects the operative branch in
/// the integral pinching theorems, together with the selected argmins.
struct ConstantsTable {
  int n = 4;
  double c1 = 0.0;      // (1/4) sqrt((n-2)/(2(n-1)))
  double c2 = 0.0;      // (n+1)(n-2) / (8 (n-1)^2 C(n))
  double c3 = 0.0;      // 1 / (n C(n))
  double c_harm = 0.0;  // ((n+2)/(2n)) sqrt((n-2)/(2(n-1)))
  std::string argmin_bachflat; // min of {c1, c2, c3}
  std::string argmin_harmonic; // min of {c_harm, c2, c3}
};

ConstantsTable constants_table(int n);

/// f(theta) = (theta^2 - theta + 1) / (theta - 1)^2. Throws on theta == 1.
double theta_coefficient(double theta);

/// Numeric minimization of theta_coefficient over [-10,10] \ {1}.
struct ThetaMinimum {
  double theta_star = 0.0;
  double value = 0.0;
};
ThetaMinimum theta_minimize();

} // namespace curvkit
