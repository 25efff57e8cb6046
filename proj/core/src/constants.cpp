#include "curvkit/constants.hpp"

#include <cmath>
#include <stdexcept>

namespace curvkit {

double weyl_cubic_constant(int n) {
  switch (n) {
  case 4:
    return std::sqrt(6.0) / 4.0;
  case 5:
    return 4.0 * std::sqrt(10.0) / 15.0;
  case 6:
    return std::sqrt(70.0) / (2.0 * std::sqrt(3.0));
  default:
    if (n >= 7) return 2.5;
    throw std::invalid_argument("weyl_cubic_constant: n must be >= 4");
  }
}

ConstantsTable constants_table(int n) {
  if (n < 4 || n > 8)
    throw std::invalid_argument("constants_table: n must be in [4,8]");
  ConstantsTable t;
  t.n = n;
  const double cn = weyl_cubic_constant(n);
  t.c1 = 0.25 * std::sqrt((n - 2.0) / (2.0 * (n - 1.0)));
  t.c2 = (n + 1.0) * (n - 2.0) / (8.0 * (n - 1.0) * (n - 1.0) * cn);
  t.c3 = 1.0 / (n * cn);
  t.c_harm = ((n + 2.0) / (2.0 * n)) * std::sqrt((n - 2.0) / (2.0 * (n - 1.0)));

  auto pick = [](double a, const char *na, double b, const char *nb, double c,
                 const char *nc) {
    if (a <= b && a <= c) return na;
    if (b <= a && b <= c) return nb;
    return nc;
  };
  t.argmin_bachflat = pick(t.c1, "c1", t.c2, "c2", t.c3, "c3");
  t.argmin_harmonic = pick(t.c_harm, "c_harm", t.c2, "c2", t.c3, "c3");
  return t;
}

double theta_coefficient(double theta) {
  if (theta == 1.0)
    throw std::domain_error("theta_coefficient: singular at theta == 1");
  const double d = theta - 1.0;
  return (theta * theta - theta + 1.0) / (d * d);
}

namespace {

// Golden-section search on a unimodal interval.
template <class F> double golden_min(F &&f, double a, double b, int iters) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

} // namespace

ThetaMinimum theta_minimize() {
  // f is unimodal on (-inf, 1) with interior minimum and decreasing on
  // (1, inf) toward 1, so the branch minimum sits at the right endpoint.
  const double left = golden_min(theta_coefficient, -10.0, 1.0 - 1e-9, 80);
  const double right = 10.0;
  ThetaMinimum m;
  if (theta_coefficient(left) <= theta_coefficient(right)) {
    m.theta_star = left;
  } else {
    m.theta_star = right;
  }
  m.value = theta_coefficient(m.theta_star);
  return m;
}

} // namespace curvkit
