#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "curvkit/linalg.hpp"
#include "curvkit/metric_field.hpp"

namespace curvkit {

/// Quadrature of one scalar integrand against the metric volume element.
struct IntegralResult {
  double value = 0.0;
  double excised_measure = 0.0;   // metric measure of clamped cells
  double extension_mass = 0.0;    // |integrand| mass contributed by clamping
  double total_measure = 0.0;
  operator double() const { return value; }
};

/// Midpoint-rule integral sum_p f~(p) sqrt(det g)(p) prod_a h_a over the full
/// cell set. Outside `window` (stencil margins, excised caps) the integrand is
/// extended by clamping indices to the window, so the geometric measure stays
/// exact while garbage values near chart degeneracies never enter. The
/// clamped contribution is reported as a separate bias term. Accumulation is
/// pairwise over the fixed grid ordering.
template <int N, class F>
IntegralResult integrate(const MetricField<N> &m, F &&f,
                         const Region<N> &window) {
  const Grid<N> &grid = m.grid();
  const double cell = grid.cell_volume();
  const Index total = grid.size();

  std::vector<double> buf(static_cast<std::size_t>(total));
  IntegralResult res;
  bool any_clamped = false;
  for (int a = 0; a < N; ++a)
    any_clamped |= (window.lo[a] > 0) ||
                   (window.hi[a] < grid.axis(a).count - 1);

  for (Index p = 0; p < total; ++p) {
    const double w = m.sqrt_det(p) * cell;
    if (!any_clamped) {
      buf[p] = w * f(p);
      continue;
    }
    const auto mi = grid.unflatten(p);
    if (window.contains(mi)) {
      buf[p] = w * f(p);
    } else {
      const Index src = grid.flatten(window.clamp(mi));
      const double v = f(src);
      buf[p] = w * v;
      res.excised_measure += w;
      res.extension_mass += std::abs(v) * w;
    }
  }
  res.value = pairwise_sum(buf);
  for (Index p = 0; p < total; ++p) buf[p] = m.sqrt_det(p) * cell;
  res.total_measure = pairwise_sum(buf);
  return res;
}

/// Maximum of |f| over the window.
template <int N, class F>
double max_abs_over(const Grid<N> &grid, F &&f, const Region<N> &window) {
  double mx = 0.0;
  for (Index p = 0; p < grid.size(); ++p) {
    if (!window.contains(grid.unflatten(p))) continue;
    mx = std::max(mx, std::abs(f(p)));
  }
  return mx;
}

/// Minimum of f over the window with the location of the minimum.
template <int N, class F>
std::pair<double, Index> min_over(const Grid<N> &grid, F &&f,
                                  const Region<N> &window) {
  double mn = std::numeric_limits<double>::infinity();
  Index arg = -1;
  for (Index p = 0; p < grid.size(); ++p) {
    if (!window.contains(grid.unflatten(p))) continue;
    const double v = f(p);
    if (v < mn) {
      mn = v;
      arg = p;
    }
  }
  return {mn, arg};
}

} // namespace curvkit
