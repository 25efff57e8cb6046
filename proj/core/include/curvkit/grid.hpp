#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvkit/types.hpp"

namespace curvkit {

using Index = std::int64_t;

/// One coordinate axis of a chart. Periodic axes sample at nodes a + m h over
/// [a,b); non-periodic axes sample at cell midpoints a + (m+1/2) h, which keeps
/// quadrature at the midpoint rule and never evaluates on the boundary itself.
struct Axis {
  double a = 0.0;
  double b = 1.0;
  int count = 0;
  bool periodic = false;
  int excise_lo = 0; // cells excluded from reductions/quadrature at each end
  int excise_hi = 0;

  double h() const { return (b - a) / count; }
  double coord(int m) const {
    return periodic ? a + m * h() : a + (m + 0.5) * h();
  }
};

/// First/second central difference weights. Radius is order/2.
struct Stencil {
  int radius;
  std::array<double, 5> d1; // first derivative, offsets -r..r, divide by h
  std::array<double, 5> d2; // same-axis second derivative, divide by h^2
};

inline const Stencil &stencil_for(int order) {
  static const Stencil s2{1,
                          {0.0, -0.5, 0.0, 0.5, 0.0},
                          {0.0, 1.0, -2.0, 1.0, 0.0}};
  static const Stencil s4{2,
                          {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12},
                          {-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12}};
  if (order == 2) return s2;
  if (order == 4) return s4;
  throw std::invalid_argument("stencil order must be 2 or 4");
}

/// Structured grid over an N-dimensional coordinate chart.
template <int N> class Grid {
public:
  explicit Grid(const std::array<Axis, N> &axes) : axes_(axes) {
    total_ = 1;
    for (int a = N - 1; a >= 0; --a) {
      if (axes_[a].count < 9)
        throw std::invalid_argument("resolution must be >= 9 per axis");
      strides_[a] = total_;
      total_ *= axes_[a].count;
    }
  }

  const Axis &axis(int a) const { return axes_[a]; }
  Index size() const { return total_; }

  std::array<double, N> spacing() const {
    std::array<double, N> h;
    for (int a = 0; a < N; ++a) h[a] = axes_[a].h();
    return h;
  }

  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < N; ++a) v *= axes_[a].h();
    return v;
  }

  std::array<int, N> unflatten(Index p) const {
    std::array<int, N> m;
    for (int a = 0; a < N; ++a) {
      m[a] = static_cast<int>(p / strides_[a]);
      p %= strides_[a];
    }
    return m;
  }

  Index flatten(const std::array<int, N> &m) const {
    Index p = 0;
    for (int a = 0; a < N; ++a) p += strides_[a] * m[a];
    return p;
  }

  Vec<N> coords(Index p) const {
    const auto m = unflatten(p);
    Vec<N> x;
    for (int a = 0; a < N; ++a) x[a] = axes_[a].coord(m[a]);
    return x;
  }

  /// Neighbor index shifted along one axis; wraps on periodic axes. On
  /// non-periodic axes the caller must stay in range (validity margins).
  Index shift(Index p, int a, int off) const {
    const int n = axes_[a].count;
    int m = static_cast<int>(p / strides_[a]) % n;
    int t = m + off;
    if (axes_[a].periodic) {
      t %= n;
      if (t < 0) t += n;
    }
    return p + static_cast<Index>(t - m) * strides_[a];
  }

  bool excised(Index p) const {
    const auto m = unflatten(p);
    for (int a = 0; a < N; ++a) {
      if (axes_[a].periodic) continue;
      if (m[a] < axes_[a].excise_lo || m[a] >= axes_[a].count - axes_[a].excise_hi)
        return true;
    }
    return false;
  }

  double excised_fraction() const {
    double f = 1.0;
    for (int a = 0; a < N; ++a) {
      if (axes_[a].periodic) continue;
      f *= double(axes_[a].count - axes_[a].excise_lo - axes_[a].excise_hi) /
           axes_[a].count;
    }
    return 1.0 - f;
  }

private:
  std::array<Axis, N> axes_;
  std::array<Index, N> strides_;
  Index total_ = 0;
};

/// Index window restricting reductions to points where a derived field is
/// valid (stencil margins on non-periodic axes) and not excised. Optional
/// coordinate caps allow comparing runs at different resolutions over a
/// common region.
template <int N> struct Region {
  std::array<int, N> lo{};  // inclusive
  std::array<int, N> hi{};  // inclusive
  bool empty = false;

  bool contains(const std::array<int, N> &m) const {
    if (empty) return false;
    for (int a = 0; a < N; ++a)
      if (m[a] < lo[a] || m[a] > hi[a]) return false;
    return true;
  }

  std::array<int, N> clamp(std::array<int, N> m) const {
    for (int a = 0; a < N; ++a) {
      if (m[a] < lo[a]) m[a] = lo[a];
      if (m[a] > hi[a]) m[a] = hi[a];
    }
    return m;
  }
};

/// Region of points at least `margin` cells from every non-periodic edge,
/// ignoring excision: where derivative stencils exist and fields are computed.
template <int N> Region<N> margin_region(const Grid<N> &g, int margin) {
  Region<N> r;
  for (int a = 0; a < N; ++a) {
    const Axis &ax = g.axis(a);
    if (ax.periodic) {
      r.lo[a] = 0;
      r.hi[a] = ax.count - 1;
      continue;
    }
    r.lo[a] = margin;
    r.hi[a] = ax.count - 1 - margin;
    if (r.lo[a] > r.hi[a]) r.empty = true;
  }
  return r;
}

/// Region of points at least `margin` cells from every non-periodic edge and
/// outside the excised slabs, optionally further restricted to coordinates in
/// [cap_lo, cap_hi] on non-periodic axes.
template <int N>
Region<N> interior_region(const Grid<N> &g, int margin,
                          const Vec<N> *cap_lo = nullptr,
                          const Vec<N> *cap_hi = nullptr) {
  Region<N> r;
  for (int a = 0; a < N; ++a) {
    const Axis &ax = g.axis(a);
    if (ax.periodic) {
      r.lo[a] = 0;
      r.hi[a] = ax.count - 1;
      continue;
    }
    int lo = std::max(margin, ax.excise_lo);
    int hi = ax.count - 1 - std::max(margin, ax.excise_hi);
    if (cap_lo)
      while (lo < ax.count && ax.coord(lo) < (*cap_lo)[a]) ++lo;
    if (cap_hi)
      while (hi >= 0 && ax.coord(hi) > (*cap_hi)[a]) --hi;
    r.lo[a] = lo;
    r.hi[a] = hi;
    if (lo > hi) r.empty = true;
  }
  return r;
}

} // namespace curvkit
