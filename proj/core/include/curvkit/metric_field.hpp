#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvkit/grid.hpp"
#include "curvkit/linalg.hpp"
#include "curvkit/types.hpp"

namespace curvkit {

/// Orthonormal-frame data at one point: g = L L^T. Lower tensor indices pick
/// up one factor of L^{-1} each; in the resulting components the metric is the
/// identity, so flat contractions compute g-invariant quantities.
template <int N> struct Frame {
  std::array<double, N * N> linv;

  Vec<N> apply(const Vec<N> &v) const {
    Vec<N> r{};
    for (int a = 0; a < N; ++a)
      for (int i = 0; i <= a; ++i) r[a] += linv[a * N + i] * v[i];
    return r;
  }

  Sym2<N> apply(const Sym2<N> &t) const {
    Sym2<N> r;
    for (int a = 0; a < N; ++a)
      for (int b = a; b < N; ++b) {
        double s = 0.0;
        for (int i = 0; i <= a; ++i)
          for (int j = 0; j <= b; ++j)
            s += linv[a * N + i] * linv[b * N + j] * t(i, j);
        r.at(a, b) = s;
      }
    return r;
  }

  Tensor3<N> apply(const Tensor3<N> &t) const {
    Tensor3<N> tmp, r;
    // one slot at a time; L^{-1} is lower triangular
    for (int a = 0; a < N; ++a)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) {
          double s = 0.0;
          for (int i = 0; i <= a; ++i) s += linv[a * N + i] * t(i, j, k);
          tmp.at(a, j, k) = s;
        }
    for (int i = 0; i < N; ++i)
      for (int b = 0; b < N; ++b)
        for (int k = 0; k < N; ++k) {
          double s = 0.0;
          for (int j = 0; j <= b; ++j) s += linv[b * N + j] * tmp(i, j, k);
          r.at(i, b, k) = s;
        }
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int c = 0; c < N; ++c) {
          double s = 0.0;
          for (int k = 0; k <= c; ++k) s += linv[c * N + k] * r(i, j, k);
          tmp.at(i, j, c) = s;
        }
    return tmp;
  }

  Alg4<N> apply(const Alg4<N> &t) const {
    Alg4<N> u = t, v;
    for (int slot = 0; slot < 4; ++slot) {
      // transform the first slot, then rotate slots so each gets a turn
      for (int a = 0; a < N; ++a)
        for (int j = 0; j < N; ++j)
          for (int k = 0; k < N; ++k)
            for (int l = 0; l < N; ++l) {
              double s = 0.0;
              for (int i = 0; i <= a; ++i) s += linv[a * N + i] * u(i, j, k, l);
              v.at(j, k, l, a) = s; // cyclic rotation
            }
      std::swap(u, v);
    }
    u.set_flags(t.flags());
    return u;
  }
};

/// A symmetric positive-definite metric sampled on a chart grid.
template <int N> class MetricField {
public:
  MetricField(Grid<N> grid, std::function<Sym2<N>(const Vec<N> &)> sampler,
              double spd_floor = 1e-10)
      : grid_(std::move(grid)) {
    g_.resize(grid_.size());
    for (Index p = 0; p < grid_.size(); ++p) g_[p] = sampler(grid_.coords(p));
    validate_spd(spd_floor);
  }

  const Grid<N> &grid() const { return grid_; }
  const Sym2<N> &g(Index p) const { return g_[p]; }

  Cholesky<N> chol(Index p) const {
    Cholesky<N> c;
    if (!cholesky_full<N>(g_[p].full(), c))
      throw std::domain_error("metric not positive definite at grid point " +
                              std::to_string(p));
    return c;
  }

  Sym2<N> ginv(Index p) const {
    const auto c = chol(p);
    const auto linv = lower_inverse<N>(c);
    Sym2<N> inv;
    for (int i = 0; i < N; ++i)
      for (int j = i; j < N; ++j) {
        double s = 0.0;
        for (int k = 0; k < N; ++k) s += linv[k * N + i] * linv[k * N + j];
        inv.at(i, j) = s;
      }
    return inv;
  }

  double sqrt_det(Index p) const { return chol(p).sqrt_det(); }

  Frame<N> frame(Index p) const { return Frame<N>{lower_inverse<N>(chol(p))}; }

private:
  void validate_spd(double floor) {
    for (Index p = 0; p < grid_.size(); ++p) {
      if (grid_.excised(p)) continue;
      const double ev = symmetric_eigen_min<N>(g_[p].full());
      if (!(ev > floor))
        throw std::domain_error(
            "metric fails SPD check (min eigenvalue " + std::to_string(ev) +
            ") at grid point " + std::to_string(p));
    }
  }

  Grid<N> grid_;
  std::vector<Sym2<N>> g_;
};

} // namespace curvkit
