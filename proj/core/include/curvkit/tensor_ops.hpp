#pragma once

#include <cmath>
#include <random>
#include <stdexcept>

#include "curvkit/types.hpp"

namespace curvkit {

/// Kulkarni-Nomizu product of two symmetric 2-tensors:
///   (A o^ B)_ijkl = A_ik B_jl - A_il B_jk + A_jl B_ik - A_jk B_il.
template <int N> Alg4<N> kulkarni_nomizu(const Sym2<N> &a, const Sym2<N> &b) {
  Alg4<N> t;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l)
          t.at(i, j, k, l) = a(i, k) * b(j, l) - a(i, l) * b(j, k) +
                             a(j, l) * b(i, k) - a(j, k) * b(i, l);
  t.set_flags(kAntisym12 | kAntisym34 | kPairSym);
  return t;
}

/// Full index contraction sum_ijkl A_ijkl B_ijkl (flat indices).
template <int N> double inner_flat(const Alg4<N> &a, const Alg4<N> &b) {
  double s = 0.0;
  const auto &x = a.raw();
  const auto &y = b.raw();
  for (int k = 0; k < Alg4<N>::kSize; ++k) s += x[k] * y[k];
  return s;
}

template <int N> double norm2_flat(const Alg4<N> &a) { return inner_flat(a, a); }

/// Removes the g-trace: A - (tr_g A / n) g. The result is g-traceless to
/// machine precision.
template <int N> Sym2<N> tracefree_project(const Sym2<N> &a, const Sym2<N> &g,
                                           const Sym2<N> &ginv) {
  const double t = trace(a, ginv) / N;
  Sym2<N> r = a;
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) r.at(i, j) -= t * g(i, j);
  return r;
}

/// Convenience overload for an orthonormal frame (g = identity).
template <int N> Sym2<N> tracefree_project(const Sym2<N> &a) {
  const double t = trace_flat(a) / N;
  Sym2<N> r = a;
  for (int i = 0; i < N; ++i) r.at(i, i) -= t;
  return r;
}

/// Extracts the Weyl part of a Riemann-type tensor using the traceless-Ricci
/// form of the decomposition:
///   W = Riem - (R^o o^ g)/(n-2) - R (g o^ g)/(2n(n-1)).
/// Checks that the supplied Ricci/scalar data are the traces of Riem.
template <int N>
Alg4<N> weyl_from_riemann(const Alg4<N> &riem, const Sym2<N> &ric, double r_scalar,
                          const Sym2<N> &g, double trace_tol = 1e-8) {
  if (!riem.has(kAntisym12) || !riem.has(kAntisym34) || !riem.has(kPairSym))
    throw std::invalid_argument("weyl_from_riemann: input lacks Riemann symmetry flags");

  Cholesky<N> chol;
  if (!cholesky_full<N>(g.full(), chol))
    throw std::invalid_argument("weyl_from_riemann: metric not positive definite");
  const auto linv = lower_inverse<N>(chol);
  Sym2<N> ginv;
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) {
      double s = 0.0;
      for (int k = 0; k < N; ++k) s += linv[k * N + i] * linv[k * N + j];
      ginv.at(i, j) = s;
    }

  // Trace consistency: g^{ik} Riem_ijkl must reproduce ric.
  const double scale = std::max(1.0, riem.max_abs());
  Sym2<N> tr;
  for (int j = 0; j < N; ++j)
    for (int l = j; l < N; ++l) {
      double s = 0.0;
      for (int i = 0; i < N; ++i)
        for (int k = 0; k < N; ++k) s += ginv(i, k) * riem(i, j, k, l);
      tr.at(j, l) = s;
    }
  double dev = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) dev = std::max(dev, std::abs(tr(i, j) - ric(i, j)));
  dev = std::max(dev, std::abs(trace(ric, ginv) - r_scalar));
  if (dev > trace_tol * scale)
    throw std::invalid_argument("weyl_from_riemann: Ricci/scalar inconsistent with Riemann traces");

  Sym2<N> ric0 = ric;
  const double t = r_scalar / N;
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) ric0.at(i, j) -= t * g(i, j);

  Alg4<N> w = riem;
  const Alg4<N> kn_rg = kulkarni_nomizu(ric0, g);
  const Alg4<N> kn_gg = kulkarni_nomizu(g, g);
  const double c1 = 1.0 / (N - 2);
  const double c2 = r_scalar / (2.0 * N * (N - 1));
  for (int k = 0; k < Alg4<N>::kSize; ++k)
    w.raw()[k] -= c1 * kn_rg.raw()[k] + c2 * kn_gg.raw()[k];
  w.set_flags(riem.flags() | kTracefree);
  return w;
}

/// The cubic Weyl contraction 2 W_ijkl W_ipkq W_pjql + (1/2) W_ijkl W_klpq W_pqij
/// (flat indices; odd and degree 3 in W).
template <int N> double cubic_weyl_form(const Alg4<N> &w) {
  if (!w.has(kTracefree) || !w.has(kAntisym12))
    throw std::invalid_argument("cubic_weyl_form: input is not Weyl-type");

  double t1 = 0.0;
  // a_{jlpq} = sum_{ik} W_ijkl W_ipkq, then contract with W_pjql.
  for (int j = 0; j < N; ++j)
    for (int l = 0; l < N; ++l)
      for (int p = 0; p < N; ++p)
        for (int q = 0; q < N; ++q) {
          double a = 0.0;
          for (int i = 0; i < N; ++i)
            for (int k = 0; k < N; ++k) a += w(i, j, k, l) * w(i, p, k, q);
          t1 += a * w(p, j, q, l);
        }

  double t2 = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) {
          double a = 0.0;
          for (int p = 0; p < N; ++p)
            for (int q = 0; q < N; ++q) a += w(k, l, p, q) * w(p, q, i, j);
          t2 += w(i, j, k, l) * a;
        }

  return 2.0 * t1 + 0.5 * t2;
}

/// Draws a dense standard-normal 4-tensor and projects it onto the Weyl
/// symmetry class (Riemann symmetries + all traces removed).
template <int N, class Rng> Alg4<N> sample_weyl_type(Rng &rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::array<double, Alg4<N>::kSize> raw;
  for (auto &x : raw) x = normal(rng);
  return Alg4<N>::project(raw, kWeylFlags);
}

/// Random traceless symmetric 2-tensor with standard-normal entries.
template <int N, class Rng> Sym2<N> sample_tracefree_sym2(Rng &rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Sym2<N> s;
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) s.at(i, j) = normal(rng);
  return tracefree_project(s);
}

} // namespace curvkit
