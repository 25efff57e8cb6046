#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace curvkit {

/// Dense lower-triangular Cholesky factor of a small SPD matrix.
template <int N> struct Cholesky {
  std::array<double, N * N> L{};

  double &at(int i, int j) { return L[i * N + j]; }
  double at(int i, int j) const { return L[i * N + j]; }

  double sqrt_det() const {
    double p = 1.0;
    for (int i = 0; i < N; ++i) p *= at(i, i);
    return p;
  }

  // Solves L y = b in place.
  void forward_solve(std::array<double, N> &b) const {
    for (int i = 0; i < N; ++i) {
      double s = b[i];
      for (int j = 0; j < i; ++j) s -= at(i, j) * b[j];
      b[i] = s / at(i, i);
    }
  }
};

/// Cholesky factorization of a symmetric matrix given by full row-major
/// storage. Returns false if the matrix is not positive definite.
template <int N>
bool cholesky_full(const std::array<double, N * N> &a, Cholesky<N> &out) {
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[i * N + j];
      for (int k = 0; k < j; ++k) s -= out.at(i, k) * out.at(j, k);
      if (i == j) {
        if (!(s > 0.0)) return false;
        out.at(i, i) = std::sqrt(s);
      } else {
        out.at(i, j) = s / out.at(j, j);
      }
    }
    for (int j = i + 1; j < N; ++j) out.at(i, j) = 0.0;
  }
  return true;
}

/// Inverse of L (lower triangular), row-major.
template <int N>
std::array<double, N * N> lower_inverse(const Cholesky<N> &c) {
  std::array<double, N * N> inv{};
  for (int col = 0; col < N; ++col) {
    std::array<double, N> e{};
    e[col] = 1.0;
    c.forward_solve(e);
    for (int row = 0; row < N; ++row) inv[row * N + col] = e[row];
  }
  return inv;
}

/// Smallest eigenvalue of a symmetric matrix (full row-major storage) by
/// cyclic Jacobi rotations. Small N only.
template <int N> double symmetric_eigen_min(std::array<double, N * N> a) {
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < N; ++p)
      for (int q = p + 1; q < N; ++q) off += a[p * N + q] * a[p * N + q];
    if (off < 1e-30) break;
    for (int p = 0; p < N; ++p) {
      for (int q = p + 1; q < N; ++q) {
        const double apq = a[p * N + q];
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a[q * N + q] - a[p * N + p]) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < N; ++k) {
          const double akp = a[k * N + p];
          const double akq = a[k * N + q];
          a[k * N + p] = c * akp - s * akq;
          a[k * N + q] = s * akp + c * akq;
        }
        for (int k = 0; k < N; ++k) {
          const double apk = a[p * N + k];
          const double aqk = a[q * N + k];
          a[p * N + k] = c * apk - s * aqk;
          a[q * N + k] = s * apk + c * aqk;
        }
      }
    }
  }
  double m = a[0];
  for (int i = 1; i < N; ++i) m = std::min(m, a[i * N + i]);
  return m;
}

/// Order-independent pairwise summation over a fixed buffer ordering.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 32) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

/// splitmix64: used to derive independent per-sample RNG seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

} // namespace curvkit
