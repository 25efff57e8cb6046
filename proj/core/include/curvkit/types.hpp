#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "curvkit/linalg.hpp"

namespace curvkit {

/// Validated runtime dimension. All templated entry points are instantiated
/// for kMinDim..kMaxDim and selected through dispatch_dim().
inline constexpr int kMinDim = 4;
inline constexpr int kMaxDim = 8;

class Dim {
public:
  explicit Dim(int n) : n_(n) {
    if (n < kMinDim || n > kMaxDim)
      throw std::invalid_argument("dimension must be in [4,8], got " +
                                  std::to_string(n));
  }
  int value() const { return n_; }

private:
  int n_;
};

// The cast keeps Vec a non-deduced context so N always deduces from the
// tensor arguments instead of fighting std::array's size_t parameter.
template <int N>
using Vec = std::array<double, static_cast<std::size_t>(N)>;

/// Symmetric 2-tensor, canonical upper-triangle storage so that
/// a(i,j) == a(j,i) holds exactly.
template <int N> class Sym2 {
public:
  static constexpr int kPacked = N * (N + 1) / 2;

  static constexpr int pack(int i, int j) {
    if (i > j) std::swap(i, j);
    return i * N - i * (i + 1) / 2 + j;
  }

  double operator()(int i, int j) const { return v_[pack(i, j)]; }
  double &at(int i, int j) { return v_[pack(i, j)]; }

  static Sym2 zero() { return Sym2{}; }
  static Sym2 identity() {
    Sym2 s;
    for (int i = 0; i < N; ++i) s.at(i, i) = 1.0;
    return s;
  }
  static Sym2 diagonal(const Vec<N> &d) {
    Sym2 s;
    for (int i = 0; i < N; ++i) s.at(i, i) = d[i];
    return s;
  }

  Sym2 &operator+=(const Sym2 &o) {
    for (int k = 0; k < kPacked; ++k) v_[k] += o.v_[k];
    return *this;
  }
  Sym2 &operator-=(const Sym2 &o) {
    for (int k = 0; k < kPacked; ++k) v_[k] -= o.v_[k];
    return *this;
  }
  Sym2 &operator*=(double c) {
    for (int k = 0; k < kPacked; ++k) v_[k] *= c;
    return *this;
  }
  friend Sym2 operator+(Sym2 a, const Sym2 &b) { return a += b; }
  friend Sym2 operator-(Sym2 a, const Sym2 &b) { return a -= b; }
  friend Sym2 operator*(double c, Sym2 a) { return a *= c; }

  std::array<double, kPacked> &packed() { return v_; }
  const std::array<double, kPacked> &packed() const { return v_; }

  std::array<double, N * N> full() const {
    std::array<double, N * N> m{};
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) m[i * N + j] = (*this)(i, j);
    return m;
  }

  double max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }

private:
  std::array<double, kPacked> v_{};
};

/// Contractions of a symmetric 2-tensor pair with an explicit metric.
template <int N> double trace(const Sym2<N> &a, const Sym2<N> &ginv) {
  double t = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) t += ginv(i, j) * a(i, j);
  return t;
}

template <int N>
double inner(const Sym2<N> &a, const Sym2<N> &b, const Sym2<N> &ginv) {
  // a_ij b_kl g^ik g^jl
  double s = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      double aij_up = 0.0; // a^ij
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) aij_up += ginv(i, k) * ginv(j, l) * a(k, l);
      s += aij_up * b(i, j);
    }
  return s;
}

/// Flat (identity-metric) contractions, used once components are expressed in
/// an orthonormal frame.
template <int N> double inner_flat(const Sym2<N> &a, const Sym2<N> &b) {
  double s = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) s += a(i, j) * b(i, j);
  return s;
}
template <int N> double norm2_flat(const Sym2<N> &a) { return inner_flat(a, a); }

template <int N> double trace_flat(const Sym2<N> &a) {
  double t = 0.0;
  for (int i = 0; i < N; ++i) t += a(i, i);
  return t;
}

/// a_ik a_kj as a symmetric matrix (flat indices).
template <int N> Sym2<N> square_flat(const Sym2<N> &a) {
  Sym2<N> r;
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) {
      double s = 0.0;
      for (int k = 0; k < N; ++k) s += a(i, k) * a(k, j);
      r.at(i, j) = s;
    }
  return r;
}

/// tr(a^3) with flat indices.
template <int N> double trace_cube_flat(const Sym2<N> &a) {
  double s = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) s += a(i, j) * a(j, k) * a(k, i);
  return s;
}

/// General 3-index tensor, no symmetry maintained.
template <int N> class Tensor3 {
public:
  static constexpr int kSize = N * N * N;

  double operator()(int i, int j, int k) const { return v_[(i * N + j) * N + k]; }
  double &at(int i, int j, int k) { return v_[(i * N + j) * N + k]; }

  Tensor3 &operator+=(const Tensor3 &o) {
    for (int k = 0; k < kSize; ++k) v_[k] += o.v_[k];
    return *this;
  }
  Tensor3 &operator-=(const Tensor3 &o) {
    for (int k = 0; k < kSize; ++k) v_[k] -= o.v_[k];
    return *this;
  }
  Tensor3 &operator*=(double c) {
    for (int k = 0; k < kSize; ++k) v_[k] *= c;
    return *this;
  }
  friend Tensor3 operator-(Tensor3 a, const Tensor3 &b) { return a -= b; }

  std::array<double, kSize> &raw() { return v_; }
  const std::array<double, kSize> &raw() const { return v_; }

  double max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }

private:
  std::array<double, kSize> v_{};
};

template <int N> double norm2_flat(const Tensor3<N> &t) {
  double s = 0.0;
  for (double x : t.raw()) s += x * x;
  return s;
}

/// Symmetry classes a 4-index curvature-type tensor may declare.
enum SymFlag : std::uint8_t {
  kAntisym12 = 1 << 0,
  kAntisym34 = 1 << 1,
  kPairSym = 1 << 2,
  kBianchi1 = 1 << 3,
  kTracefree = 1 << 4,
};

inline constexpr std::uint8_t kRiemannFlags = kAntisym12 | kAntisym34 | kPairSym | kBianchi1;
inline constexpr std::uint8_t kWeylFlags = kRiemannFlags | kTracefree;

/// 4-index tensor with declared symmetry flags. Construction via project()
/// enforces every declared flag by orthogonal projection and records how far
/// the input was from the symmetry class.
template <int N> class Alg4 {
public:
  static constexpr int kSize = N * N * N * N;

  double operator()(int i, int j, int k, int l) const {
    return v_[((i * N + j) * N + k) * N + l];
  }
  double &at(int i, int j, int k, int l) {
    return v_[((i * N + j) * N + k) * N + l];
  }

  std::uint8_t flags() const { return flags_; }
  bool has(SymFlag f) const { return (flags_ & f) != 0; }
  void set_flags(std::uint8_t f) { flags_ = f; }

  /// Frobenius distance between the raw input and its projection.
  double projection_residual() const { return proj_residual_; }

  std::array<double, kSize> &raw() { return v_; }
  const std::array<double, kSize> &raw() const { return v_; }

  Alg4 &operator+=(const Alg4 &o) {
    for (int k = 0; k < kSize; ++k) v_[k] += o.v_[k];
    flags_ &= o.flags_;
    return *this;
  }
  Alg4 &operator-=(const Alg4 &o) {
    for (int k = 0; k < kSize; ++k) v_[k] -= o.v_[k];
    flags_ &= o.flags_;
    return *this;
  }
  Alg4 &operator*=(double c) {
    for (int k = 0; k < kSize; ++k) v_[k] *= c;
    return *this;
  }
  friend Alg4 operator+(Alg4 a, const Alg4 &b) { return a += b; }
  friend Alg4 operator-(Alg4 a, const Alg4 &b) { return a -= b; }
  friend Alg4 operator*(double c, Alg4 a) { return a *= c; }

  double max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }

  /// Projects raw values onto the subspace cut out by `flags`, applied in the
  /// order antisym12, antisym34, pair, first Bianchi, trace removal. Each
  /// later projector preserves the earlier classes.
  static Alg4 project(const std::array<double, kSize> &raw, std::uint8_t flags);

  /// Measured violation of one flag on the current values (max component).
  double measure_violation(SymFlag f) const;

private:
  std::array<double, kSize> v_{};
  std::uint8_t flags_ = 0;
  double proj_residual_ = 0.0;
};

namespace detail {

template <int N> void project_antisym12(std::array<double, N * N * N * N> &v) {
  auto idx = [](int i, int j, int k, int l) {
    return ((i * N + j) * N + k) * N + l;
  };
  std::array<double, N * N * N * N> out;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l)
          out[idx(i, j, k, l)] = 0.5 * (v[idx(i, j, k, l)] - v[idx(j, i, k, l)]);
  v = out;
}

template <int N> void project_antisym34(std::array<double, N * N * N * N> &v) {
  auto idx = [](int i, int j, int k, int l) {
    return ((i * N + j) * N + k) * N + l;
  };
  std::array<double, N * N * N * N> out;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l)
          out[idx(i, j, k, l)] = 0.5 * (v[idx(i, j, k, l)] - v[idx(i, j, l, k)]);
  v = out;
}

template <int N> void project_pair(std::array<double, N * N * N * N> &v) {
  auto idx = [](int i, int j, int k, int l) {
    return ((i * N + j) * N + k) * N + l;
  };
  std::array<double, N * N * N * N> out;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l)
          out[idx(i, j, k, l)] = 0.5 * (v[idx(i, j, k, l)] + v[idx(k, l, i, j)]);
  v = out;
}

// For tensors already antisymmetric in both pairs and pair-symmetric, the
// cyclic average over the last three slots is the totally antisymmetric part;
// subtracting it lands in the first-Bianchi subspace.
template <int N> void project_bianchi1(std::array<double, N * N * N * N> &v) {
  auto idx = [](int i, int j, int k, int l) {
    return ((i * N + j) * N + k) * N + l;
  };
  std::array<double, N * N * N * N> out;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) {
          const double cyc = (v[idx(i, j, k, l)] + v[idx(i, k, l, j)] +
                              v[idx(i, l, j, k)]) /
                             3.0;
          out[idx(i, j, k, l)] = v[idx(i, j, k, l)] - cyc;
        }
  v = out;
}

} // namespace detail

/// (i,k)-trace with flat indices: ric(T)_jl = sum_i T_ijil.
template <int N> Sym2<N> ricci_trace_flat(const Alg4<N> &t) {
  Sym2<N> r;
  for (int j = 0; j < N; ++j)
    for (int l = j; l < N; ++l) {
      double s = 0.0;
      for (int i = 0; i < N; ++i) s += t(i, j, i, l);
      r.at(j, l) = s;
    }
  return r;
}

template <int N> double inner_flat(const Alg4<N> &a, const Alg4<N> &b);

template <int N>
Alg4<N> Alg4<N>::project(const std::array<double, kSize> &raw,
                         std::uint8_t flags) {
  Alg4<N> t;
  std::array<double, kSize> v = raw;
  if (flags & kAntisym12) detail::project_antisym12<N>(v);
  if (flags & kAntisym34) detail::project_antisym34<N>(v);
  if (flags & kPairSym) detail::project_pair<N>(v);
  if (flags & kBianchi1) detail::project_bianchi1<N>(v);
  if (flags & kTracefree) {
    // Ricci-decomposition subtraction (flat metric): removes every single
    // trace of a tensor that already carries the Riemann symmetries.
    Alg4<N> tmp;
    tmp.v_ = v;
    const Sym2<N> ric = ricci_trace_flat(tmp);
    const double r = trace_flat(ric);
    Sym2<N> ric0 = ric;
    for (int i = 0; i < N; ++i) ric0.at(i, i) -= r / N;
    const Sym2<N> id = Sym2<N>::identity();
    auto kn = [&](const Sym2<N> &a, const Sym2<N> &b, int i, int j, int k,
                  int l) {
      return a(i, k) * b(j, l) - a(i, l) * b(j, k) + a(j, l) * b(i, k) -
             a(j, k) * b(i, l);
    };
    const double c1 = 1.0 / (N - 2);
    const double c2 = r / (2.0 * N * (N - 1));
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k)
          for (int l = 0; l < N; ++l)
            v[((i * N + j) * N + k) * N + l] -=
                c1 * kn(ric0, id, i, j, k, l) + c2 * kn(id, id, i, j, k, l);
  }
  double d2 = 0.0;
  for (int k = 0; k < kSize; ++k) {
    const double d = v[k] - raw[k];
    d2 += d * d;
  }
  t.v_ = v;
  t.flags_ = flags;
  t.proj_residual_ = std::sqrt(d2);
  return t;
}

template <int N> double Alg4<N>::measure_violation(SymFlag f) const {
  const Alg4<N> &t = *this;
  double m = 0.0;
  switch (f) {
  case kAntisym12:
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k)
          for (int l = 0; l < N; ++l)
            m = std::max(m, std::abs(t(i, j, k, l) + t(j, i, k, l)));
    break;
  case kAntisym34:
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k)
          for (int l = 0; l < N; ++l)
            m = std::max(m, std::abs(t(i, j, k, l) + t(i, j, l, k)));
    break;
  case kPairSym:
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k)
          for (int l = 0; l < N; ++l)
            m = std::max(m, std::abs(t(i, j, k, l) - t(k, l, i, j)));
    break;
  case kBianchi1:
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k)
          for (int l = 0; l < N; ++l)
            m = std::max(m, std::abs(t(i, j, k, l) + t(i, k, l, j) +
                                     t(i, l, j, k)));
    break;
  case kTracefree: {
    for (int j = 0; j < N; ++j)
      for (int l = 0; l < N; ++l) {
        double s = 0.0;
        for (int i = 0; i < N; ++i) s += t(i, j, i, l);
        m = std::max(m, std::abs(s));
      }
    break;
  }
  }
  return m;
}

} // namespace curvkit
