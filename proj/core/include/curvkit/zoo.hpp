#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvkit/curvature.hpp"
#include "curvkit/metric_field.hpp"

namespace curvkit {

enum class GeometryKind {
  kRoundSphere,
  kFlatTorus,
  kProductSpheres,
  kPerturbedTorus,
};

/// Default angular size of the excised polar caps on sphere charts. Fixed in
/// coordinate units so refinement studies converge on a stable region; the
/// grid additionally enforces a 3-cell minimum.
inline constexpr double kDefaultPoleCap = 0.9;

/// Declarative description of a built-in geometry.
struct GeometrySpec {
  GeometryKind kind = GeometryKind::kFlatTorus;
  int dim = 4;
  int resolution = 16;

  double radius = 1.0;          // round sphere
  std::vector<double> periods;  // torus axis lengths; default 2 pi each

  int p = 2, q = 2;             // product spheres factor dimensions
  double r1 = 1.0, r2 = 1.0;

  double amplitude = 0.0;       // perturbed torus
  std::uint64_t seed = 1;
  int modes = 3;
  int max_wave = 1;

  double pole_cap = kDefaultPoleCap;
  double spd_floor = 1e-10;
};

/// Closed-form curvature evaluators plus structural facts about the geometry.
template <int N> struct AnalyticOracle {
  std::function<Sym2<N>(const Vec<N> &)> metric;
  std::function<Tensor3<N>(const Vec<N> &)> christoffel; // Gamma^k_ij
  std::function<Alg4<N>(const Vec<N> &)> riemann;        // fully lowered
  std::function<Sym2<N>(const Vec<N> &)> ricci;
  std::function<double(const Vec<N> &)> scalar;
  std::function<Alg4<N>(const Vec<N> &)> weyl;

  bool einstein = false;
  bool harmonic = false; // parallel Ricci by construction
  bool bach_flat = false;
  bool constant_scalar = false;

  double exact_volume = 0.0;
  bool has_exact_volume = false;
  double exact_yamabe = 0.0;
  bool has_exact_yamabe = false;
  double euler_characteristic = 0.0;
  bool has_euler = false;
};

template <int N> struct ZooGeometry {
  std::shared_ptr<MetricField<N>> metric;
  std::optional<AnalyticOracle<N>> oracle;
  GeometrySpec spec;
};

inline double unit_sphere_volume(int n) {
  // Vol(S^n) = 2 pi^((n+1)/2) / Gamma((n+1)/2)
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (n + 1)) /
         std::tgamma(0.5 * (n + 1));
}

namespace zoo_detail {

inline int cap_cells(double cap, double h) {
  const int cells = static_cast<int>(std::floor(cap / h + 0.5));
  return std::max(3, cells);
}

/// Polar-factor metric helper: diag entries of a round sphere factor of
/// dimension d and radius r in generalized polar angles x[off..off+d-1],
/// written into the diagonal slots [off..off+d-1].
template <int N>
void sphere_block(const Vec<N> &x, int off, int d, double r, Sym2<N> &g) {
  double warp = r * r;
  for (int k = 0; k < d; ++k) {
    g.at(off + k, off + k) = warp;
    if (k < d - 1) {
      const double s = std::sin(x[off + k]);
      warp *= s * s;
    }
  }
}

/// d_a g_kk for the same block: 2 cot(x_a) g_kk when a indexes an earlier
/// polar angle of the same factor, else 0.
template <int N>
void sphere_block_dg(const Vec<N> &x, int off, int d, double r,
                     std::array<Sym2<N>, static_cast<std::size_t>(N)> &dg) {
  Sym2<N> g;
  sphere_block(x, off, d, r, g);
  for (int a = 0; a < d - 1; ++a) {
    const double cot = std::cos(x[off + a]) / std::sin(x[off + a]);
    for (int k = a + 1; k < d; ++k)
      dg[off + a].at(off + k, off + k) = 2.0 * cot * g(off + k, off + k);
  }
}

/// Gamma^k_ij from a diagonal metric and its exact first derivatives.
template <int N>
Tensor3<N> christoffel_from_jet(const Sym2<N> &g,
                                const std::array<Sym2<N>, N> &dg) {
  Tensor3<N> gamma;
  for (int k = 0; k < N; ++k) {
    const double ginv_kk = 1.0 / g(k, k); // diagonal zoo metrics only
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        gamma.at(k, i, j) =
            0.5 * ginv_kk * (dg[i](k, j) + dg[j](k, i) - dg[k](i, j));
  }
  return gamma;
}

/// Constant-curvature block Riemann: K (b_ik b_jl - b_il b_jk) for a block
/// metric b (zero outside the block).
template <int N>
void add_constant_curvature(Alg4<N> &riem, const Sym2<N> &block, double k) {
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
          riem.at(i, j, a, b) +=
              k * (block(i, a) * block(j, b) - block(i, b) * block(j, a));
}

template <int N>
Alg4<N> weyl_from_closed_form(const Alg4<N> &riem, const Sym2<N> &ric,
                              double scalar, const Sym2<N> &g) {
  // g is diagonal for every oracle geometry; invert directly.
  Sym2<N> ginv;
  for (int i = 0; i < N; ++i) ginv.at(i, i) = 1.0 / g(i, i);
  Sym2<N> ric0 = ric;
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) ric0.at(i, j) -= (scalar / N) * g(i, j);
  Alg4<N> w = riem;
  const Alg4<N> kn_rg = kulkarni_nomizu(ric0, g);
  const Alg4<N> kn_gg = kulkarni_nomizu(g, g);
  const double c1 = 1.0 / (N - 2);
  const double c2 = scalar / (2.0 * N * (N - 1));
  for (int k = 0; k < Alg4<N>::kSize; ++k)
    w.raw()[k] -= c1 * kn_rg.raw()[k] + c2 * kn_gg.raw()[k];
  w.set_flags(kWeylFlags);
  return w;
}

struct TorusMode {
  std::array<double, 36> amp; // packed Sym2<8> worst case
  std::array<int, 8> wave;
  double phase;
};

} // namespace zoo_detail

template <int N>
Alg4<N> oracle_riemann_for_weyl(const Sym2<N> &b1, const Sym2<N> &b2, double k1,
                                double k2) {
  Alg4<N> riem;
  zoo_detail::add_constant_curvature(riem, b1, k1);
  zoo_detail::add_constant_curvature(riem, b2, k2);
  riem.set_flags(kRiemannFlags);
  return riem;
}

/// Max absolute errors of the finite-difference bundle against the closed
/// forms, each field over its own validity window intersected with the
/// comparison region.
struct OracleErrors {
  double christoffel = 0.0;
  double riemann = 0.0;
  double ricci = 0.0;
  double scalar = 0.0;
  double tracefree_ricci = 0.0;
  double weyl = 0.0;
  double cotton = std::numeric_limits<double>::quiet_NaN(); // vs 0
  double bach = std::numeric_limits<double>::quiet_NaN();   // vs 0, Einstein only
  long points = 0;
};

/// The fixed coordinate window used for cross-resolution comparisons: anchored
/// just inside the coarse grid's first retained cell on non-periodic axes.
template <int N>
void comparison_caps(const Grid<N> &coarse, int margin_cells, Vec<N> &lo,
                     Vec<N> &hi) {
  for (int a = 0; a < N; ++a) {
    const Axis &ax = coarse.axis(a);
    if (ax.periodic) {
      lo[a] = -std::numeric_limits<double>::infinity();
      hi[a] = std::numeric_limits<double>::infinity();
      continue;
    }
    const int edge = std::max(ax.excise_lo, margin_cells);
    lo[a] = ax.a + (edge + 0.4) * ax.h();
    hi[a] = ax.b - (edge + 0.4) * ax.h();
  }
}

template <int N>
OracleErrors oracle_compare(const CurvatureBundle<N> &b,
                            const AnalyticOracle<N> &oracle, const Vec<N> &cap_lo,
                            const Vec<N> &cap_hi, bool with_deep_fields) {
  const Grid<N> &grid = b.grid();
  OracleErrors err;
  const Region<N> win1 =
      interior_region(grid, b.margin_first(), &cap_lo, &cap_hi);
  for (Index p = 0; p < grid.size(); ++p) {
    if (!win1.contains(grid.unflatten(p))) continue;
    ++err.points;
    const auto x = grid.coords(p);
    const auto pc = b.curvature(p);
    const auto gamma = b.christoffel(p);
    const auto gamma_o = oracle.christoffel(x);
    const auto riem_o = oracle.riemann(x);
    const auto ric_o = oracle.ricci(x);
    const auto weyl_o = oracle.weyl(x);
    const double r_o = oracle.scalar(x);

    for (int k = 0; k < Tensor3<N>::kSize; ++k)
      err.christoffel = std::max(
          err.christoffel, std::abs(gamma.raw()[k] - gamma_o.raw()[k]));
    for (int k = 0; k < Alg4<N>::kSize; ++k) {
      err.riemann =
          std::max(err.riemann, std::abs(pc.riem.raw()[k] - riem_o.raw()[k]));
      err.weyl =
          std::max(err.weyl, std::abs(pc.weyl.raw()[k] - weyl_o.raw()[k]));
    }
    Sym2<N> ric0_o = ric_o;
    const Sym2<N> g_o = oracle.metric(x);
    for (int i = 0; i < N; ++i)
      for (int j = i; j < N; ++j) ric0_o.at(i, j) -= (r_o / N) * g_o(i, j);
    for (int i = 0; i < N; ++i)
      for (int j = i; j < N; ++j) {
        err.ricci = std::max(err.ricci, std::abs(pc.ric(i, j) - ric_o(i, j)));
        err.tracefree_ricci = std::max(
            err.tracefree_ricci, std::abs(pc.ric0(i, j) - ric0_o(i, j)));
      }
    err.scalar = std::max(err.scalar, std::abs(pc.scalar - r_o));
  }

  if (with_deep_fields) {
    err.cotton = 0.0;
    const Region<N> win2 =
        interior_region(grid, b.margin_second(), &cap_lo, &cap_hi);
    for (Index p = 0; p < grid.size(); ++p) {
      if (!win2.contains(grid.unflatten(p))) continue;
      const auto fr = b.metric().frame(p);
      err.cotton = std::max(
          err.cotton, std::sqrt(norm2_flat(fr.apply(b.cotton(p)))));
    }
    if (oracle.bach_flat) {
      err.bach = 0.0;
      const Region<N> win3 =
          interior_region(grid, b.margin_third(), &cap_lo, &cap_hi);
      for (Index p = 0; p < grid.size(); ++p) {
        if (!win3.contains(grid.unflatten(p))) continue;
        const auto fr = b.metric().frame(p);
        err.bach =
            std::max(err.bach, std::sqrt(norm2_flat(fr.apply(b.bach(p)))));
      }
    }
  }
  return err;
}

template <int N> ZooGeometry<N> build_geometry(const GeometrySpec &spec) {
  using std::numbers::pi;
  if (spec.dim != N) throw std::invalid_argument("geometry dim mismatch");
  ZooGeometry<N> out;
  out.spec = spec;

  switch (spec.kind) {
  case GeometryKind::kRoundSphere: {
    std::array<Axis, N> axes;
    for (int a = 0; a < N - 1; ++a) {
      axes[a] = Axis{0.0, pi, spec.resolution, false};
      const int e = zoo_detail::cap_cells(spec.pole_cap, axes[a].h());
      axes[a].excise_lo = axes[a].excise_hi = e;
    }
    axes[N - 1] = Axis{0.0, 2.0 * pi, spec.resolution, true};

    const double r = spec.radius;
    auto sampler = [r](const Vec<N> &x) {
      Sym2<N> g;
      zoo_detail::sphere_block(x, 0, N, r, g);
      return g;
    };
    out.metric = std::make_shared<MetricField<N>>(Grid<N>(axes), sampler,
                                                  spec.spd_floor);

    AnalyticOracle<N> oracle;
    const double k = 1.0 / (r * r);
    oracle.metric = sampler;
    oracle.christoffel = [r](const Vec<N> &x) {
      Sym2<N> g;
      std::array<Sym2<N>, N> dg{};
      zoo_detail::sphere_block(x, 0, N, r, g);
      zoo_detail::sphere_block_dg(x, 0, N, r, dg);
      return zoo_detail::christoffel_from_jet<N>(g, dg);
    };
    oracle.riemann = [sampler, k](const Vec<N> &x) {
      Alg4<N> riem;
      zoo_detail::add_constant_curvature(riem, sampler(x), k);
      riem.set_flags(kRiemannFlags);
      return riem;
    };
    oracle.ricci = [sampler, k](const Vec<N> &x) {
      return (N - 1.0) * k * sampler(x);
    };
    oracle.scalar = [k](const Vec<N> &) { return N * (N - 1.0) * k; };
    oracle.weyl = [](const Vec<N> &) {
      Alg4<N> w;
      w.set_flags(kWeylFlags);
      return w;
    };
    oracle.einstein = oracle.harmonic = oracle.bach_flat = true;
    oracle.constant_scalar = true;
    oracle.exact_volume = unit_sphere_volume(N) * std::pow(r, N);
    oracle.has_exact_volume = true;
    // Y(S^n) = n(n-1) Vol(S^n)^{2/n}, scale invariant in r.
    oracle.exact_yamabe =
        N * (N - 1.0) * std::pow(unit_sphere_volume(N), 2.0 / N);
    oracle.has_exact_yamabe = true;
    if (N % 2 == 0) {
      oracle.euler_characteristic = 2.0;
      oracle.has_euler = true;
    }
    out.oracle = oracle;
    break;
  }

  case GeometryKind::kFlatTorus:
  case GeometryKind::kPerturbedTorus: {
    std::vector<double> periods = spec.periods;
    if (periods.empty()) periods.assign(N, 2.0 * pi);
    if (periods.size() == 1) periods.assign(N, periods[0]);
    if (static_cast<int>(periods.size()) != N)
      throw std::invalid_argument("torus periods must match dimension");
    std::array<Axis, N> axes;
    for (int a = 0; a < N; ++a)
      axes[a] = Axis{0.0, periods[a], spec.resolution, true};

    std::vector<zoo_detail::TorusMode> modes;
    if (spec.kind == GeometryKind::kPerturbedTorus && spec.amplitude != 0.0) {
      std::mt19937_64 rng(splitmix64(spec.seed));
      std::normal_distribution<double> normal(0.0, 1.0);
      std::uniform_int_distribution<int> wave(-spec.max_wave, spec.max_wave);
      std::uniform_real_distribution<double> ph(0.0, 2.0 * pi);
      for (int m = 0; m < spec.modes; ++m) {
        zoo_detail::TorusMode mode{};
        double fro = 0.0;
        Sym2<N> s;
        for (int i = 0; i < N; ++i)
          for (int j = i; j < N; ++j) s.at(i, j) = normal(rng);
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j) fro += s(i, j) * s(i, j);
        const double scale = spec.amplitude / (spec.modes * std::sqrt(fro));
        for (int c = 0; c < Sym2<N>::kPacked; ++c)
          mode.amp[c] = scale * s.packed()[c];
        bool nonzero = false;
        for (int a = 0; a < N; ++a) {
          mode.wave[a] = wave(rng);
          if (mode.wave[a] != 0) nonzero = true;
        }
        if (!nonzero) mode.wave[m % N] = 1;
        mode.phase = ph(rng);
        // wavenumbers must respect the axis periods
        for (int a = 0; a < N; ++a)
          if (std::abs(periods[a] - 2.0 * pi) > 1e-12)
            mode.wave[a] = 0;
        modes.push_back(mode);
      }
    }

    auto sampler = [modes](const Vec<N> &x) {
      Sym2<N> g = Sym2<N>::identity();
      for (const auto &m : modes) {
        double arg = m.phase;
        for (int a = 0; a < N; ++a) arg += m.wave[a] * x[a];
        const double c = std::cos(arg);
        for (int comp = 0; comp < Sym2<N>::kPacked; ++comp)
          g.packed()[comp] += m.amp[comp] * c;
      }
      return g;
    };
    out.metric = std::make_shared<MetricField<N>>(Grid<N>(axes), sampler,
                                                  spec.spd_floor);

    if (spec.kind == GeometryKind::kFlatTorus || spec.amplitude == 0.0) {
      AnalyticOracle<N> oracle;
      oracle.metric = [](const Vec<N> &) { return Sym2<N>::identity(); };
      oracle.christoffel = [](const Vec<N> &) { return Tensor3<N>{}; };
      oracle.riemann = [](const Vec<N> &) {
        Alg4<N> r;
        r.set_flags(kRiemannFlags);
        return r;
      };
      oracle.ricci = [](const Vec<N> &) { return Sym2<N>::zero(); };
      oracle.scalar = [](const Vec<N> &) { return 0.0; };
      oracle.weyl = [](const Vec<N> &) {
        Alg4<N> w;
        w.set_flags(kWeylFlags);
        return w;
      };
      oracle.einstein = oracle.harmonic = oracle.bach_flat = true;
      oracle.constant_scalar = true;
      double vol = 1.0;
      for (int a = 0; a < N; ++a) vol *= periods[a];
      oracle.exact_volume = vol;
      oracle.has_exact_volume = true;
      oracle.euler_characteristic = 0.0;
      oracle.has_euler = true;
      out.oracle = oracle;
    }
    break;
  }

  case GeometryKind::kProductSpheres: {
    const int p = spec.p, q = spec.q;
    if (p < 2 || q < 2 || p + q != N)
      throw std::invalid_argument("product spheres need factor dims >= 2 summing to n");
    std::array<Axis, N> axes;
    auto polar_axis = [&](int at) {
      axes[at] = Axis{0.0, pi, spec.resolution, false};
      const int e = zoo_detail::cap_cells(spec.pole_cap, axes[at].h());
      axes[at].excise_lo = axes[at].excise_hi = e;
    };
    for (int a = 0; a < p - 1; ++a) polar_axis(a);
    axes[p - 1] = Axis{0.0, 2.0 * pi, spec.resolution, true};
    for (int a = 0; a < q - 1; ++a) polar_axis(p + a);
    axes[N - 1] = Axis{0.0, 2.0 * pi, spec.resolution, true};

    const double r1 = spec.r1, r2 = spec.r2;
    auto block1 = [=](const Vec<N> &x) {
      Sym2<N> g;
      zoo_detail::sphere_block(x, 0, p, r1, g);
      return g;
    };
    auto block2 = [=](const Vec<N> &x) {
      Sym2<N> g;
      zoo_detail::sphere_block(x, p, q, r2, g);
      return g;
    };
    auto sampler = [=](const Vec<N> &x) { return block1(x) + block2(x); };
    out.metric = std::make_shared<MetricField<N>>(Grid<N>(axes), sampler,
                                                  spec.spd_floor);

    AnalyticOracle<N> oracle;
    const double k1 = 1.0 / (r1 * r1), k2 = 1.0 / (r2 * r2);
    const double scalar = p * (p - 1.0) * k1 + q * (q - 1.0) * k2;
    oracle.metric = sampler;
    oracle.christoffel = [=](const Vec<N> &x) {
      Sym2<N> g = sampler(x);
      std::array<Sym2<N>, N> dg{};
      zoo_detail::sphere_block_dg(x, 0, p, r1, dg);
      zoo_detail::sphere_block_dg(x, p, q, r2, dg);
      return zoo_detail::christoffel_from_jet<N>(g, dg);
    };
    oracle.riemann = [=](const Vec<N> &x) {
      Alg4<N> riem;
      zoo_detail::add_constant_curvature(riem, block1(x), k1);
      zoo_detail::add_constant_curvature(riem, block2(x), k2);
      riem.set_flags(kRiemannFlags);
      return riem;
    };
    oracle.ricci = [=](const Vec<N> &x) {
      return (p - 1.0) * k1 * block1(x) + (q - 1.0) * k2 * block2(x);
    };
    oracle.scalar = [scalar](const Vec<N> &) { return scalar; };
    oracle.weyl = [=](const Vec<N> &x) {
      const auto riem = oracle_riemann_for_weyl(block1(x), block2(x), k1, k2);
      Sym2<N> ric = (p - 1.0) * k1 * block1(x) + (q - 1.0) * k2 * block2(x);
      return zoo_detail::weyl_from_closed_form(riem, ric, scalar, sampler(x));
    };
    oracle.einstein = std::abs((p - 1.0) * k1 - (q - 1.0) * k2) < 1e-14;
    oracle.harmonic = true; // product of Einstein factors has parallel Ricci
    oracle.bach_flat = oracle.einstein;
    oracle.constant_scalar = true;
    oracle.exact_volume = unit_sphere_volume(p) * std::pow(r1, p) *
                          unit_sphere_volume(q) * std::pow(r2, q);
    oracle.has_exact_volume = true;
    if (p == 2 && q == 2) {
      oracle.euler_characteristic = 4.0;
      oracle.has_euler = true;
    }
    out.oracle = oracle;
    break;
  }
  }
  return out;
}

} // namespace curvkit
