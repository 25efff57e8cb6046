#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "curvkit/constants.hpp"
#include "curvkit/curvature.hpp"
#include "curvkit/estimates.hpp"
#include "curvkit/quadrature.hpp"
#include "curvkit/report.hpp"

namespace curvkit {

/// Smooth seeded symmetric trig-polynomial test field (unit wavenumbers keep
/// order-4 stencil truncation small on coarse grids).
template <int N>
Sym2Field<N> random_trig_sym2_field(const Grid<N> &grid, std::uint64_t seed,
                                    int modes = 3, double amplitude = 1.0) {
  std::mt19937_64 rng(splitmix64(seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> wave(-1, 1);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);

  struct Mode {
    Sym2<N> amp;
    std::array<int, static_cast<std::size_t>(N)> k;
    double phase;
  };
  std::vector<Mode> ms;
  for (int m = 0; m < modes; ++m) {
    Mode mode;
    for (int i = 0; i < N; ++i)
      for (int j = i; j < N; ++j) mode.amp.at(i, j) = normal(rng);
    mode.amp *= amplitude / modes;
    bool nonzero = false;
    for (int a = 0; a < N; ++a) {
      mode.k[a] = wave(rng);
      nonzero |= mode.k[a] != 0;
    }
    if (!nonzero) mode.k[m % N] = 1;
    mode.phase = ph(rng);
    ms.push_back(mode);
  }

  Sym2Field<N> f(grid.size());
  for (Index p = 0; p < grid.size(); ++p) {
    const auto x = grid.coords(p);
    Sym2<N> s;
    for (const auto &m : ms) {
      double arg = m.phase;
      for (int a = 0; a < N; ++a) arg += m.k[a] * x[a];
      const double c = std::cos(arg);
      for (int comp = 0; comp < Sym2<N>::kPacked; ++comp)
        s.packed()[comp] += m.amp.packed()[comp] * c;
    }
    f[p] = s;
  }
  return f;
}

/// Scalar trial function for Rayleigh quotients.
template <int N> struct TrialFunction {
  ScalarField<N> u;
  std::string description;
};

template <int N>
TrialFunction<N> constant_trial(const Grid<N> &grid, double value = 1.0) {
  return TrialFunction<N>{ScalarField<N>(grid.size(), value), "constant"};
}

enum class YamabeSource { kExactKnown, kUserSupplied, kTrialFunction };

inline const char *yamabe_source_name(YamabeSource s) {
  switch (s) {
  case YamabeSource::kExactKnown: return "exact";
  case YamabeSource::kUserSupplied: return "user";
  case YamabeSource::kTrialFunction: return "trial-upper-bound";
  }
  return "unknown";
}

/// Yamabe value together with its provenance. Trial-function quotients are
/// only upper bounds: hypothesis checks that place Y on the large side are
/// non-rigorous with such a source and reports must say so.
struct YamabeEstimate {
  double quotient = 0.0;
  YamabeSource source = YamabeSource::kUserSupplied;
  bool rigorous() const { return source != YamabeSource::kTrialFunction; }
};

/// Frame-converted curvature at one point.
template <int N> struct FramePoint {
  Alg4<N> weyl;
  Sym2<N> ric0;
  double scalar = 0.0;
};

template <int N>
FramePoint<N> frame_curvature(const CurvatureBundle<N> &b, Index p) {
  const auto pc = b.curvature(p);
  const auto fr = b.metric().frame(p);
  return FramePoint<N>{fr.apply(pc.weyl), fr.apply(pc.ric0), pc.scalar};
}

/// Measured structural facts used as theorem preconditions.
struct StructureReport {
  double scalar_min = 0.0;
  double scalar_max = 0.0;
  double scalar_mean = 0.0;
  double max_tracefree_ricci = 0.0; // frame norm
  double max_bach = 0.0;            // frame norm; NaN if not measured
  double codazzi_residual = 0.0;    // max |nabla_j Ric_ki - nabla_i Ric_kj|; NaN if not measured
  bool structurally_einstein = false;
  bool structurally_harmonic = false;
  bool structurally_bach_flat = false;

  double curvature_scale() const {
    return std::max({std::abs(scalar_mean), max_tracefree_ricci, 1e-8});
  }
  bool einstein(double tol) const {
    return structurally_einstein ||
           max_tracefree_ricci <= tol * curvature_scale();
  }
  bool constant_scalar(double tol) const {
    return (scalar_max - scalar_min) <= tol * curvature_scale();
  }
  bool positive_scalar() const { return scalar_min > 0.0; }
  bool bach_flat(double tol) const {
    return structurally_bach_flat ||
           (!std::isnan(max_bach) && max_bach <= tol * curvature_scale());
  }
  bool harmonic(double tol) const {
    return structurally_harmonic ||
           (!std::isnan(codazzi_residual) &&
            codazzi_residual <= tol * curvature_scale());
  }
};

template <int N>
StructureReport measure_structure(const CurvatureBundle<N> &b,
                                  bool with_bach = true,
                                  bool with_codazzi = true) {
  const Grid<N> &grid = b.grid();
  StructureReport s;
  s.scalar_min = std::numeric_limits<double>::infinity();
  s.scalar_max = -s.scalar_min;
  s.max_bach = std::numeric_limits<double>::quiet_NaN();
  s.codazzi_residual = std::numeric_limits<double>::quiet_NaN();

  const Region<N> first = interior_region(grid, b.margin_first());
  double sum = 0.0;
  long cnt = 0;
  for (Index p = 0; p < grid.size(); ++p) {
    if (!first.contains(grid.unflatten(p))) continue;
    const double r = b.scalar(p);
    s.scalar_min = std::min(s.scalar_min, r);
    s.scalar_max = std::max(s.scalar_max, r);
    sum += r;
    ++cnt;
    const auto fr = b.metric().frame(p);
    s.max_tracefree_ricci =
        std::max(s.max_tracefree_ricci,
                 std::sqrt(norm2_flat(fr.apply(b.tracefree_ricci(p)))));
  }
  s.scalar_mean = cnt ? sum / cnt : 0.0;

  if (with_bach) {
    s.max_bach = 0.0;
    const Region<N> third = interior_region(grid, b.margin_third());
    if (!third.empty)
      for (Index p = 0; p < grid.size(); ++p) {
        if (!third.contains(grid.unflatten(p))) continue;
        const auto fr = b.metric().frame(p);
        s.max_bach =
            std::max(s.max_bach, std::sqrt(norm2_flat(fr.apply(b.bach(p)))));
      }
  }

  if (with_codazzi) {
    s.codazzi_residual = 0.0;
    Sym2Field<N> ric(grid.size());
    for (Index p = 0; p < grid.size(); ++p) {
      ric[p] = b.tracefree_ricci_field()[p];
      Sym2<N> g = b.metric().g(p);
      g *= b.scalar_field()[p] / N;
      ric[p] += g;
    }
    const Region<N> second = interior_region(grid, b.margin_second());
    for (Index p = 0; p < grid.size(); ++p) {
      if (!second.contains(grid.unflatten(p))) continue;
      const auto cov = b.cov_sym2_at(ric, p);
      const auto fr = b.metric().frame(p);
      Tensor3<N> c1;
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          for (int k = 0; k < N; ++k)
            c1.at(i, j, k) = cov(i, k, j) - cov(j, k, i);
      s.codazzi_residual = std::max(
          s.codazzi_residual, std::sqrt(norm2_flat(fr.apply(c1))));
    }
  }
  return s;
}

/// integral of f dv_g with the integrand window set by the derivative depth.
template <int N, class F>
IntegralResult integrate_depth(const CurvatureBundle<N> &b, F &&f, int margin) {
  const Region<N> window = interior_region(b.grid(), margin);
  return integrate(b.metric(), std::forward<F>(f), window);
}

/// Rayleigh quotient of the conformal Laplacian functional:
///   (4(n-1)/(n-2)) [ int |grad u|^2 + (n-2)/(4(n-1)) int R u^2 ]
///     / ( int |u|^{2n/(n-2)} )^{(n-2)/n}.
template <int N>
double yamabe_quotient(const CurvatureBundle<N> &b, const TrialFunction<N> &u) {
  const double a = (N - 2.0) / (4.0 * (N - 1.0));
  const double pexp = 2.0 * N / (N - 2.0);
  const auto grad = integrate_depth(
      b, [&](Index p) { return b.grad_norm2_of(u.u, p); }, b.margin_first());
  const auto ru2 = integrate_depth(
      b, [&](Index p) { return b.scalar(p) * u.u[p] * u.u[p]; },
      b.margin_first());
  const auto lp = integrate_depth(
      b, [&](Index p) { return std::pow(std::abs(u.u[p]), pexp); }, 0);
  const double denom = std::pow(lp.value, (N - 2.0) / N);
  if (!(denom > 0.0))
    throw std::domain_error("yamabe_quotient: trial function has zero L^p norm");
  return (grad.value + a * ru2.value) / (a * denom);
}

/// Sobolev-type consequence of a positive Yamabe invariant.
template <int N>
EstimateReport sobolev_check(const CurvatureBundle<N> &b,
                             const TrialFunction<N> &u,
                             const YamabeEstimate &y, double tol = 1e-9) {
  if (!(y.quotient > 0.0))
    throw std::invalid_argument("sobolev_check: requires positive Yamabe value");
  const double a = (N - 2.0) / (4.0 * (N - 1.0));
  const double pexp = 2.0 * N / (N - 2.0);
  const auto grad = integrate_depth(
      b, [&](Index p) { return b.grad_norm2_of(u.u, p); }, b.margin_first());
  const auto ru2 = integrate_depth(
      b, [&](Index p) { return b.scalar(p) * u.u[p] * u.u[p]; },
      b.margin_first());
  const auto lp = integrate_depth(
      b, [&](Index p) { return std::pow(std::abs(u.u[p]), pexp); }, 0);
  const double lhs = a * y.quotient * std::pow(lp.value, (N - 2.0) / N);
  const double rhs = grad.value + a * ru2.value;
  return make_report(lhs, rhs, tol * std::max(std::abs(rhs), 1.0));
}

/// Integral identity of the theta-tensor (integration by parts on a closed
/// chart):
///   int [(th^2+1)|grad phi|^2 - |C_th|^2]
///     = 2 th int [ |div phi|^2 + W phi0 phi0 - n/(n-2) R0 phi0 phi0
///                  - R/(n-1) |phi0|^2 ].
template <int N>
IdentityResidual lemma21_residual(const CurvatureBundle<N> &b,
                                  const Sym2Field<N> &phi, double theta) {
  const Grid<N> &grid = b.grid();
  const int margin = b.margin_first();

  const auto lhs = integrate_depth(
      b,
      [&](Index p) {
        const auto fr = b.metric().frame(p);
        const Tensor3<N> cov = fr.apply(b.cov_sym2_at(phi, p));
        Tensor3<N> cth;
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k)
              cth.at(i, j, k) = cov(i, k, j) - theta * cov(j, k, i);
        return (theta * theta + 1.0) * norm2_flat(cov) - norm2_flat(cth);
      },
      margin);

  const auto rhs = integrate_depth(
      b,
      [&](Index p) {
        const auto fr = b.metric().frame(p);
        const auto fc = frame_curvature(b, p);
        const Tensor3<N> cov = fr.apply(b.cov_sym2_at(phi, p));
        const Sym2<N> phif = fr.apply(phi[p]);
        const Sym2<N> phi0 = tracefree_project(phif);

        Vec<N> div{};
        for (int k = 0; k < N; ++k)
          for (int i = 0; i < N; ++i) div[k] += cov(i, i, k);
        double div2 = 0.0;
        for (int k = 0; k < N; ++k) div2 += div[k] * div[k];

        double wpp = 0.0;
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k)
              for (int l = 0; l < N; ++l)
                wpp += fc.weyl(i, j, k, l) * phi0(j, l) * phi0(i, k);

        double rpp = 0.0; // R0_ij phi0_jk phi0_ki
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k)
              rpp += fc.ric0(i, j) * phi0(j, k) * phi0(k, i);

        return 2.0 * theta *
               (div2 + wpp - double(N) / (N - 2.0) * rpp -
                fc.scalar / (N - 1.0) * norm2_flat(phi0));
      },
      margin);

  auto spacing = grid.spacing();
  return make_residual(lhs.value, rhs.value,
                       std::vector<double>(spacing.begin(), spacing.end()));
}

/// Gradient inequality for the traceless Ricci tensor derived from the
/// theta-tensor identity:
///   int |grad R0|^2 >= 2 th/(th^2+1) int [ W R0 R0 - n/(n-2) tr R0^3
///                       - R/(n-1) |R0|^2 + (n-2)^2/(4n^2) |grad R|^2 ].
template <int N>
EstimateReport lemma21_ricci_inequality(const CurvatureBundle<N> &b,
                                        double theta, double tol = 1e-9) {
  const int margin = b.margin_second();
  const auto lhs = integrate_depth(
      b,
      [&](Index p) {
        const auto fr = b.metric().frame(p);
        return norm2_flat(fr.apply(b.cov_tracefree_ricci(p)));
      },
      margin);
  const auto rhs = integrate_depth(
      b,
      [&](Index p) {
        const auto fc = frame_curvature(b, p);
        double wrr = 0.0;
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k)
              for (int l = 0; l < N; ++l)
                wrr += fc.weyl(i, j, k, l) * fc.ric0(j, l) * fc.ric0(i, k);
        const double tr3 = trace_cube_flat(fc.ric0);
        const Vec<N> dr = b.grad_scalar(p);
        const Sym2<N> gi = b.metric().ginv(p);
        double dr2 = 0.0;
        for (int a = 0; a < N; ++a)
          for (int c = 0; c < N; ++c) dr2 += gi(a, c) * dr[a] * dr[c];
        return wrr - double(N) / (N - 2.0) * tr3 -
               fc.scalar / (N - 1.0) * norm2_flat(fc.ric0) +
               (N - 2.0) * (N - 2.0) / (4.0 * N * N) * dr2;
      },
      margin);
  const double factor = 2.0 * theta / (theta * theta + 1.0);
  return make_report(factor * rhs.value, lhs.value,
                     tol * std::max({std::abs(lhs.value),
                                     std::abs(rhs.value), 1.0}));
}

/// Integral identity on Bach-flat charts:
///   int |grad R0|^2 = int [ 2 W R0 R0 - n/(n-2) tr R0^3 - R/(n-1) |R0|^2
///                           + (n-2)^2/(4n(n-1)) |grad R|^2 ].
/// Refuses when the measured Bach norm exceeds the tolerance.
template <int N>
IdentityResidual lemma22_residual(const CurvatureBundle<N> &b,
                                  const StructureReport &structure,
                                  double bach_tol) {
  if (!structure.bach_flat(bach_tol))
    throw std::domain_error(
        "lemma22_residual: chart is not Bach-flat to tolerance (max |B| = " +
        std::to_string(structure.max_bach) + ")");
  const int margin = b.margin_second();
  const auto lhs = integrate_depth(
      b,
      [&](Index p) {
        const auto fr = b.metric().frame(p);
        return norm2_flat(fr.apply(b.cov_tracefree_ricci(p)));
      },
      margin);
  const auto rhs = integrate_depth(
      b,
      [&](Index p) {
        const auto fc = frame_curvature(b, p);
        double wrr = 0.0;
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k)
              for (int l = 0; l < N; ++l)
                wrr += fc.weyl(i, j, k, l) * fc.ric0(j, l) * fc.ric0(i, k);
        const double tr3 = trace_cube_flat(fc.ric0);
        const Vec<N> dr = b.grad_scalar(p);
        const Sym2<N> gi = b.metric().ginv(p);
        double dr2 = 0.0;
        for (int a = 0; a < N; ++a)
          for (int c = 0; c < N; ++c) dr2 += gi(a, c) * dr[a] * dr[c];
        return 2.0 * wrr - double(N) / (N - 2.0) * tr3 -
               fc.scalar / (N - 1.0) * norm2_flat(fc.ric0) +
               (N - 2.0) * (N - 2.0) / (4.0 * N * (N - 1.0)) * dr2;
      },
      margin);
  auto spacing = b.grid().spacing();
  return make_residual(lhs.value, rhs.value,
                       std::vector<double>(spacing.begin(), spacing.end()));
}

/// |W| as a stored scalar field (frame norm), for Kato-type checks.
template <int N>
ScalarField<N> weyl_norm_field(const CurvatureBundle<N> &b) {
  const Grid<N> &grid = b.grid();
  ScalarField<N> f(grid.size(), std::numeric_limits<double>::quiet_NaN());
  const Region<N> first = margin_region(grid, b.margin_first());
  for (Index p = 0; p < grid.size(); ++p) {
    if (!first.contains(grid.unflatten(p))) continue;
    const auto fr = b.metric().frame(p);
    f[p] = std::sqrt(norm2_flat(fr.apply(b.curvature(p).weyl)));
  }
  return f;
}

template <int N>
ScalarField<N> tracefree_ricci_norm_field(const CurvatureBundle<N> &b) {
  const Grid<N> &grid = b.grid();
  ScalarField<N> f(grid.size(), std::numeric_limits<double>::quiet_NaN());
  const Region<N> first = margin_region(grid, b.margin_first());
  for (Index p = 0; p < grid.size(); ++p) {
    if (!first.contains(grid.unflatten(p))) continue;
    const auto fr = b.metric().frame(p);
    f[p] = std::sqrt(norm2_flat(fr.apply(b.tracefree_ricci(p))));
  }
  return f;
}

/// |nabla W|^2 in the frame sense at one point (streams Weyl evaluations).
template <int N>
double cov_weyl_norm2(const CurvatureBundle<N> &b, Index p) {
  const auto jet0 = b.jet(p, true);
  const Alg4<N> wp = point_curvature(jet0).weyl;
  const Stencil &st = b.stencil();
  const Grid<N> &grid = b.grid();

  // nabla_m W_ijkl, all slots lower
  std::array<Alg4<N>, static_cast<std::size_t>(N)> dW;
  for (int m = 0; m < N; ++m) {
    const double inv_h = 1.0 / grid.axis(m).h();
    Alg4<N> acc;
    for (int off = -st.radius; off <= st.radius; ++off) {
      if (off == 0 || st.d1[off + 2] == 0.0) continue;
      const Alg4<N> wq = point_curvature(b.jet(grid.shift(p, m, off), true)).weyl;
      const double w = st.d1[off + 2] * inv_h;
      for (int k = 0; k < Alg4<N>::kSize; ++k) acc.raw()[k] += w * wq.raw()[k];
    }
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k)
          for (int l = 0; l < N; ++l) {
            double corr = 0.0;
            for (int q = 0; q < N; ++q)
              corr += jet0.gamma(q, m, i) * wp(q, j, k, l) +
                      jet0.gamma(q, m, j) * wp(i, q, k, l) +
                      jet0.gamma(q, m, k) * wp(i, j, q, l) +
                      jet0.gamma(q, m, l) * wp(i, j, k, q);
            acc.at(i, j, k, l) -= corr;
          }
    dW[m] = acc;
  }

  // |nabla W|^2 = g^{mn} g^{ia}g^{jb}g^{kc}g^{ld} dW_m... dW_n...
  // contract via the frame: convert each dW_m on 4 slots, then handle the
  // derivative slot with g^{mn}.
  const auto fr = b.metric().frame(p);
  std::array<Alg4<N>, static_cast<std::size_t>(N)> dWf;
  for (int m = 0; m < N; ++m) dWf[m] = fr.apply(dW[m]);
  const Sym2<N> gi = b.metric().ginv(p);
  double s = 0.0;
  for (int m = 0; m < N; ++m)
    for (int n2 = 0; n2 < N; ++n2) {
      const double gmn = gi(m, n2);
      if (gmn == 0.0) continue;
      s += gmn * inner_flat(dWf[m], dWf[n2]);
    }
  return s;
}

/// Refined Kato reports. which = "einstein" uses the Weyl field bound
/// (n+1)/(n-1); which = "codazzi" uses the traceless-Ricci bound (n+2)/n.
template <int N>
CheckRecord kato_check(const CurvatureBundle<N> &b,
                       const StructureReport &structure, bool einstein_case,
                       double precondition_tol, double zero_cut_rel = 1e-8,
                       double noise_floor = 1e-14) {
  CheckRecord rec;
  rec.id = einstein_case ? CheckId::kKatoEinstein : CheckId::kKatoCodazzi;
  rec.name = einstein_case ? "kato-einstein" : "kato-codazzi";

  if (einstein_case && !structure.einstein(precondition_tol)) {
    rec.status = CheckRecord::Status::kNotApplicable;
    rec.note = "einstein hypothesis fails (max |Ric0| = " +
               std::to_string(structure.max_tracefree_ricci) + ")";
    return rec;
  }
  if (!einstein_case && !structure.harmonic(precondition_tol)) {
    rec.status = CheckRecord::Status::kNotApplicable;
    rec.note = "harmonic-curvature hypothesis fails (codazzi residual = " +
               std::to_string(structure.codazzi_residual) + ")";
    return rec;
  }

  const Grid<N> &grid = b.grid();
  const ScalarField<N> norms =
      einstein_case ? weyl_norm_field(b) : tracefree_ricci_norm_field(b);
  const Region<N> window = interior_region(grid, b.margin_second());
  double field_max = 0.0;
  for (Index p = 0; p < grid.size(); ++p)
    if (window.contains(grid.unflatten(p)))
      field_max = std::max(field_max, norms[p]);

  const double constant =
      einstein_case ? (N + 1.0) / (N - 1.0) : (N + 2.0) / N;
  double min_slack = std::numeric_limits<double>::infinity();
  Index arg = -1;
  double min_lhs = 0.0, min_rhs = 0.0;
  long considered = 0;
  for (Index p = 0; p < grid.size(); ++p) {
    if (!window.contains(grid.unflatten(p))) continue;
    if (norms[p] < zero_cut_rel * field_max) continue; // non-differentiable locus
    ++considered;
    double lhs;
    if (einstein_case) {
      lhs = cov_weyl_norm2(b, p);
    } else {
      const auto fr = b.metric().frame(p);
      lhs = norm2_flat(fr.apply(b.cov_tracefree_ricci(p)));
    }
    const double rhs = constant * b.grad_norm2_of(norms, p);
    const double slack = lhs - rhs;
    if (slack < min_slack) {
      min_slack = slack;
      arg = p;
      min_lhs = lhs;
      min_rhs = rhs;
    }
  }

  rec.report.lhs = min_rhs; // inequality is lhs >= rhs; report worst point
  rec.report.rhs = min_lhs;
  rec.report.slack = min_slack;
  const double floor =
      std::max(noise_floor, 1e-6 * std::max(min_lhs, min_rhs));
  rec.report.satisfied = considered == 0 || min_slack >= -floor;
  if (arg >= 0) {
    EstimateReport::Witness w;
    w.flat_index = arg;
    const auto x = grid.coords(arg);
    w.coords.assign(x.begin(), x.end());
    rec.report.witness = w;
  }
  rec.status = rec.report.satisfied ? CheckRecord::Status::kSatisfied
                                    : CheckRecord::Status::kViolated;
  rec.values["points_checked"] = double(considered);
  return rec;
}

/// Max-norm residual of the Weyl Laplacian identity on Einstein charts:
///   (1/2) lap |W|^2 - |nabla W|^2 - (2/n) R |W|^2 + 2 * cubic(W) -> 0.
template <int N>
double einstein_weyl_laplacian_residual(const CurvatureBundle<N> &b,
                                        const StructureReport &structure,
                                        double einstein_tol) {
  if (!structure.einstein(einstein_tol))
    throw std::domain_error(
        "weyl laplacian identity requires an Einstein chart (max |Ric0| = " +
        std::to_string(structure.max_tracefree_ricci) + ")");
  const Grid<N> &grid = b.grid();
  ScalarField<N> w2(grid.size(), std::numeric_limits<double>::quiet_NaN());
  const Region<N> first = margin_region(grid, b.margin_first());
  for (Index p = 0; p < grid.size(); ++p) {
    if (!first.contains(grid.unflatten(p))) continue;
    const auto fr = b.metric().frame(p);
    w2[p] = norm2_flat(fr.apply(b.curvature(p).weyl));
  }
  const Region<N> window = interior_region(grid, b.margin_second());
  double mx = 0.0;
  for (Index p = 0; p < grid.size(); ++p) {
    if (!window.contains(grid.unflatten(p))) continue;
    const auto fr = b.metric().frame(p);
    const auto wf = fr.apply(b.curvature(p).weyl);
    const double lap = b.laplacian_scalar(w2, p);
    const double covw2 = cov_weyl_norm2(b, p);
    const double cubic = cubic_weyl_form(wf);
    const double resid = 0.5 * lap - covw2 -
                         2.0 / N * b.scalar(p) * w2[p] + 2.0 * cubic;
    mx = std::max(mx, std::abs(resid));
  }
  return mx;
}

} // namespace curvkit
