#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "curvkit/constants.hpp"
#include "curvkit/report.hpp"
#include "curvkit/tensor_ops.hpp"

namespace curvkit {

/// One pointwise algebraic sample, components in an orthonormal frame.
template <int N> struct EstimateSample {
  Alg4<N> weyl;    // Weyl-type: Riemann symmetries + totally tracefree
  Sym2<N> ric0;    // traceless
  double scalar = 0.0;
  double rho = 0.0;
  double theta = 0.0;
};

/// rho induced by the theta chain: rho = n (theta-1)^2 / (2 (theta^2-theta+1)).
template <int N> double rho_from_theta(double theta) {
  const double d = theta - 1.0;
  return N * d * d / (2.0 * (theta * theta - theta + 1.0));
}

/// T/U/V splitting of R0 o^ R0:
///   U = -2/(n(n-1)) |R0|^2 (g o^ g)
///   V = -2/(n-2) (R0^2 o^ g) + 4/(n(n-2)) |R0|^2 (g o^ g)
///   T = R0 o^ R0 - U - V  (totally tracefree)
template <int N> struct TUVDecomposition {
  Alg4<N> t, u, v;
  double norm2_t = 0.0, norm2_u = 0.0, norm2_v = 0.0;
  double norm2_knrr = 0.0; // |R0 o^ R0|^2
};

template <int N>
TUVDecomposition<N> tuv_decompose(const Sym2<N> &ric0,
                                  double trace_tol = 1e-10) {
  if (std::abs(trace_flat(ric0)) > trace_tol * std::max(1.0, ric0.max_abs()))
    throw std::invalid_argument("tuv_decompose: input is not tracefree");

  const Sym2<N> id = Sym2<N>::identity();
  const double r2 = norm2_flat(ric0);
  const Sym2<N> sq = square_flat(ric0);

  const Alg4<N> kn_rr = kulkarni_nomizu(ric0, ric0);
  const Alg4<N> kn_gg = kulkarni_nomizu(id, id);
  const Alg4<N> kn_sq = kulkarni_nomizu(sq, id);

  TUVDecomposition<N> d;
  d.u = (-2.0 / (N * (N - 1.0)) * r2) * kn_gg;
  d.v = (-2.0 / (N - 2.0)) * kn_sq + (4.0 / (N * (N - 2.0)) * r2) * kn_gg;
  d.t = kn_rr;
  for (int k = 0; k < Alg4<N>::kSize; ++k)
    d.t.raw()[k] -= d.u.raw()[k] + d.v.raw()[k];
  d.norm2_t = norm2_flat(d.t);
  d.norm2_u = norm2_flat(d.u);
  d.norm2_v = norm2_flat(d.v);
  d.norm2_knrr = norm2_flat(kn_rr);
  return d;
}

/// Extended result of the sharp quadratic-cubic estimate: the report plus the
/// residuals of the algebraic identities its proof runs through, which double
/// as independent implementation cross-checks.
template <int N> struct SharpEstimateResult {
  EstimateReport report;
  double contraction_identity_rel = 0.0; // two routes to the lhs
  double combined_norm_identity_rel = 0.0;
  double tuv_identity_rel = 0.0;         // |T|^2 + n/2 |V|^2 vs 8(n-2)/(n-1) |R0|^4
  double tuv_middle_identity_rel = 0.0;
};

template <int N>
SharpEstimateResult<N> sharp_estimate(const EstimateSample<N> &s,
                                      double rel_tol = 1e-12) {
  const Alg4<N> &w = s.weyl;
  const Sym2<N> &r0 = s.ric0;
  const double rho = s.rho;
  const Sym2<N> id = Sym2<N>::identity();

  // lhs two ways: direct contraction, and the KN-product pairing.
  double wrr = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) wrr += w(i, j, k, l) * r0(j, l) * r0(i, k);
  const double tr3 = trace_cube_flat(r0);
  const double lhs_direct = -wrr + rho / (N - 2.0) * tr3;

  const Alg4<N> kn_rr = kulkarni_nomizu(r0, r0);
  Alg4<N> combo_half = kulkarni_nomizu(r0, id);
  combo_half *= rho / (2.0 * (N - 2.0));
  combo_half += w;
  const double lhs_kn = -0.25 * inner_flat(combo_half, kn_rr);

  const double r2 = norm2_flat(r0);
  Alg4<N> combo = kulkarni_nomizu(r0, id);
  combo *= rho / (std::sqrt(2.0 * N) * (N - 2.0));
  combo += w;
  const double combo_norm2 = norm2_flat(combo);
  const double combo_norm2_expected =
      norm2_flat(w) + 2.0 * rho * rho / (N * (N - 2.0)) * r2;

  const double rhs =
      std::sqrt((N - 2.0) / (2.0 * (N - 1.0))) * std::sqrt(combo_norm2) * r2;

  SharpEstimateResult<N> out;
  out.report = make_report(std::abs(lhs_direct), rhs, rel_tol * rhs);

  auto rel = [](double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-14});
  };
  out.contraction_identity_rel = rel(lhs_direct, lhs_kn);
  out.combined_norm_identity_rel = rel(combo_norm2, combo_norm2_expected);

  const TUVDecomposition<N> d = tuv_decompose(r0);
  const double lhs_id = d.norm2_t + 0.5 * N * d.norm2_v;
  const double mid_id = d.norm2_knrr + 0.5 * (N - 2.0) * d.norm2_v - d.norm2_u;
  const double rhs_id = 8.0 * (N - 2.0) / (N - 1.0) * r2 * r2;
  out.tuv_identity_rel = rel(lhs_id, rhs_id);
  out.tuv_middle_identity_rel = rel(mid_id, rhs_id);
  return out;
}

/// 2 W.W.W + (1/2) W.W'.W' <= C(n) |W|^3.
template <int N>
EstimateReport cubic_bound_check(const Alg4<N> &w, double rel_tol = 1e-12) {
  const double lhs = cubic_weyl_form(w);
  const double rhs =
      weyl_cubic_constant(N) * std::pow(norm2_flat(w), 1.5);
  return make_report(lhs, rhs, rel_tol * std::max(rhs, 1.0));
}

/// Pointwise pinching hypothesis of the 4-d Bach-flat rigidity theorem:
/// |W + (sqrt2/3) R0 o^ g| < (2/(3 sqrt3)) R, strict.
template <int N>
EstimateReport pointwise_pinching_thm11(const Alg4<N> &w, const Sym2<N> &ric0,
                                        double scalar, double margin = 0.0) {
  static_assert(N == 4, "pointwise pinching hypothesis is 4-dimensional");
  Alg4<N> combo = kulkarni_nomizu(ric0, Sym2<N>::identity());
  combo *= std::sqrt(2.0) / 3.0;
  combo += w;
  const double lhs = std::sqrt(norm2_flat(combo));
  const double rhs = 2.0 / (3.0 * std::sqrt(3.0)) * scalar;
  EstimateReport r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.satisfied = lhs < rhs - margin; // strict
  return r;
}

/// The 4-d remark chain relating the pointwise hypothesis to the norm-sum
/// smallness condition |W| + |R0| < R/16.
struct RemarkChainReport {
  EstimateReport norm_sum;       // |W| + |R0| < R/(4n), n = 4
  EstimateReport squared_chain;  // |W|^2 + 16/9 |R0|^2 < 4 R^2/27
  EstimateReport sum_vs_sqrt;    // |W| + |R0| <= sqrt(2(|W|^2+|R0|^2))
  EstimateReport sqrt_bound;     // sqrt(2(|W|^2+|R0|^2)) < 4R/(3 sqrt6)
  double constant_lhs = 0.0;     // 4/(3 sqrt 6)
  double constant_rhs = 0.0;     // 1/16
  bool constant_comparison = false;
};

template <int N>
RemarkChainReport remark1_chain(const Alg4<N> &w, const Sym2<N> &ric0,
                                double scalar) {
  static_assert(N == 4, "remark chain is 4-dimensional");
  RemarkChainReport rep;
  const double w2 = norm2_flat(w);
  const double r2 = norm2_flat(ric0);
  const double wn = std::sqrt(w2), rn = std::sqrt(r2);

  rep.norm_sum = make_report(wn + rn, scalar / 16.0);
  rep.norm_sum.satisfied = rep.norm_sum.lhs < rep.norm_sum.rhs;

  rep.squared_chain =
      make_report(w2 + 16.0 / 9.0 * r2, 4.0 * scalar * scalar / 27.0);
  rep.squared_chain.satisfied = rep.squared_chain.lhs < rep.squared_chain.rhs;

  rep.sum_vs_sqrt = make_report(wn + rn, std::sqrt(2.0 * (w2 + r2)), 1e-14);

  rep.sqrt_bound = make_report(std::sqrt(2.0 * (w2 + r2)),
                               4.0 * scalar / (3.0 * std::sqrt(6.0)));
  rep.sqrt_bound.satisfied = rep.sqrt_bound.lhs < rep.sqrt_bound.rhs;

  rep.constant_lhs = 4.0 / (3.0 * std::sqrt(6.0));
  rep.constant_rhs = 1.0 / 16.0;
  rep.constant_comparison = rep.constant_lhs > rep.constant_rhs;
  return rep;
}

/// Deterministic per-sample RNG stream.
inline std::mt19937_64 sample_rng(std::uint64_t seed, long index) {
  return std::mt19937_64(splitmix64(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1))));
}

/// Batch driver for the sharp estimate; rho drawn uniform in [-rho_span, rho_span].
template <int N>
BatchStats run_sharp_estimate_batch(long count, std::uint64_t seed,
                                    double rho_span = 10.0) {
  BatchStats st;
  st.samples = count;
  st.seed = seed;
  st.min_slack = std::numeric_limits<double>::infinity();
  for (long s = 0; s < count; ++s) {
    auto rng = sample_rng(seed, s);
    EstimateSample<N> smp;
    smp.weyl = sample_weyl_type<N>(rng);
    smp.ric0 = sample_tracefree_sym2<N>(rng);
    std::uniform_real_distribution<double> uni(-rho_span, rho_span);
    smp.rho = uni(rng);
    const auto res = sharp_estimate(smp);
    const double rel_slack =
        res.report.slack / std::max(res.report.rhs, 1e-300);
    st.min_slack = std::min(st.min_slack, rel_slack);
    if (!res.report.satisfied) ++st.violations;
    if (res.report.rhs > 1e-12)
      st.max_ratio = std::max(st.max_ratio, res.report.lhs / res.report.rhs);
    st.max_identity_rel_err = std::max(
        {st.max_identity_rel_err, res.contraction_identity_rel,
         res.combined_norm_identity_rel, res.tuv_identity_rel,
         res.tuv_middle_identity_rel});
  }
  return st;
}

template <int N>
BatchStats run_cubic_bound_batch(long count, std::uint64_t seed) {
  BatchStats st;
  st.samples = count;
  st.seed = seed;
  st.min_slack = std::numeric_limits<double>::infinity();
  for (long s = 0; s < count; ++s) {
    auto rng = sample_rng(seed, s);
    const Alg4<N> w = sample_weyl_type<N>(rng);
    const auto rep = cubic_bound_check(w);
    const double rel_slack = rep.slack / std::max(rep.rhs, 1e-300);
    st.min_slack = std::min(st.min_slack, rel_slack);
    if (!rep.satisfied) ++st.violations;
    if (rep.rhs > 1e-12)
      st.max_ratio = std::max(st.max_ratio, rep.lhs / rep.rhs);
  }
  return st;
}

/// Samples theta_coefficient at random theta != 1 and confirms f >= 3/4.
inline BatchStats run_theta_scan(long count, std::uint64_t seed) {
  BatchStats st;
  st.samples = count;
  st.seed = seed;
  st.min_slack = std::numeric_limits<double>::infinity();
  for (long s = 0; s < count; ++s) {
    auto rng = sample_rng(seed, s);
    std::uniform_real_distribution<double> uni(-50.0, 50.0);
    double theta = uni(rng);
    if (std::abs(theta - 1.0) < 1e-6) theta += 0.5;
    const double f = theta_coefficient(theta);
    st.min_slack = std::min(st.min_slack, f - 0.75);
    if (f < 0.75 - 1e-13) ++st.violations;
    st.max_ratio = std::max(st.max_ratio, 0.75 / f);
  }
  return st;
}

} // namespace curvkit
