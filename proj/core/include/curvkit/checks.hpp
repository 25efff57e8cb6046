#pragma once

#include "curvkit/integrals.hpp"

namespace curvkit {

/// Chern-Gauss-Bonnet on 4-d charts:
///   chi = (1/32 pi^2) int (|W|^2 - 2|Ric0|^2 + R^2/6),
/// plus the rearranged consequence
///   int |Ric0|^2 = int (|W|^2/2 + R^2/12) - 16 pi^2 chi
/// evaluated with the nearest-integer chi.
template <int N> struct GaussBonnetResult {
  double chi_estimate = 0.0;
  int chi_rounded = 0;
  IdentityResidual rearranged;
  double integral_w2 = 0.0;
  double integral_ric02 = 0.0;
  double integral_r2 = 0.0;
};

template <int N>
GaussBonnetResult<N> gauss_bonnet_4d(const CurvatureBundle<N> &b) {
  static_assert(N == 4, "Gauss-Bonnet integrand is 4-dimensional");
  using std::numbers::pi;
  const int margin = b.margin_first();
  const auto w2 = integrate_depth(
      b, [&](Index p) { return norm2_flat(frame_curvature(b, p).weyl); },
      margin);
  const auto r02 = integrate_depth(
      b,
      [&](Index p) {
        const auto fr = b.metric().frame(p);
        return norm2_flat(fr.apply(b.tracefree_ricci(p)));
      },
      margin);
  const auto r2 = integrate_depth(
      b, [&](Index p) { return b.scalar(p) * b.scalar(p); }, margin);

  GaussBonnetResult<N> res;
  res.integral_w2 = w2.value;
  res.integral_ric02 = r02.value;
  res.integral_r2 = r2.value;
  res.chi_estimate =
      (w2.value - 2.0 * r02.value + r2.value / 6.0) / (32.0 * pi * pi);
  res.chi_rounded = static_cast<int>(std::lround(res.chi_estimate));
  const double lhs = r02.value;
  const double rhs = 0.5 * w2.value + r2.value / 12.0 -
                     16.0 * pi * pi * res.chi_rounded;
  auto spacing = b.grid().spacing();
  res.rearranged = make_residual(
      lhs, rhs, std::vector<double>(spacing.begin(), spacing.end()));
  return res;
}

/// Kato-Yamabe combination on Einstein charts with positive scalar curvature:
///   [ (n+1)/(n-1) Y - 8(n-1)/(n-2) C(n) ||W||_{n/2} ] int |grad|W||^2
/// + [ (2/n) Y - 2 C(n) ||W||_{n/2} ] int R |W|^2  <= 0.
template <int N>
CheckRecord lemma24_combination(const CurvatureBundle<N> &b,
                                const StructureReport &structure,
                                const YamabeEstimate &y, double einstein_tol,
                                double rel_tol = 1e-9) {
  CheckRecord rec;
  rec.id = CheckId::kKatoCombination;
  rec.name = "kato-yamabe-combination";
  rec.note = std::string("yamabe source: ") + yamabe_source_name(y.source);
  if (!structure.einstein(einstein_tol)) {
    rec.status = CheckRecord::Status::kNotApplicable;
    rec.note += "; einstein hypothesis fails";
    return rec;
  }
  if (!structure.positive_scalar() || !(y.quotient > 0.0)) {
    rec.status = CheckRecord::Status::kNotApplicable;
    rec.note += "; requires positive scalar curvature and positive Y";
    return rec;
  }

  const double cn = weyl_cubic_constant(N);
  const ScalarField<N> wn = weyl_norm_field(b);
  const auto wn2 = integrate_depth(
      b, [&](Index p) { return std::pow(wn[p], N / 2.0); }, b.margin_first());
  const double lpw = std::pow(wn2.value, 2.0 / N);
  const auto grad_wn = integrate_depth(
      b, [&](Index p) { return b.grad_norm2_of(wn, p); }, b.margin_second());
  const auto rw2 = integrate_depth(
      b, [&](Index p) { return b.scalar(p) * wn[p] * wn[p]; },
      b.margin_first());

  const double bracket1 =
      (N + 1.0) / (N - 1.0) * y.quotient - 8.0 * (N - 1.0) / (N - 2.0) * cn * lpw;
  const double bracket2 = 2.0 / N * y.quotient - 2.0 * cn * lpw;
  const double value = bracket1 * grad_wn.value + bracket2 * rw2.value;
  const double scale = std::abs(bracket1 * grad_wn.value) +
                       std::abs(bracket2 * rw2.value) + 1e-12;

  rec.report = make_report(value, 0.0, rel_tol * scale);
  rec.status = rec.report.satisfied ? CheckRecord::Status::kSatisfied
                                    : CheckRecord::Status::kViolated;
  rec.values["bracket_gradient"] = bracket1;
  rec.values["bracket_curvature"] = bracket2;
  rec.values["lp_weyl"] = lpw;
  return rec;
}

/// Pointwise pinching hypothesis of the 4-d Bach-flat rigidity theorem,
/// evaluated at every retained grid point; satisfied only if strict at all.
template <int N>
CheckRecord thm11_hypothesis(const CurvatureBundle<N> &b,
                             const StructureReport &structure,
                             double precondition_tol, double margin = 0.0) {
  CheckRecord rec;
  rec.id = CheckId::kPointwisePinching4d;
  rec.name = "pointwise-pinching-4d";
  if constexpr (N != 4) {
    rec.status = CheckRecord::Status::kNotApplicable;
    rec.note = "only defined for n = 4";
    return rec;
  } else {
    if (!structure.positive_scalar() ||
        !structure.constant_scalar(precondition_tol) ||
        !structure.bach_flat(precondition_tol * 10.0)) {
      rec.status = CheckRecord::Status::kNotApplicable;
      rec.note = "requires Bach-flat chart with positive constant scalar curvature";
      return rec;
    }
    const Grid<N> &grid = b.grid();
    const Region<N> window = interior_region(grid, b.margin_first());
    double min_slack = std::numeric_limits<double>::infinity();
    Index arg = -1;
    EstimateReport worst;
    for (Index p = 0; p < grid.size(); ++p) {
      if (!window.contains(grid.unflatten(p))) continue;
      const auto fc = frame_curvature(b, p);
      const auto r =
          pointwise_pinching_thm11<4>(fc.weyl, fc.ric0, fc.scalar, margin);
      if (r.slack < min_slack) {
        min_slack = r.slack;
        worst = r;
        arg = p;
      }
    }
    rec.report = worst;
    if (arg >= 0) {
      EstimateReport::Witness w;
      w.flat_index = arg;
      const auto x = grid.coords(arg);
      w.coords.assign(x.begin(), x.end());
      rec.report.witness = w;
    }
    rec.status = rec.report.satisfied ? CheckRecord::Status::kSatisfied
                                      : CheckRecord::Status::kViolated;
    return rec;
  }
}

/// Remark chain at the worst point of the norm-sum condition.
template <int N>
CheckRecord remark_chain_record(const CurvatureBundle<N> &b) {
  CheckRecord rec;
  rec.id = CheckId::kRemarkChain4d;
  rec.name = "remark-chain-4d";
  if constexpr (N != 4) {
    rec.status = CheckRecord::Status::kNotApplicable;
    rec.note = "only defined for n = 4";
    return rec;
  } else {
    const Grid<N> &grid = b.grid();
    const Region<N> window = interior_region(grid, b.margin_first());
    double min_slack = std::numeric_limits<double>::infinity();
    RemarkChainReport worst;
    bool all_chain = true;
    for (Index p = 0; p < grid.size(); ++p) {
      if (!window.contains(grid.unflatten(p))) continue;
      const auto fc = frame_curvature(b, p);
      const auto r = remark1_chain<4>(fc.weyl, fc.ric0, fc.scalar);
      all_chain &= r.sum_vs_sqrt.satisfied;
      if (r.norm_sum.slack < min_slack) {
        min_slack = r.norm_sum.slack;
        worst = r;
      }
    }
    rec.report = worst.norm_sum;
    rec.status = rec.report.satisfied ? CheckRecord::Status::kSatisfied
                                      : CheckRecord::Status::kViolated;
    rec.values["squared_chain_slack"] = worst.squared_chain.slack;
    rec.values["sqrt_bound_slack"] = worst.sqrt_bound.slack;
    rec.values["chain_inequality_all_points"] = all_chain ? 1.0 : 0.0;
    rec.values["constant_lhs"] = worst.constant_lhs;
    rec.values["constant_rhs"] = worst.constant_rhs;
    rec.values["constant_comparison"] = worst.constant_comparison ? 1.0 : 0.0;
    return rec;
  }
}

/// L^{n/2} pinching hypothesis of the Bach-flat rigidity theorem.
template <int N>
CheckRecord thm12_hypothesis(const CurvatureBundle<N> &b,
                             const StructureReport &structure,
                             const YamabeEstimate &y, double precondition_tol) {
  CheckRecord rec;
  rec.id = CheckId::kLpPinching;
  rec.name = "lp-pinching";
  rec.note = std::string("yamabe source: ") + yamabe_source_name(y.source);
  if (N > 6) {
    rec.status = CheckRecord::Status::kNotApplicable;
    rec.note += "; only stated for 4 <= n <= 6";
    return rec;
  }
  if (!structure.positive_scalar() ||
      !structure.constant_scalar(precondition_tol) ||
      !structure.bach_flat(precondition_tol * 10.0)) {
    rec.status = CheckRecord::Status::kNotApplicable;
    rec.note += "; requires Bach-flat chart with positive constant scalar curvature";
    return rec;
  }
  if (!(y.quotient > 0.0)) {
    rec.status = CheckRecord::Status::kNotApplicable;
    rec.note += "; requires positive Yamabe value";
    return rec;
  }

  const double coeff = std::sqrt(double(N)) / (std::sqrt(8.0) * (N - 2.0));
  const auto lp = integrate_depth(
      b,
      [&](Index p) {
        const auto fc = frame_curvature(b, p);
        Alg4<N> combo = kulkarni_nomizu(fc.ric0, Sym2<N>::identity());
        combo *= coeff;
        combo += fc.weyl;
        return std::pow(std::sqrt(norm2_flat(combo)), N / 2.0);
      },
      b.margin_first());
  const double lhs = std::pow(lp.value, 2.0 / N);
  const ConstantsTable table = constants_table(N);
  const double constant = (N <= 5) ? table.c1 : table.c2;
  const double rhs = constant * y.quotient;

  rec.report.lhs = lhs;
  rec.report.rhs = rhs;
  rec.report.slack = rhs - lhs;
  rec.report.satisfied = lhs < rhs; // strict
  rec.status = rec.report.satisfied ? CheckRecord::Status::kSatisfied
                                    : CheckRecord::Status::kViolated;
  if (!y.rigorous())
    rec.note += "; non-rigorous: Y upper bound on the large side";
  rec.values["constant"] = constant;
  return rec;
}

/// L^2 pinching hypothesis of the 4-d harmonic-curvature rigidity theorem.
template <int N>
CheckRecord thm13_hypothesis(const CurvatureBundle<N> &b,
                             const StructureReport &structure,
                             const YamabeEstimate &y, double harmonic_tol) {
  CheckRecord rec;
  rec.id = CheckId::kHarmonicPinching;
  rec.name = "harmonic-pinching";
  rec.note = std::string("yamabe source: ") + yamabe_source_name(y.source);
  if constexpr (N != 4) {
    rec.status = CheckRecord::Status::kNotApplicable;
    rec.note += "; only stated for n = 4";
    return rec;
  } else {
    if (!structure.harmonic(harmonic_tol)) {
      rec.status = CheckRecord::Status::kNotApplicable;
      rec.note += "; harmonicity residual " +
                  std::to_string(structure.codazzi_residual) + " above tolerance";
      return rec;
    }
    if (!structure.positive_scalar() || !(y.quotient > 0.0)) {
      rec.status = CheckRecord::Status::kNotApplicable;
      rec.note += "; requires positive scalar curvature and positive Y";
      return rec;
    }
    const auto l2 = integrate_depth(
        b,
        [&](Index p) {
          const auto fc = frame_curvature(b, p);
          Alg4<4> combo = kulkarni_nomizu(fc.ric0, Sym2<4>::identity());
          combo *= 1.0 / std::sqrt(2.0);
          combo += fc.weyl;
          return norm2_flat(combo);
        },
        b.margin_first());
    const double rhs = 25.0 / 486.0 * y.quotient * y.quotient;
    rec.report.lhs = l2.value;
    rec.report.rhs = rhs;
    rec.report.slack = rhs - l2.value;
    rec.report.satisfied = l2.value < rhs;
    rec.status = rec.report.satisfied ? CheckRecord::Status::kSatisfied
                                      : CheckRecord::Status::kViolated;
    if (!y.rigorous())
      rec.note += "; non-rigorous: Y upper bound on the large side";
    return rec;
  }
}

/// The two 4-d integral pinching conditions, their Euler-characteristic
/// rewrites, and the Yamabe lower bound.
template <int N>
std::vector<CheckRecord>
corollary21_conditions(const CurvatureBundle<N> &b,
                       const std::optional<YamabeEstimate> &y) {
  static_assert(N == 4, "corollary conditions are 4-dimensional");
  using std::numbers::pi;
  std::vector<CheckRecord> out;
  const auto gb = gauss_bonnet_4d(b);
  const double w2 = gb.integral_w2;
  const double r02 = gb.integral_ric02;
  const double r2 = gb.integral_r2;

  {
    CheckRecord rec;
    rec.id = CheckId::kBachFlatIntegralPinchingA;
    rec.name = "bachflat-integral-pinching-a";
    rec.report = make_report(w2 + 1.25 * r02, r2 / 48.0);
    rec.status = rec.report.satisfied ? CheckRecord::Status::kSatisfied
                                      : CheckRecord::Status::kViolated;
    out.push_back(rec);
  }
  {
    CheckRecord rec;
    rec.id = CheckId::kBachFlatIntegralPinchingB;
    rec.name = "harmonic-integral-pinching-b";
    rec.report = make_report(w2 + 374.0 / 81.0 * r02, 25.0 / 486.0 * r2);
    rec.status = rec.report.satisfied ? CheckRecord::Status::kSatisfied
                                      : CheckRecord::Status::kViolated;
    out.push_back(rec);
  }
  {
    CheckRecord rec;
    rec.id = CheckId::kEulerFormA;
    rec.name = "euler-form-a";
    rec.report = make_report(13.0 / 8.0 * w2 + r2 / 12.0,
                             20.0 * pi * pi * gb.chi_rounded);
    rec.status = rec.report.satisfied ? CheckRecord::Status::kSatisfied
                                      : CheckRecord::Status::kViolated;
    // equivalence with the direct form when chi is the raw integral
    const bool direct = (w2 + 1.25 * r02) <= r2 / 48.0;
    const bool euler_raw = (13.0 / 8.0 * w2 + r2 / 12.0) <=
                           20.0 * pi * pi * gb.chi_estimate;
    rec.values["equivalent_to_direct_form"] = (direct == euler_raw) ? 1.0 : 0.0;
    rec.values["chi_estimate"] = gb.chi_estimate;
    out.push_back(rec);
  }
  {
    CheckRecord rec;
    rec.id = CheckId::kEulerFormB;
    rec.name = "euler-form-b";
    rec.report = make_report(268.0 / 81.0 * w2 + r2 / 3.0,
                             5984.0 / 81.0 * pi * pi * gb.chi_rounded);
    rec.status = rec.report.satisfied ? CheckRecord::Status::kSatisfied
                                      : CheckRecord::Status::kViolated;
    const bool direct = (w2 + 374.0 / 81.0 * r02) <= 25.0 / 486.0 * r2;
    const bool euler_raw = (268.0 / 81.0 * w2 + r2 / 3.0) <=
                           5984.0 / 81.0 * pi * pi * gb.chi_estimate;
    rec.values["equivalent_to_direct_form"] = (direct == euler_raw) ? 1.0 : 0.0;
    out.push_back(rec);
  }
  if (y) {
    CheckRecord rec;
    rec.id = CheckId::kYamabeLowerBound4d;
    rec.name = "yamabe-lower-bound-4d";
    rec.note = std::string("informational; yamabe source: ") +
               yamabe_source_name(y->source);
    rec.report = make_report(r2 - 12.0 * r02, y->quotient * y->quotient);
    rec.status = CheckRecord::Status::kInfo;
    out.push_back(rec);
  }
  return out;
}

/// Max-norm residual of div W = -((n-3)/(n-2)) Cotton over the window.
/// Streams Weyl evaluations; meant for moderate grids.
template <int N>
double weyl_divergence_cotton_residual(const CurvatureBundle<N> &b,
                                       long stride = 1) {
  const Grid<N> &grid = b.grid();
  const Region<N> window = interior_region(grid, b.margin_second());
  const double factor = -double(N - 3) / double(N - 2);
  double mx = 0.0;
  for (Index p = 0; p < grid.size(); p += stride) {
    if (!window.contains(grid.unflatten(p))) continue;
    const auto dw = b.div_weyl(p);
    const auto c = b.cotton(p);
    const auto fr = b.metric().frame(p);
    Tensor3<N> resid;
    for (int k = 0; k < Tensor3<N>::kSize; ++k)
      resid.raw()[k] = dw.raw()[k] - factor * c.raw()[k];
    mx = std::max(mx, std::sqrt(norm2_flat(fr.apply(resid))));
  }
  return mx;
}

/// Bach tensor via second derivatives of streamed Weyl values:
///   B_ij = (1/(n-3)) g^{km} nabla_m (div W)(i,k,j) + (1/(n-2)) W_ikjl Ric^{kl}.
/// Heavy; used as a cross-check of the Cotton route at sampled points.
template <int N>
Sym2<N> bach_via_weyl(const CurvatureBundle<N> &b, Index p) {
  const Grid<N> &grid = b.grid();
  const Stencil &st = b.stencil();
  const auto jet0 = b.jet(p, true);
  const auto pc = point_curvature(jet0);

  const Tensor3<N> dw0 = b.div_weyl(p);
  std::array<std::array<Tensor3<N>, 5>, static_cast<std::size_t>(N)> dwn;
  for (int a = 0; a < N; ++a)
    for (int off = -st.radius; off <= st.radius; ++off) {
      if (off == 0 || st.d1[off + 2] == 0.0) continue;
      dwn[a][off + 2] = b.div_weyl(grid.shift(p, a, off));
    }

  Sym2<N> dd;
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) {
      double s = 0.0;
      for (int mm = 0; mm < N; ++mm) {
        const double inv_h = 1.0 / grid.axis(mm).h();
        for (int k = 0; k < N; ++k) {
          const double gkm = jet0.ginv(k, mm);
          if (gkm == 0.0) continue;
          double d = 0.0;
          for (int off = -st.radius; off <= st.radius; ++off) {
            if (off == 0 || st.d1[off + 2] == 0.0) continue;
            d += st.d1[off + 2] * dwn[mm][off + 2](i, k, j);
          }
          d *= inv_h;
          double corr = 0.0;
          for (int q = 0; q < N; ++q)
            corr += jet0.gamma(q, mm, i) * dw0(q, k, j) +
                    jet0.gamma(q, mm, k) * dw0(i, q, j) +
                    jet0.gamma(q, mm, j) * dw0(i, k, q);
          s += gkm * (d - corr);
        }
      }
      dd.at(i, j) = s;
    }

  Sym2<N> ric_up;
  for (int a = 0; a < N; ++a)
    for (int c = a; c < N; ++c) {
      double s = 0.0;
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l)
          s += jet0.ginv(a, k) * jet0.ginv(c, l) * pc.ric(k, l);
      ric_up.at(a, c) = s;
    }
  Sym2<N> wric;
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) {
      double s = 0.0;
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) s += pc.weyl(i, k, j, l) * ric_up(k, l);
      wric.at(i, j) = s;
    }

  Sym2<N> bach;
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j)
      bach.at(i, j) = dd(i, j) / double(N - 3) + wric(i, j) / double(N - 2);
  return bach;
}

} // namespace curvkit
