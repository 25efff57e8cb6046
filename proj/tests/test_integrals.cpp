#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "curvkit/checks.hpp"
#include "curvkit/integrals.hpp"
#include "curvkit/zoo.hpp"

using namespace curvkit;
using std::numbers::pi;

namespace {

ZooGeometry<4> torus(int res) {
  GeometrySpec s;
  s.kind = GeometryKind::kFlatTorus;
  s.dim = 4;
  s.resolution = res;
  return build_geometry<4>(s);
}

ZooGeometry<4> perturbed(int res, double amp = 0.05, std::uint64_t seed = 42) {
  GeometrySpec s;
  s.kind = GeometryKind::kPerturbedTorus;
  s.dim = 4;
  s.resolution = res;
  s.amplitude = amp;
  s.seed = seed;
  return build_geometry<4>(s);
}

ZooGeometry<4> sphere(int res) {
  GeometrySpec s;
  s.kind = GeometryKind::kRoundSphere;
  s.dim = 4;
  s.resolution = res;
  return build_geometry<4>(s);
}

ZooGeometry<4> s2xs2(int res) {
  GeometrySpec s;
  s.kind = GeometryKind::kProductSpheres;
  s.dim = 4;
  s.resolution = res;
  return build_geometry<4>(s);
}

} // namespace

TEST_CASE("theta identity on the flat torus") {
  const auto geo = torus(12);
  CurvatureBundle<4> b(geo.metric, 4);
  const auto phi = random_trig_sym2_field<4>(b.grid(), 99, 3);

  SUBCASE("theta = 0 collapses both sides to zero") {
    const auto r = lemma21_residual(b, phi, 0.0);
    CHECK(std::abs(r.lhs) < 1e-10);
    CHECK(std::abs(r.rhs) < 1e-20);
  }
  SUBCASE("constant phi gives zero") {
    Sym2Field<4> cphi(b.grid().size(), Sym2<4>::diagonal({1.0, 2.0, -1.0, 0.5}));
    const auto r = lemma21_residual(b, cphi, 2.0);
    CHECK(std::abs(r.lhs) < 1e-18);
    CHECK(std::abs(r.rhs) < 1e-18);
  }
  SUBCASE("theta = 2 residual is small at 12^4") {
    const auto r = lemma21_residual(b, phi, 2.0);
    CHECK(r.rel_residual < 5e-3);
    CHECK(std::abs(r.lhs) > 1e-2); // non-degenerate comparison
  }
}

TEST_CASE("theta identity converges under refinement on a perturbed torus") {
  const auto g1 = perturbed(8);
  const auto g2 = perturbed(16);
  CurvatureBundle<4> b1(g1.metric, 4);
  CurvatureBundle<4> b2(g2.metric, 4);
  const auto phi1 = random_trig_sym2_field<4>(b1.grid(), 7, 3);
  const auto phi2 = random_trig_sym2_field<4>(b2.grid(), 7, 3);
  const auto r1 = lemma21_residual(b1, phi1, 2.0);
  const auto r2 = lemma21_residual(b2, phi2, 2.0);
  const double order = std::log2(r1.rel_residual / r2.rel_residual);
  CHECK(r2.rel_residual < r1.rel_residual);
  CHECK(order > 2.0);
}

TEST_CASE("tracefree ricci gradient inequality") {
  SUBCASE("round sphere: both sides vanish") {
    const auto geo = sphere(12);
    CurvatureBundle<4> b(geo.metric, 4);
    const auto rep = lemma21_ricci_inequality(b, -1.0, 1e-6);
    CHECK(std::abs(rep.lhs) < 1e-5);
    CHECK(std::abs(rep.rhs) < 1e-5);
    CHECK(rep.satisfied);
  }
  SUBCASE("perturbed torus: holds with slack for several theta") {
    const auto geo = perturbed(12);
    CurvatureBundle<4> b(geo.metric, 4);
    for (double theta : {-1.0, 0.5, 2.0}) {
      const auto rep = lemma21_ricci_inequality(b, theta);
      CHECK(rep.satisfied);
    }
  }
}

TEST_CASE("bach-flat gradient identity") {
  SUBCASE("flat torus: zero == zero") {
    const auto geo = torus(12);
    CurvatureBundle<4> b(geo.metric, 4);
    const auto st = measure_structure(b, true, false);
    const auto r = lemma22_residual(b, st, 0.05);
    CHECK(std::abs(r.lhs) < 1e-18);
    CHECK(std::abs(r.rhs) < 1e-18);
  }
  SUBCASE("round sphere: both sides small") {
    const auto geo = sphere(14);
    CurvatureBundle<4> b(geo.metric, 4);
    const auto st = measure_structure(b, true, false);
    const auto r = lemma22_residual(b, st, 0.05);
    CHECK(std::abs(r.lhs) < 1e-4);
    CHECK(std::abs(r.rhs) < 1e-4);
  }
  SUBCASE("refuses on a chart that is not Bach-flat") {
    const auto geo = perturbed(12, 0.08, 3);
    CurvatureBundle<4> b(geo.metric, 4);
    auto st = measure_structure(b, true, false);
    st.structurally_bach_flat = false;
    if (st.max_bach > 0.05 * st.curvature_scale()) {
      CHECK_THROWS_AS(lemma22_residual(b, st, 0.05), std::domain_error);
    }
  }
}

TEST_CASE("yamabe quotient") {
  SUBCASE("constant trial on the round sphere approximates the exact value") {
    const auto geo = sphere(16);
    CurvatureBundle<4> b(geo.metric, 4);
    const auto u = constant_trial(b.grid());
    const double q = yamabe_quotient(b, u);
    const double exact = 12.0 * std::sqrt(8.0 * pi * pi / 3.0);
    CHECK(std::abs(q - exact) / exact < 5e-3);
  }
  SUBCASE("scale invariance") {
    const auto geo = perturbed(10);
    CurvatureBundle<4> b(geo.metric, 4);
    auto u = constant_trial(b.grid());
    const double q1 = yamabe_quotient(b, u);
    for (auto &v : u.u) v *= 7.0;
    const double q7 = yamabe_quotient(b, u);
    CHECK(q1 == doctest::Approx(q7).epsilon(1e-12));
  }
}

TEST_CASE("sobolev bound") {
  const auto geo = sphere(14);
  CurvatureBundle<4> b(geo.metric, 4);
  const auto u = constant_trial(b.grid());

  SUBCASE("exact Y at constant u sits at equality") {
    YamabeEstimate y{geo.oracle->exact_yamabe, YamabeSource::kExactKnown};
    const auto rep = sobolev_check(b, u, y, 5e-3);
    CHECK(rep.satisfied);
    CHECK(std::abs(rep.lhs - rep.rhs) / rep.rhs < 5e-3);
  }
  SUBCASE("Y from the same quotient holds by construction") {
    YamabeEstimate y{yamabe_quotient(b, u), YamabeSource::kTrialFunction};
    const auto rep = sobolev_check(b, u, y, 1e-9);
    CHECK(rep.satisfied);
  }
  SUBCASE("rejects nonpositive Y") {
    YamabeEstimate y{-1.0, YamabeSource::kUserSupplied};
    CHECK_THROWS_AS(sobolev_check(b, u, y), std::invalid_argument);
  }
}

TEST_CASE("gauss-bonnet") {
  SUBCASE("flat torus: chi ~ 0") {
    const auto geo = torus(10);
    CurvatureBundle<4> b(geo.metric, 4);
    const auto gb = gauss_bonnet_4d(b);
    CHECK(std::abs(gb.chi_estimate) < 0.02);
    CHECK(gb.chi_rounded == 0);
  }
  SUBCASE("round sphere: chi ~ 2") {
    const auto geo = sphere(16);
    CurvatureBundle<4> b(geo.metric, 4);
    const auto gb = gauss_bonnet_4d(b);
    CHECK(std::abs(gb.chi_estimate - 2.0) < 0.04);
    CHECK(gb.chi_rounded == 2);
    CHECK(gb.rearranged.abs_residual < 0.5); // rearrangement consistent
  }
  SUBCASE("product of unit 2-spheres: chi ~ 4 and |W|^2 = 16/3") {
    const auto geo = s2xs2(16);
    CurvatureBundle<4> b(geo.metric, 4);
    const auto gb = gauss_bonnet_4d(b);
    CHECK(std::abs(gb.chi_estimate - 4.0) < 0.08);
    CHECK(gb.chi_rounded == 4);

    // pointwise |W|^2 on the product of unit spheres
    const Region<4> win = interior_region(b.grid(), b.margin_first());
    for (Index p = 0; p < b.grid().size(); p += 1777) {
      if (!win.contains(b.grid().unflatten(p))) continue;
      const auto fc = frame_curvature(b, p);
      CHECK(norm2_flat(fc.weyl) == doctest::Approx(16.0 / 3.0).epsilon(2e-3));
    }
  }
}

TEST_CASE("structure measurement classifies the zoo") {
  SUBCASE("round sphere is einstein, harmonic, bach-flat") {
    const auto geo = sphere(12);
    CurvatureBundle<4> b(geo.metric, 4);
    auto st = measure_structure(b, true, true);
    st.structurally_einstein = false; // force the measured path
    st.structurally_harmonic = false;
    st.structurally_bach_flat = false;
    CHECK(st.einstein(5e-3));
    CHECK(st.constant_scalar(1e-2));
    CHECK(st.positive_scalar());
    CHECK(st.bach_flat(5e-2));
    CHECK(st.harmonic(1e-2)); // measured codazzi residual at fd tolerance
    CHECK(st.scalar_mean == doctest::Approx(12.0).epsilon(1e-3));
  }
  SUBCASE("perturbed torus fails einstein and harmonicity") {
    const auto geo = perturbed(12);
    CurvatureBundle<4> b(geo.metric, 4);
    const auto st = measure_structure(b, false, true);
    CHECK(!st.einstein(5e-3));
    CHECK(!st.harmonic(1e-6));
    CHECK(!st.constant_scalar(1e-2));
  }
}

TEST_CASE("pointwise pinching classification") {
  SUBCASE("round sphere satisfies strictly") {
    const auto geo = sphere(12);
    CurvatureBundle<4> b(geo.metric, 4);
    auto st = measure_structure(b, true, false);
    const auto rec = thm11_hypothesis(b, st, 1e-2);
    CHECK(rec.status == CheckRecord::Status::kSatisfied);
    // rhs = (2/(3 sqrt 3)) * 12
    CHECK(rec.report.rhs == doctest::Approx(8.0 / std::sqrt(3.0)).epsilon(1e-3));
    CHECK(rec.report.lhs < 1e-2);
  }
  SUBCASE("product of unit spheres violates at every point") {
    const auto geo = s2xs2(12);
    CurvatureBundle<4> b(geo.metric, 4);
    auto st = measure_structure(b, true, false);
    const auto rec = thm11_hypothesis(b, st, 1e-2);
    CHECK(rec.status == CheckRecord::Status::kViolated);
    CHECK(rec.report.lhs == doctest::Approx(std::sqrt(16.0 / 3.0)).epsilon(1e-2));
    CHECK(rec.report.rhs == doctest::Approx(8.0 / (3.0 * std::sqrt(3.0))).epsilon(1e-2));
  }
}

TEST_CASE("lp and harmonic pinching classification with exact Y") {
  SUBCASE("round sphere satisfied") {
    const auto geo = sphere(12);
    CurvatureBundle<4> b(geo.metric, 4);
    auto st = measure_structure(b, true, true);
    YamabeEstimate y{geo.oracle->exact_yamabe, YamabeSource::kExactKnown};
    const auto t12 = thm12_hypothesis(b, st, y, 1e-2);
    CHECK(t12.status == CheckRecord::Status::kSatisfied);
    const auto t13 = thm13_hypothesis(b, st, y, 1e-2);
    CHECK(t13.status == CheckRecord::Status::kSatisfied);
  }
  SUBCASE("product of unit spheres violated with Y = 16 pi") {
    const auto geo = s2xs2(12);
    CurvatureBundle<4> b(geo.metric, 4);
    auto st = measure_structure(b, true, true);
    YamabeEstimate y{16.0 * pi, YamabeSource::kUserSupplied};
    const auto t12 = thm12_hypothesis(b, st, y, 1e-2);
    CHECK(t12.status == CheckRecord::Status::kViolated);
    // lhs ~ sqrt(int |W|^2) = sqrt(16/3 * 16 pi^2) = 16 pi / sqrt(3)
    CHECK(t12.report.lhs ==
          doctest::Approx(16.0 * pi / std::sqrt(3.0)).epsilon(2e-2));
    const auto t13 = thm13_hypothesis(b, st, y, 1e-2);
    CHECK(t13.status == CheckRecord::Status::kViolated);
  }
  SUBCASE("perturbed torus: thm13 refuses on harmonicity") {
    const auto geo = perturbed(10);
    CurvatureBundle<4> b(geo.metric, 4);
    auto st = measure_structure(b, false, true);
    YamabeEstimate y{10.0, YamabeSource::kUserSupplied};
    const auto t13 = thm13_hypothesis(b, st, y, 1e-6);
    CHECK(t13.status == CheckRecord::Status::kNotApplicable);
  }
}

TEST_CASE("corollary conditions on sphere vs product") {
  SUBCASE("round sphere: both conditions satisfied") {
    const auto geo = sphere(14);
    CurvatureBundle<4> b(geo.metric, 4);
    YamabeEstimate y{geo.oracle->exact_yamabe, YamabeSource::kExactKnown};
    const auto recs = corollary21_conditions(b, y);
    REQUIRE(recs.size() == 5);
    CHECK(recs[0].status == CheckRecord::Status::kSatisfied);
    CHECK(recs[1].status == CheckRecord::Status::kSatisfied);
    CHECK(recs[2].status == CheckRecord::Status::kSatisfied);
    CHECK(recs[3].status == CheckRecord::Status::kSatisfied);
    CHECK(recs[2].values.at("equivalent_to_direct_form") == 1.0);
    CHECK(recs[3].values.at("equivalent_to_direct_form") == 1.0);
  }
  SUBCASE("product of unit spheres: both violated") {
    const auto geo = s2xs2(14);
    CurvatureBundle<4> b(geo.metric, 4);
    const auto recs = corollary21_conditions<4>(b, std::nullopt);
    REQUIRE(recs.size() == 4);
    CHECK(recs[0].status == CheckRecord::Status::kViolated);
    CHECK(recs[1].status == CheckRecord::Status::kViolated);
    CHECK(recs[2].status == CheckRecord::Status::kViolated);
    CHECK(recs[3].status == CheckRecord::Status::kViolated);
    CHECK(recs[2].values.at("equivalent_to_direct_form") == 1.0);
    CHECK(recs[3].values.at("equivalent_to_direct_form") == 1.0);
  }
}

TEST_CASE("kato inequalities") {
  SUBCASE("product of unit spheres, einstein case") {
    const auto geo = s2xs2(12);
    CurvatureBundle<4> b(geo.metric, 4);
    const auto st = measure_structure(b, false, false);
    const auto rec = kato_check(b, st, true, 5e-3);
    CHECK(rec.status == CheckRecord::Status::kSatisfied);
  }
  SUBCASE("perturbed torus refuses both hypotheses") {
    const auto geo = perturbed(10);
    CurvatureBundle<4> b(geo.metric, 4);
    const auto st = measure_structure(b, false, true);
    CHECK(kato_check(b, st, true, 5e-3).status ==
          CheckRecord::Status::kNotApplicable);
    CHECK(kato_check(b, st, false, 1e-6).status ==
          CheckRecord::Status::kNotApplicable);
  }
}

TEST_CASE("weyl laplacian identity residual") {
  SUBCASE("flat torus: identically zero") {
    const auto geo = torus(10);
    CurvatureBundle<4> b(geo.metric, 4);
    const auto st = measure_structure(b, false, false);
    CHECK(einstein_weyl_laplacian_residual(b, st, 5e-3) < 1e-10);
  }
  SUBCASE("round sphere: residual at fd noise level") {
    const auto geo = sphere(12);
    CurvatureBundle<4> b(geo.metric, 4);
    const auto st = measure_structure(b, false, false);
    CHECK(einstein_weyl_laplacian_residual(b, st, 5e-3) < 0.05);
  }
  SUBCASE("refuses non-einstein charts") {
    const auto geo = perturbed(10);
    CurvatureBundle<4> b(geo.metric, 4);
    const auto st = measure_structure(b, false, false);
    CHECK_THROWS_AS(einstein_weyl_laplacian_residual(b, st, 5e-3),
                    std::domain_error);
  }
}

TEST_CASE("divergence of weyl matches the cotton tensor") {
  const auto g1 = perturbed(8, 0.05, 11);
  const auto g2 = perturbed(12, 0.05, 11);
  CurvatureBundle<4> b1(g1.metric, 4);
  CurvatureBundle<4> b2(g2.metric, 4);
  const double r1 = weyl_divergence_cotton_residual(b1, 3);
  const double r2 = weyl_divergence_cotton_residual(b2, 5);
  CHECK(r2 < r1);
  const double order = std::log(r1 / r2) / std::log(12.0 / 8.0);
  CHECK(order > 2.0);
}

TEST_CASE("bach two-route agreement on an einstein chart") {
  const auto geo = s2xs2(12);
  CurvatureBundle<4> b(geo.metric, 4);
  const Grid<4> &grid = b.grid();
  const Region<4> win = interior_region(grid, b.margin_third());
  int checked = 0;
  for (Index p = 0; p < grid.size() && checked < 5; p += 2341) {
    if (!win.contains(grid.unflatten(p))) continue;
    ++checked;
    const auto fr = geo.metric->frame(p);
    const auto b1 = fr.apply(b.bach(p));
    const auto b2 = fr.apply(bach_via_weyl(b, p));
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j)
        CHECK(std::abs(b1(i, j) - b2(i, j)) < 5e-2);
    CHECK(std::sqrt(norm2_flat(b1)) < 5e-2); // einstein => bach-flat
  }
  CHECK(checked > 0);
}
