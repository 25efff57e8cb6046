#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "curvkit/tensor_ops.hpp"

using namespace curvkit;

namespace {

// Test-side oracle: naive Kulkarni-Nomizu product evaluated entry by entry,
// independent of the library routine.
template <int N>
double kn_entry(const Sym2<N> &a, const Sym2<N> &b, int i, int j, int k, int l) {
  return a(i, k) * b(j, l) - a(i, l) * b(j, k) + a(j, l) * b(i, k) -
         a(j, k) * b(i, l);
}

// Test-side oracle: brute-force squared norm over all index tuples.
template <int N> double brute_norm2_kn(const Sym2<N> &a, const Sym2<N> &b) {
  double s = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) {
          const double v = kn_entry(a, b, i, j, k, l);
          s += v * v;
        }
  return s;
}

template <int N> Sym2<N> random_sym2(std::mt19937_64 &rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  Sym2<N> s;
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) s.at(i, j) = d(rng);
  return s;
}

} // namespace

TEST_CASE("kulkarni-nomizu of identities matches direct substitution") {
  const auto id = Sym2<4>::identity();
  const auto kn = kulkarni_nomizu(id, id);
  CHECK(kn(1, 2, 1, 2) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(kn(0, 1, 0, 1) == doctest::Approx(2.0));
  CHECK(kn(0, 1, 1, 0) == doctest::Approx(-2.0));
  CHECK(kn(0, 1, 2, 3) == doctest::Approx(0.0));

  const auto zero = Sym2<4>::zero();
  const auto kn0 = kulkarni_nomizu(id, zero);
  CHECK(kn0.max_abs() == 0.0);
}

TEST_CASE("norm of g o^ g equals 8 n (n-1), frozen from brute force") {
  // brute-force oracle values
  CHECK(brute_norm2_kn<4>(Sym2<4>::identity(), Sym2<4>::identity()) ==
        doctest::Approx(96.0).epsilon(1e-14));
  CHECK(brute_norm2_kn<5>(Sym2<5>::identity(), Sym2<5>::identity()) ==
        doctest::Approx(160.0).epsilon(1e-14));

  CHECK(norm2_flat(kulkarni_nomizu(Sym2<4>::identity(), Sym2<4>::identity())) ==
        doctest::Approx(96.0).epsilon(1e-14));
  CHECK(norm2_flat(kulkarni_nomizu(Sym2<5>::identity(), Sym2<5>::identity())) ==
        doctest::Approx(160.0).epsilon(1e-14));
}

TEST_CASE("kulkarni-nomizu symmetry and bilinearity properties") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const auto a = random_sym2<5>(rng);
    const auto b = random_sym2<5>(rng);
    const auto ab = kulkarni_nomizu(a, b);
    const auto ba = kulkarni_nomizu(b, a);
    for (int k = 0; k < Alg4<5>::kSize; ++k)
      CHECK(ab.raw()[k] == doctest::Approx(ba.raw()[k]).epsilon(1e-14));

    CHECK(ab.measure_violation(kAntisym12) < 1e-13 * std::max(1.0, ab.max_abs()));
    CHECK(ab.measure_violation(kAntisym34) < 1e-13 * std::max(1.0, ab.max_abs()));
    CHECK(ab.measure_violation(kPairSym) < 1e-13 * std::max(1.0, ab.max_abs()));
    CHECK(ab.measure_violation(kBianchi1) < 1e-13 * std::max(1.0, ab.max_abs()));
  }
}

TEST_CASE("inner product: symmetry and zero tensor") {
  std::mt19937_64 rng(11);
  const auto a = kulkarni_nomizu(random_sym2<4>(rng), random_sym2<4>(rng));
  const auto b = kulkarni_nomizu(random_sym2<4>(rng), random_sym2<4>(rng));
  CHECK(inner_flat(a, b) == doctest::Approx(inner_flat(b, a)).epsilon(1e-14));
  Alg4<4> zero;
  CHECK(inner_flat(a, zero) == 0.0);
  CHECK(norm2_flat(a) >= 0.0);
}

TEST_CASE("tracefree projection") {
  const auto id = Sym2<4>::identity();
  SUBCASE("g projects to zero") {
    const auto r = tracefree_project(id, id, id);
    CHECK(r.max_abs() < 1e-15);
  }
  SUBCASE("already tracefree is unchanged") {
    Sym2<4> a = Sym2<4>::diagonal({1.0, -1.0, 2.0, -2.0});
    const auto r = tracefree_project(a);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(r(i, j) == doctest::Approx(a(i, j)));
  }
  SUBCASE("diag(2,0,0,0) maps to diag(3/2,-1/2,-1/2,-1/2)") {
    Sym2<4> a = Sym2<4>::diagonal({2.0, 0.0, 0.0, 0.0});
    const auto r = tracefree_project(a);
    CHECK(r(0, 0) == doctest::Approx(1.5));
    CHECK(r(1, 1) == doctest::Approx(-0.5));
    CHECK(r(2, 2) == doctest::Approx(-0.5));
    CHECK(r(3, 3) == doctest::Approx(-0.5));
    CHECK(trace_flat(r) == doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("weyl extraction kills constant-curvature input") {
  // R_ijkl = K (g_ik g_jl - g_il g_jk) = (K/2) (g o^ g): conformally flat.
  const auto id = Sym2<4>::identity();
  Alg4<4> riem = kulkarni_nomizu(id, id);
  riem *= 0.5 * 3.7; // K = 3.7
  riem = Alg4<4>::project(riem.raw(), kRiemannFlags);
  const Sym2<4> ric = 3.0 * 3.7 * id; // (n-1) K g
  const double r = 4.0 * 3.0 * 3.7;   // n (n-1) K
  const auto w = weyl_from_riemann(riem, ric, r, id);
  CHECK(w.max_abs() < 1e-12);

  Alg4<4> zero;
  zero.set_flags(kRiemannFlags);
  const auto w0 = weyl_from_riemann(zero, Sym2<4>::zero(), 0.0, id);
  CHECK(w0.max_abs() == 0.0);
}

TEST_CASE("weyl extraction rejects inconsistent traces") {
  const auto id = Sym2<4>::identity();
  Alg4<4> riem = kulkarni_nomizu(id, id);
  riem = Alg4<4>::project(riem.raw(), kRiemannFlags);
  // wrong Ricci for this Riemann
  CHECK_THROWS_AS(weyl_from_riemann(riem, 17.0 * id, 24.0, id),
                  std::invalid_argument);
}

TEST_CASE("random weyl-type sampling lands in the symmetry class") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 10; ++rep) {
    const auto w = sample_weyl_type<4>(rng);
    const double scale = std::max(1.0, w.max_abs());
    CHECK(w.measure_violation(kAntisym12) < 1e-12 * scale);
    CHECK(w.measure_violation(kAntisym34) < 1e-12 * scale);
    CHECK(w.measure_violation(kPairSym) < 1e-12 * scale);
    CHECK(w.measure_violation(kBianchi1) < 1e-12 * scale);
    CHECK(w.measure_violation(kTracefree) < 1e-12 * scale);
    CHECK(norm2_flat(w) > 0.0);
  }
  for (int rep = 0; rep < 5; ++rep) {
    const auto w = sample_weyl_type<6>(rng);
    const double scale = std::max(1.0, w.max_abs());
    CHECK(w.measure_violation(kBianchi1) < 1e-12 * scale);
    CHECK(w.measure_violation(kTracefree) < 1e-12 * scale);
  }
}

TEST_CASE("weyl output of weyl_from_riemann is tracefree on random input") {
  std::mt19937_64 rng(29);
  for (int rep = 0; rep < 10; ++rep) {
    // random Riemann-type tensor, identity metric
    std::array<double, Alg4<5>::kSize> raw;
    std::normal_distribution<double> d(0.0, 1.0);
    for (auto &x : raw) x = d(rng);
    const auto riem = Alg4<5>::project(raw, kRiemannFlags);
    const auto id = Sym2<5>::identity();
    const auto ric = ricci_trace_flat(riem);
    const double r = trace_flat(ric);
    const auto w = weyl_from_riemann(riem, ric, r, id);
    const double wmax = std::max(1.0, w.max_abs());
    CHECK(w.measure_violation(kTracefree) < 1e-10 * wmax);
    CHECK(w.measure_violation(kAntisym12) < 1e-12 * wmax);
    CHECK(w.measure_violation(kPairSym) < 1e-12 * wmax);
    CHECK(w.measure_violation(kBianchi1) < 1e-12 * wmax);
  }
}

TEST_CASE("norm identity |R0 o^ R0|^2 == 8|R0|^4 - 8|R0^2|^2") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 25; ++rep) {
    const auto r0 = sample_tracefree_sym2<5>(rng);
    const double lhs = norm2_flat(kulkarni_nomizu(r0, r0));
    const double r2 = norm2_flat(r0);
    const double rhs = 8.0 * r2 * r2 - 8.0 * norm2_flat(square_flat(r0));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("cubic weyl form: zero, oddness, scaling") {
  Alg4<4> zero;
  zero.set_flags(kWeylFlags);
  CHECK(cubic_weyl_form(zero) == 0.0);

  std::mt19937_64 rng(37);
  for (int rep = 0; rep < 10; ++rep) {
    const auto w = sample_weyl_type<4>(rng);
    const double f = cubic_weyl_form(w);
    Alg4<4> neg = w;
    neg *= -1.0;
    CHECK(cubic_weyl_form(neg) == doctest::Approx(-f).epsilon(1e-12));

    std::uniform_real_distribution<double> u(0.1, 3.0);
    const double lam = u(rng);
    Alg4<4> scaled = w;
    scaled *= lam;
    CHECK(cubic_weyl_form(scaled) ==
          doctest::Approx(lam * lam * lam * f).epsilon(1e-12));
  }
}

TEST_CASE("cubic weyl form rejects non-weyl input") {
  const auto id = Sym2<4>::identity();
  auto kn = kulkarni_nomizu(id, id); // not tracefree
  CHECK_THROWS_AS(cubic_weyl_form(kn), std::invalid_argument);
}

TEST_CASE("cubic bound with C(4) on a sample batch") {
  std::mt19937_64 rng(41);
  const double c4 = std::sqrt(6.0) / 4.0;
  for (int rep = 0; rep < 200; ++rep) {
    const auto w = sample_weyl_type<4>(rng);
    const double lhs = cubic_weyl_form(w);
    const double rhs = c4 * std::pow(norm2_flat(w), 1.5);
    CHECK(lhs <= rhs * (1.0 + 1e-12));
  }
}
