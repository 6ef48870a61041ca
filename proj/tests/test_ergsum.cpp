#include "doctest.h"
#include "ergsum.hpp"

#include <cmath>
#include <numeric>

using namespace ergsum;
using exact::Rat;
using toralact::ActionKind;
using toralact::cosine_poly;
using toralact::example_gallery;

static exact::ZMat scalar_mat(long v) {
  exact::ZMat m(1, 1);
  m.at(0, 0) = v;
  return m;
}

TEST_CASE("sample_points: range, exhaustive small case, bad moduli") {
  auto m2 = toralact::action_from_generators({scalar_mat(2)}, ActionKind::Endomorphism);
  auto pts = sample_points(m2, 3, 3000, 7);
  CHECK(pts.count() == 3000);
  long seen[3] = {0, 0, 0};
  for (auto c : pts.coords) {
    REQUIRE(c < 3);
    ++seen[c];
  }
  for (int i = 0; i < 3; ++i) CHECK(seen[i] > 800);  // roughly uniform

  auto big = sample_points(m2, kDefaultModulus, 20000, 9);
  double mean = 0;
  for (auto c : big.coords) mean += double(c);
  mean /= double(big.coords.size());
  double half = double(kDefaultModulus) / 2;
  CHECK(std::abs(mean - half) < 3 * half / std::sqrt(3.0 * 20000));

  CHECK_THROWS_AS(sample_points(m2, 2, 10, 1), bad_modulus_error);   // q | det
  CHECK_THROWS_AS(sample_points(m2, 15, 10, 1), bad_modulus_error);  // composite
}

TEST_CASE("modular context: inverses and powers") {
  auto g = example_gallery("t3-units-a");
  ModContext ctx(g.action, 101);
  // A A^{-1} = I mod q
  std::uint64_t y[3] = {5, 17, 39};
  std::uint64_t y0[3] = {5, 17, 39};
  ctx.apply(ctx.gen[0], y);
  ctx.apply(ctx.gen_inv[0], y);
  for (int i = 0; i < 3; ++i) CHECK(y[i] == y0[i]);

  // power((2,1)) equals the exact matrix B1 reduced mod q
  auto M = ctx.power({2, 1});
  auto B1 = example_gallery("t3-rw").composed[0];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      long e = B1.at(i, j).get_si() % 101;
      if (e < 0) e += 101;
      CHECK(M[size_t(i) * 3 + j] == std::uint64_t(e));
    }
}

TEST_CASE("quenched sums: n = 1 and the 7th-root-of-unity identity") {
  auto m2 = toralact::action_from_generators({scalar_mat(2)}, ActionKind::Endomorphism);
  auto f = cosine_poly(1, {1});

  StepDistribution det;
  det.dim = 1;
  det.steps = {{1}};
  det.weights = {Rat(1)};

  // x = 1/7 on the 7-division lattice; S_3 = cos(2pi/7)+cos(4pi/7)+cos(8pi/7) = -1/2
  ModularPoints pts;
  pts.q = 7;
  pts.rho = 1;
  pts.coords = {1};
  auto steps = pathsim::sample_steps(det, 3, 1);  // deterministic indices
  auto sums = quenched_sums(m2, f, det, steps, pts);
  REQUIRE(sums.size() == 1);
  CHECK(sums[0] == doctest::Approx(-0.5).epsilon(1e-12));

  // n = 1: S_1(x) = f(x)
  ModularPoints p1;
  p1.q = 7;
  p1.rho = 1;
  p1.coords = {2};
  auto s1 = quenched_sums(m2, f, det, {}, p1);
  CHECK(s1[0] == doctest::Approx(std::cos(2 * M_PI * 2.0 / 7.0)).epsilon(1e-12));

  // endomorphism actions reject negative steps
  StepDistribution neg;
  neg.dim = 1;
  neg.steps = {{-1}};
  neg.weights = {Rat(1)};
  ModularPoints p2 = p1;
  CHECK_THROWS_AS(quenched_sums(m2, f, neg, {}, p2), endomorphism_negative_power_error);
}

TEST_CASE("quenched sums equal the local-time factorization exactly") {
  auto g = example_gallery("t3-rw");
  auto f = cosine_poly(3, {1, 0, 0});
  long n = 800;
  std::uint64_t seed = 5;
  auto steps = pathsim::sample_steps(*g.walk, n, seed);
  auto field = pathsim::local_times(*g.walk, n, seed);

  ModularPoints pts = sample_points(g.action, 1009, 3, 11);
  ModularPoints run = pts;  // quenched_sums advances the coordinates in place
  auto sums = quenched_sums(g.action, f, *g.walk, steps, run);

  ModContext ctx(g.action, pts.q);
  toralact::TrigPoly fc = f;
  for (size_t i = 0; i < pts.count(); ++i) {
    double acc = 0;
    for (const auto& [key, cnt] : field.counts) {
      auto site = pointkey::unpack(key, 2);
      auto M = ctx.power({site[0], site[1]});
      std::uint64_t y[3] = {pts.coords[i * 3], pts.coords[i * 3 + 1], pts.coords[i * 3 + 2]};
      ctx.apply(M, y);
      double th = 2 * M_PI * double(y[0]) / double(pts.q);
      acc += double(cnt) * std::cos(th);
    }
    CHECK(sums[i] == doctest::Approx(acc).epsilon(1e-9));
  }
}

TEST_CASE("quenched sums: Haar-zero mean and modulus independence") {
  auto g = example_gallery("t3-rw");
  auto f = cosine_poly(3, {1, 0, 0});
  long n = 2000;
  auto steps = pathsim::sample_steps(*g.walk, n, 3);

  auto run_with = [&](std::uint64_t q) {
    ModularPoints pts = sample_points(g.action, q, 600, 21);
    auto sums = quenched_sums(g.action, f, *g.walk, steps, pts);
    double m = 0, v = 0;
    for (double s : sums) m += s;
    m /= double(sums.size());
    for (double s : sums) v += (s - m) * (s - m);
    v /= double(sums.size() - 1);
    return std::pair<double, double>(m, v);
  };
  auto [m1, v1] = run_with(kDefaultModulus);
  auto [m2, v2] = run_with(2147483629ULL);  // another prime near 2^31

  // mean ~ 0 within 3 sigma; variances agree within Monte Carlo error
  CHECK(std::abs(m1) < 3 * std::sqrt(v1 / 600));
  CHECK(std::abs(m2) < 3 * std::sqrt(v2 / 600));
  CHECK(std::abs(v1 - v2) / v1 < 0.25);
}

TEST_CASE("rotated rectangle sums") {
  auto g = example_gallery("t3-units-a");
  auto f = cosine_poly(3, {1, 0, 0});

  // 1x1 rectangle returns f(x)
  ModularPoints pts = sample_points(g.action, 101, 5, 2);
  auto one = rotated_rectangle_sums(g.action, f, {1, 1}, {0.0, 0.0}, pts);
  for (size_t i = 0; i < pts.count(); ++i)
    CHECK(one[i].real() == doctest::Approx(eval_at_point(f, pts, i)).epsilon(1e-12));

  // theta = 0, 24x24 rectangle: Var(S)/|D| ~ phi_f(0) = 1/2 within 15%
  ModularPoints pts2 = sample_points(g.action, kDefaultModulus, 500, 4);
  long side = 24;
  auto sums = rotated_rectangle_sums(g.action, f, {side, side}, {0.0, 0.0}, pts2);
  double var = 0;
  for (const auto& s : sums) var += std::norm(s);
  var /= double(sums.size());
  double target = 0.5 * double(side * side);
  CHECK(std::abs(var / target - 1.0) < 0.15);

  // random theta against (Fejer * phi_f)(theta) ~ phi_f(theta) for a
  // two-term orbit polynomial with a genuinely non-constant density
  toralact::TrigPoly f2;
  f2.rho = 3;
  auto img = toralact::dual_apply(g.action, {1, 0}, {exact::Int(1), exact::Int(0), exact::Int(0)});
  REQUIRE(img.has_value());
  auto addc = [&](const exact::ZVec& kk, std::complex<double> c) {
    std::vector<long> key(3), mkey(3);
    for (int i = 0; i < 3; ++i) {
      key[i] = long(kk[i].get_si());
      mkey[i] = -key[i];
    }
    f2.coeffs[key] += c;
    f2.coeffs[mkey] += std::conj(c);
  };
  addc({exact::Int(1), exact::Int(0), exact::Int(0)}, {0.5, 0.0});
  addc(*img, {0.25, 0.0});
  auto sd2 = toralact::spectral_density(g.action, f2, 6);
  std::vector<double> theta = {0.37, 0.81};
  auto sums2 = rotated_rectangle_sums(g.action, f2, {side, side}, theta, pts2);
  double var2 = 0;
  for (const auto& s : sums2) var2 += std::norm(s);
  var2 /= double(sums2.size());
  CHECK(std::abs(var2 / (sd2.eval(theta) * side * side) - 1.0) < 0.15);
}

TEST_CASE("barycenter norms: isometry, n = 0, exact vs grid, contraction") {
  auto g235 = example_gallery("t1-baryc-235");
  auto f = cosine_poly(1, {1});

  auto n0 = barycenter_norm_sq(g235.action, f, *g235.walk, 0, 64);
  CHECK(n0.value == doctest::Approx(0.5).epsilon(1e-12));  // ||f||_2^2

  // exact route vs grid route at small n
  for (long n : {1L, 4L, 9L, 12L}) {
    auto ge = barycenter_norm_sq_exact(g235.action, f, *g235.walk, n);
    auto gg = barycenter_norm_sq(g235.action, f, *g235.walk, n, 64);
    CHECK(gg.value == doctest::Approx(ge.value).epsilon(1e-8));
  }

  // contraction: nonincreasing in n
  double prev = n0.value;
  for (long n = 1; n <= 8; ++n) {
    auto v = barycenter_norm_sq_exact(g235.action, f, *g235.walk, n);
    CHECK(v.value <= prev + 1e-12);
    prev = v.value;
  }

  // single automorphism: P is an isometry, the norm never decays
  auto ua = example_gallery("t3-units-a");
  StepDistribution det1;
  det1.dim = 2;
  det1.steps = {{1, 0}};
  det1.weights = {Rat(1)};
  auto f3 = cosine_poly(3, {1, 0, 0});
  for (long n : {1L, 5L, 20L}) {
    auto v = barycenter_norm_sq(ua.action, f3, det1, n, 64);
    CHECK(v.value == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("barycenter decay of the 2-3-5-6-15 operator looks like n^{-3/2}") {
  auto g = example_gallery("t1-baryc-235");
  auto f = cosine_poly(1, {1});
  auto a = barycenter_norm_sq(g.action, f, *g.walk, 100, 128);
  auto b = barycenter_norm_sq(g.action, f, *g.walk, 200, 128);
  double slope = std::log(b.value / a.value) / std::log(2.0);
  CHECK(slope == doctest::Approx(-1.5).epsilon(0.04));
}
