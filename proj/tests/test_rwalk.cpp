#include "doctest.h"
#include "rwalk.hpp"

#include <cmath>
#include <random>

using namespace rwalk;
using exact::Int;
using exact::Rat;

static StepDistribution walk51() {
  StepDistribution nu;
  nu.dim = 2;
  nu.steps = {{2, 1}, {1, -2}, {-3, 1}};
  nu.weights = {Rat(1, 3), Rat(1, 3), Rat(1, 3)};
  for (auto& w : nu.weights) w.canonicalize();
  return nu;
}

static StepDistribution walk_pm1(Rat up = Rat(1, 2)) {
  StepDistribution nu;
  nu.dim = 1;
  nu.steps = {{1}, {-1}};
  up.canonicalize();
  nu.weights = {up, 1 - up};
  return nu;
}

static StepDistribution walk_simple3d() {
  StepDistribution nu;
  nu.dim = 3;
  nu.steps = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  nu.weights.assign(6, Rat(1, 6));
  for (auto& w : nu.weights) w.canonicalize();
  return nu;
}

TEST_CASE("analyze: the 2-d three-step walk") {
  auto an = analyze(walk51());
  CHECK(an.classification == WalkClass::RecurrentD2);
  CHECK(an.centered);
  CHECK(an.mean == exact::QVec{Rat(0), Rat(0)});
  CHECK(*zlattice::lattice_index(an.L) == 5);
  CHECK(*zlattice::lattice_index(an.D) == 15);
  CHECK(an.a0 == 15);
  CHECK(an.quotient_v == 3);
  CHECK(an.lambda.at(0, 0) == Rat(14, 3));
  CHECK(an.lambda.at(0, 1) == Rat(-1));
  CHECK(an.lambda.at(1, 1) == Rat(2));
  CHECK(an.lambda_det == Rat(25, 3));
  CHECK(an.gamma.order == 5);
  CHECK(an.gamma1_discrete.order == 15);
  CHECK(!an.has_circle_component);
}

TEST_CASE("analyze: simple 1-d walk and deterministic walk") {
  auto an = analyze(walk_pm1());
  CHECK(an.classification == WalkClass::RecurrentD1);
  CHECK(an.a0 == 2);
  CHECK(an.lambda.at(0, 0) == Rat(1));
  CHECK(an.gamma.order == 1);
  CHECK(an.gamma1_discrete.order == 2);

  StepDistribution det;
  det.dim = 1;
  det.steps = {{1}};
  det.weights = {Rat(1)};
  auto ad = analyze(det);
  CHECK(ad.classification == WalkClass::Deterministic);
  CHECK(ad.D.rank == 0);
  CHECK(ad.has_circle_component);

  StepDistribution bad;
  bad.dim = 2;
  bad.steps = {{2, 4}, {1, 2}};
  bad.weights = {Rat(1, 2), Rat(1, 2)};
  for (auto& w : bad.weights) w.canonicalize();
  CHECK_THROWS_AS(analyze(bad), not_reduced_error);
}

TEST_CASE("det(Lambda) = 225 prod p_j on the three-step support (exact)") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    long a = 1 + long(rng() % 20), b = 1 + long(rng() % 20), c = 1 + long(rng() % 20);
    Rat p1(a, a + b + c), p2(b, a + b + c), p3(c, a + b + c);
    p1.canonicalize();
    p2.canonicalize();
    p3.canonicalize();
    StepDistribution nu;
    nu.dim = 2;
    nu.steps = {{2, 1}, {1, -2}, {-3, 1}};
    nu.weights = {p1, p2, p3};
    auto an = analyze(nu);
    CHECK(an.lambda_det == Rat(225) * p1 * p2 * p3);
  }
}

TEST_CASE("psi: values and exact annulator predicates") {
  auto nu = walk51();
  CHECK(std::abs(psi(nu, {0.0, 0.0}) - std::complex<double>(1, 0)) < 1e-15);

  auto pm = walk_pm1();
  CHECK(std::abs(psi(pm, {0.5}) - std::complex<double>(-1, 0)) < 1e-15);

  auto an = analyze(nu);
  for (const auto& t : an.gamma.points) CHECK(psi_is_one(nu, t));
  for (const auto& t : an.gamma1_discrete.points) CHECK(psi_modulus_one(nu, t));

  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> t = {double(rng() % 100000) / 100000.0,
                             double(rng() % 100000) / 100000.0};
    double m = std::abs(psi(nu, t));
    CHECK(m <= 1.0 + 1e-12);
    // |Psi| = 1 only on the 15 rational points of Gamma_1
    bool near = false;
    for (const auto& g : an.gamma1_discrete.points) {
      double dx = std::abs(t[0] - g[0].get_d()), dy = std::abs(t[1] - g[1].get_d());
      dx = std::min(dx, 1 - dx);
      dy = std::min(dy, 1 - dy);
      if (dx * dx + dy * dy < 1e-6) near = true;
    }
    if (!near) CHECK(m < 1.0 - 1e-9);
  }
}

TEST_CASE("exact_distribution: binomial values and exact moments") {
  auto pm = walk_pm1();
  auto d2 = exact_distribution(pm, 2);
  CHECK(d2.prob({0}) == Rat(1, 2));
  CHECK(d2.prob({2}) == Rat(1, 4));
  CHECK(d2.prob({-2}) == Rat(1, 4));
  CHECK(d2.prob({1}) == Rat(0));

  auto d50 = exact_distribution(pm, 50);
  Int num;
  mpz_bin_uiui(num.get_mpz_t(), 50, 25);
  Rat expect(num, Int(1) << 50);
  expect.canonicalize();
  CHECK(d50.prob({0}) == expect);

  // support lies in D + n l_1; first and second moments are exact
  auto nu = walk51();
  auto an = analyze(nu);
  long n = 5;
  auto dist = exact_distribution(nu, n);
  Rat m0, m1, c00, c01, c11;
  for (const auto& [key, numv] : dist.numer) {
    auto p = dist.unpack(key);
    exact::ZVec off(2);
    for (int i = 0; i < 2; ++i) off[i] = Int(p[i]) - Int(n) * Int(nu.steps[0][i]);
    CHECK(zlattice::contains(an.D, off));
    Rat pr(numv, dist.denom);
    pr.canonicalize();
    m0 += pr * Rat(p[0]);
    m1 += pr * Rat(p[1]);
    c00 += pr * Rat(p[0]) * Rat(p[0]);
    c01 += pr * Rat(p[0]) * Rat(p[1]);
    c11 += pr * Rat(p[1]) * Rat(p[1]);
  }
  CHECK(m0 == Rat(0));
  CHECK(m1 == Rat(0));
  CHECK(c00 == Rat(n) * an.lambda.at(0, 0));
  CHECK(c01 == Rat(n) * an.lambda.at(0, 1));
  CHECK(c11 == Rat(n) * an.lambda.at(1, 1));
}

TEST_CASE("grid_return_probs agrees with the exact convolution") {
  auto pm = walk_pm1();
  auto probs = grid_return_probs(pm, 50, {0}, 512);
  CHECK(probs[0] == 1.0);
  auto d50 = exact_distribution(pm, 50);
  CHECK(std::abs(probs[50] - d50.prob_d({0})) < 1e-12);
  CHECK(std::abs(probs[49] - 0.0) < 1e-12);

  auto nu = walk51();
  auto probs2 = grid_return_probs(nu, 40, {0, 0}, 256);
  for (long k = 1; k <= 40; ++k) {
    auto dk = exact_distribution(nu, k);
    CHECK(std::abs(probs2[k] - dk.prob_d({0, 0})) < 1e-10);
  }
  auto single = grid_return_prob(nu, 30, {0, 0}, 256);
  auto d30 = exact_distribution(nu, 30);
  CHECK(std::abs(single.value - d30.prob_d({0, 0})) < 1e-10);
}

TEST_CASE("llt_main_term: constants and coset vanishing") {
  auto pm = analyze(walk_pm1());
  double v = llt_main_term(pm, 50, {0});
  CHECK(v == doctest::Approx(2.0 / std::sqrt(100 * M_PI)).epsilon(1e-12));
  CHECK(llt_main_term(pm, 49, {0}) == 0.0);

  auto an = analyze(walk51());
  double expect = 15.0 * std::sqrt(3.0 / 25.0) / (2 * M_PI * 300);
  CHECK(llt_main_term(an, 300, {0, 0}) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(llt_main_term(an, 301, {0, 0}) == 0.0);

  // ratio to the true probability approaches 1
  auto d300 = exact_distribution(walk51(), 300);
  double ratio = d300.prob_d({0, 0}) / llt_main_term(an, 300, {0, 0});
  CHECK(ratio > 0.95);
  CHECK(ratio < 1.05);
}

TEST_CASE("step_progression") {
  auto an = analyze(walk51());
  auto pr = step_progression(an, {0, 0});
  REQUIRE(pr.has_value());
  CHECK(pr->offset == 0);
  CHECK(pr->period == 3);
  CHECK(!step_progression(an, {1, 0}).has_value());

  auto pm = analyze(walk_pm1());
  auto pr2 = step_progression(pm, {0});
  REQUIRE(pr2.has_value());
  CHECK(pr2->period == 2);
  CHECK(pr2->contains(4));
  CHECK(!pr2->contains(5));
}

TEST_CASE("renewal quantities for the drift walk (3/4, 1/4)") {
  auto nu = walk_pm1(Rat(3, 4));
  auto an = analyze(nu);
  CHECK(an.classification == WalkClass::Transient);
  CHECK(K_constant(an) == Rat(2));

  // c_w = 1 exactly for this walk (I(0) = 3 = c_w + K)
  double cw = c_w(nu);
  CHECK(cw == doctest::Approx(1.0).epsilon(1e-7));

  // I(0)=3, I(1)=8/3, I(5)=488/243; truncation error is exponentially small
  auto i0 = green_sum(nu, {0}, 400, 1024);
  auto i1 = green_sum(nu, {1}, 400, 1024);
  auto i5 = green_sum(nu, {5}, 400, 1024);
  CHECK(i0.value == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(i1.value == doctest::Approx(8.0 / 3.0).epsilon(1e-9));
  CHECK(i5.value == doctest::Approx(488.0 / 243.0).epsilon(1e-9));

  // Riemann-Lebesgue: I(p) -> K for large |p|
  auto i50 = green_sum(nu, {50}, 400, 1024);
  CHECK(std::abs(i50.value - 2.0) < 0.05);

  CHECK_THROWS_AS(c_w(walk_pm1()), not_transient_error);
  CHECK_THROWS_AS(green_sum(walk_pm1(), {0}, 100, 64), not_transient_error);
}

TEST_CASE("renewal consistency for the 3-d simple walk") {
  auto nu = walk_simple3d();
  // Green sum 1 + 2 sum_{k<=2000} P(Z_k=0) with LLT tail vs Watson's constant
  auto g = green_sum(nu, {0, 0, 0}, 2000, 320);
  CHECK(g.value == doctest::Approx(2.0327721184).epsilon(1.5e-3));
  // quadrature of w gives the same constant (K = 0 in d=3)
  double cw = c_w(nu, 32, 1e-6, 512);
  auto an = analyze(nu);
  CHECK(K_constant(an) == Rat(0));
  CHECK(std::abs(cw - g.value) < 1e-2);
}

TEST_CASE("w_density basics") {
  auto nu = walk_pm1(Rat(3, 4));
  CHECK(w_density(nu, {0.25}) >= 0.0);
  CHECK_THROWS_AS(w_density(nu, {0.0}), singularity_error);

  StepDistribution det;
  det.dim = 1;
  det.steps = {{1}};
  det.weights = {Rat(1)};
  CHECK(w_density(det, {0.3}) == 0.0);
  CHECK(c_w(det) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("expected self-intersections: exact and grid routes") {
  auto pm = walk_pm1();
  // E V_3 = 3 + 2*(3-1)*P(Z_1=0) + 2*(3-2)*P(Z_2=0) = 3 + 0 + 1 = 4,
  // verified against the full 8-path enumeration by hand
  CHECK(expected_self_intersections_exact(pm, 3, {0}) == Rat(4));
  CHECK(expected_self_intersections_exact(pm, 1, {0}) == Rat(1));
  auto gv = expected_self_intersections(pm, 3, {0}, 256);
  CHECK(gv.value == doctest::Approx(4.0).epsilon(1e-10));

  auto nu = walk51();
  auto e_exact = expected_self_intersections_exact(nu, 60, {0, 0});
  auto e_grid = expected_self_intersections(nu, 60, {0, 0}, 1024);
  CHECK(e_grid.value == doctest::Approx(e_exact.get_d()).epsilon(1e-9));

  // E V_{n,p} / E V_{n,0} -> 1 for p in L, at a 1/log n rate; the value at
  // n = 10^4 is frozen from an independent convolution + LLT-tail oracle
  long n = 10000;
  auto ev0 = expected_self_intersections(nu, n, {0, 0}, 4096);
  auto evp = expected_self_intersections(nu, n, {1, 3}, 4096);
  CHECK(evp.value / ev0.value == doctest::Approx(0.7074).epsilon(3e-3));
  auto ev0s = expected_self_intersections(nu, 1000, {0, 0}, 2048);
  auto evps = expected_self_intersections(nu, 1000, {1, 3}, 2048);
  CHECK(evps.value / ev0s.value < evp.value / ev0.value);  // increasing toward 1
}

TEST_CASE("limit_kernel: the four classification branches") {
  auto an51 = analyze(walk51());
  auto k51 = limit_kernel(an51);
  CHECK(k51.norm_kind == KernelMeasure::Normalization::CnLogN);
  CHECK(k51.atoms.size() == 5);
  CHECK(k51.atom_mass() == doctest::Approx(1.0).epsilon(1e-12));
  // E V_n ~ C n log n with C = Card(Gamma) det^{-1/2} / pi = sqrt(3)/pi
  CHECK(k51.C == doctest::Approx(std::sqrt(3.0) / M_PI).epsilon(1e-12));
  // consistency with the expected self-intersection count at n = 10^4
  long n = 10000;
  auto ev = expected_self_intersections(walk51(), n, {0, 0}, 4096);
  CHECK(ev.value / (k51.C * n * std::log(double(n))) == doctest::Approx(1.0).epsilon(0.05));

  auto kd1 = limit_kernel(analyze(walk_pm1()));
  CHECK(kd1.norm_kind == KernelMeasure::Normalization::PathDependentVn);
  CHECK(kd1.atoms.size() == 1);

  StepDistribution det;
  det.dim = 1;
  det.steps = {{1}};
  det.weights = {Rat(1)};
  auto kdet = limit_kernel(analyze(det));
  CHECK(kdet.C == 1.0);
  CHECK(kdet.atoms.size() == 1);
  CHECK(!kdet.has_density);

  auto k3 = limit_kernel(analyze(walk_simple3d()));
  CHECK(k3.has_density);
  CHECK(k3.atoms.empty());
  CHECK(k3.C == doctest::Approx(2.0327721184).epsilon(5e-3));

  auto kdrift = limit_kernel(analyze(walk_pm1(Rat(3, 4))));
  CHECK(kdrift.C == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(kdrift.atoms.size() == 1);
  CHECK(kdrift.atoms[0].second == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("barycenter_symmetrize") {
  auto s = barycenter_symmetrize(walk_pm1(Rat(3, 4)));
  REQUIRE(s.steps.size() == 3);
  CHECK(s.steps[0] == std::vector<long>{-2});
  CHECK(s.weights[0] == Rat(3, 16));
  CHECK(s.steps[1] == std::vector<long>{0});
  CHECK(s.weights[1] == Rat(5, 8));
  CHECK(s.steps[2] == std::vector<long>{2});
  CHECK(s.weights[2] == Rat(3, 16));

  // the 2-3-5-6-15 multiplicative barycenter: 17-point symmetric support
  StepDistribution b;
  b.dim = 3;
  b.steps = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {0, 1, 1}};
  b.weights = {Rat(1, 8), Rat(2, 8), Rat(1, 8), Rat(3, 8), Rat(1, 8)};
  for (auto& w : b.weights) w.canonicalize();
  auto sb = barycenter_symmetrize(b);
  CHECK(sb.steps.size() == 17);
  Rat tot(0);
  for (auto& w : sb.weights) tot += w;
  CHECK(tot == Rat(1));
  // symmetric support
  for (const auto& st : sb.steps) {
    std::vector<long> neg(st.size());
    for (size_t i = 0; i < st.size(); ++i) neg[i] = -st[i];
    bool found = false;
    for (const auto& st2 : sb.steps) found = found || st2 == neg;
    CHECK(found);
  }

  StepDistribution det;
  det.dim = 1;
  det.steps = {{1}};
  det.weights = {Rat(1)};
  auto sd = barycenter_symmetrize(det);
  CHECK(sd.steps.size() == 1);
  CHECK(sd.steps[0] == std::vector<long>{0});
}

TEST_CASE("gamma1_measure of a two-generator average has a circle component") {
  StepDistribution two;
  two.dim = 2;
  two.steps = {{1, 0}, {0, 1}};
  two.weights = {Rat(1, 2), Rat(1, 2)};
  for (auto& w : two.weights) w.canonicalize();
  auto an = analyze(two);
  CHECK(an.d0_w == 1);
  CHECK(an.has_circle_component);
  auto g1 = gamma1_measure(an);
  REQUIRE(g1.circle.has_value());
  CHECK(g1.atoms.empty());
  // direction spans the annulator line of D = Z(1,-1): t1 = t2 on the circle
  const auto& dir = g1.circle->direction;
  CHECK(dir[0] == dir[1]);

  // stored restriction satisfies lambda * B = B * lambda0 exactly
  REQUIRE(an.lambda0_in_dbasis.rows == 1);
  for (int i = 0; i < 2; ++i) {
    Rat lhs(0);
    for (int k = 0; k < 2; ++k) lhs += an.lambda.at(i, k) * Rat(an.D.basis.at(k, 0));
    CHECK(lhs == Rat(an.D.basis.at(i, 0)) * an.lambda0_in_dbasis.at(0, 0));
  }
}
