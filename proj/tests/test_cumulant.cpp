#include "doctest.h"
#include "cumulant.hpp"

#include <cmath>
#include <random>

using namespace cumulant;
using exact::Rat;

TEST_CASE("partition counts are the Bell numbers") {
  unsigned long bell[] = {1, 1, 2, 5, 15, 52, 203, 877};
  for (int r = 0; r <= 7; ++r) CHECK(bell_number(r) == bell[r]);
  CHECK_THROWS_AS(partitions(9), arity_guard_error);
  // each partition covers {0..r-1} exactly once
  for (int r = 1; r <= 5; ++r)
    for (const auto& part : partitions(r)) {
      std::vector<int> seen(r, 0);
      for (const auto& b : part)
        for (int i : b) ++seen[i];
      for (int i = 0; i < r; ++i) CHECK(seen[i] == 1);
    }
}

TEST_CASE("low-order cumulants: mean and covariance") {
  auto m = [](const std::vector<int>& I) -> double {
    // moments of a single fake table: m({0})=3, m({1})=5, m({0,1})=16
    if (I.size() == 1) return I[0] == 0 ? 3 : 5;
    return 16;
  };
  CHECK(joint_cumulant<double>(m, 1) == 3);
  CHECK(joint_cumulant<double>(m, 2) == doctest::Approx(16 - 15));  // cov
}

// Isserlis moments of a centered Gaussian vector with covariance sigma:
// m(I) = sum over pair matchings of I of prod sigma(i,j); 0 for odd |I|
template <class T, class Cov>
static T isserlis(const std::vector<int>& I, Cov&& sigma) {
  if (I.size() % 2 == 1) return T(0);
  if (I.empty()) return T(1);
  // match I[0] with each other element, recurse
  T total = T(0);
  for (size_t k = 1; k < I.size(); ++k) {
    std::vector<int> rest;
    for (size_t j = 1; j < I.size(); ++j)
      if (j != k) rest.push_back(I[j]);
    total += sigma(I[0], I[k]) * isserlis<T>(rest, sigma);
  }
  return total;
}

TEST_CASE("Gaussian tables: cumulants of order >= 3 vanish exactly") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    // random rational covariance (symmetric, entries small)
    Rat s[6][6];
    for (int i = 0; i < 6; ++i)
      for (int j = i; j < 6; ++j) {
        Rat v(long(rng() % 9) - 4, 1 + long(rng() % 5));
        v.canonicalize();
        s[i][j] = s[j][i] = v;
      }
    auto cov = [&](int i, int j) { return s[i][j]; };
    for (int r = 3; r <= 6; ++r) {
      auto m = [&](const std::vector<int>& I) { return isserlis<Rat>(I, cov); };
      CHECK(joint_cumulant<Rat>(m, r) == Rat(0));
    }
    // r = 2 recovers the covariance entry
    auto m2 = [&](const std::vector<int>& I) { return isserlis<Rat>(I, cov); };
    CHECK(joint_cumulant<Rat>(m2, 2) == s[0][1]);
  }
}

TEST_CASE("moment <-> cumulant round trip is exact on random rational tables") {
  std::mt19937_64 rng(31);
  for (int r = 1; r <= 6; ++r) {
    // random cumulant value per subset of {0..r-1}
    std::map<std::vector<int>, Rat> stab;
    std::function<Rat(const std::vector<int>&)> sfn = [&](const std::vector<int>& I) {
      auto it = stab.find(I);
      if (it != stab.end()) return it->second;
      Rat v(long(rng() % 11) - 5, 1 + long(rng() % 4));
      v.canonicalize();
      stab[I] = v;
      return v;
    };
    // m(I) = sum over partitions of I of prod s(blocks)
    std::function<Rat(const std::vector<int>&)> mfn = [&](const std::vector<int>& I) {
      Rat tot(0);
      for (const auto& part : partitions(int(I.size()))) {
        Rat prod(1);
        for (const auto& block : part) {
          std::vector<int> actual;
          for (int b : block) actual.push_back(I[b]);
          std::sort(actual.begin(), actual.end());
          prod *= sfn(actual);
        }
        tot += prod;
      }
      return tot;
    };
    std::vector<int> full(r);
    for (int i = 0; i < r; ++i) full[i] = i;
    CHECK(joint_cumulant<Rat>(mfn, r) == sfn(full));
    CHECK(moments_from_cumulants<Rat>(
              [&](const std::vector<int>& block) {
                std::vector<int> b = block;
                std::sort(b.begin(), b.end());
                return sfn(b);
              },
              r) == mfn(full));
  }
}

TEST_CASE("multilinearity in one slot (exact)") {
  std::mt19937_64 rng(41);
  int r = 4;
  std::map<std::vector<int>, Rat> mx, my;
  auto table_value = [&](std::map<std::vector<int>, Rat>& tab, const std::vector<int>& I) {
    auto it = tab.find(I);
    if (it != tab.end()) return it->second;
    Rat v(long(rng() % 11) - 5, 1 + long(rng() % 4));
    v.canonicalize();
    tab[I] = v;
    return v;
  };
  // shared values on subsets without index 0, separate X/Y values otherwise
  auto mX = [&](const std::vector<int>& I) { return table_value(mx, I); };
  auto mY = [&](const std::vector<int>& I) {
    return (!I.empty() && I[0] == 0) ? table_value(my, I) : table_value(mx, I);
  };
  auto mSum = [&](const std::vector<int>& I) {
    return (!I.empty() && I[0] == 0) ? mX(I) + mY(I) : mX(I);
  };
  Rat scale(7, 3);
  scale.canonicalize();
  auto mScaled = [&](const std::vector<int>& I) {
    return (!I.empty() && I[0] == 0) ? scale * mX(I) : mX(I);
  };
  CHECK(joint_cumulant<Rat>(mSum, r) ==
        joint_cumulant<Rat>(mX, r) + joint_cumulant<Rat>(mY, r));
  CHECK(joint_cumulant<Rat>(mScaled, r) == scale * joint_cumulant<Rat>(mX, r));
}

TEST_CASE("weighted_sum_cumulant: delta weight and brute force") {
  // R = delta_0 recovers the single-site cumulant
  std::map<std::vector<long>, double> delta = {{{0}, 1.0}};
  auto sbar3 = [](const std::vector<std::vector<long>>& offs) -> double {
    // synthetic finite-range third-order cumulant, range 3
    double v = 1.0;
    for (const auto& j : offs) {
      if (std::labs(j[0]) > 3) return 0.0;
      v *= std::exp(-0.3 * std::labs(j[0])) * (j[0] >= 0 ? 1.0 : 0.7);
    }
    return v;
  };
  CHECK(weighted_sum_cumulant(sbar3, delta, 3, 3) == doctest::Approx(1.0));

  // random weights on a 1-d window vs the direct triple sum
  std::mt19937_64 rng(51);
  std::map<std::vector<long>, double> R;
  for (long l = 0; l < 9; ++l) R[{l}] = double(rng() % 100) / 50.0;
  double brute = 0;
  for (long a = 0; a < 9; ++a)
    for (long b = 0; b < 9; ++b)
      for (long c = 0; c < 9; ++c)
        brute += sbar3({{b - a}, {c - a}}) * R[{a}] * R[{b}] * R[{c}];
  double grouped = weighted_sum_cumulant(sbar3, R, 3, 3 + 0);
  CHECK(grouped == doctest::Approx(brute).epsilon(1e-12));

  // r = 2: quadratic form sum_p cov(p) (R * Rcheck)(p)
  auto cov = [](const std::vector<std::vector<long>>& offs) -> double {
    long j = offs[0][0];
    return std::labs(j) <= 2 ? 1.0 / (1 + std::labs(j)) : 0.0;
  };
  double brute2 = 0;
  for (long a = 0; a < 9; ++a)
    for (long b = 0; b < 9; ++b) brute2 += cov({{b - a}}) * R[{a}] * R[{b}];
  CHECK(weighted_sum_cumulant(cov, R, 2, 2) == doctest::Approx(brute2).epsilon(1e-12));
}

TEST_CASE("empirical cumulants") {
  std::vector<double> constant(200, 2.5);
  auto c = empirical_cumulants(constant, 4);
  CHECK(c[0] == doctest::Approx(2.5));
  for (int r = 2; r <= 4; ++r) CHECK(c[r - 1] == doctest::Approx(0.0));

  std::mt19937_64 rng(61);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> normals(100000);
  for (auto& x : normals) x = gauss(rng);
  auto cn = empirical_cumulants(normals, 4);
  CHECK(std::abs(cn[2]) < 0.05);
  CHECK(std::abs(cn[3]) < 0.1);

  std::exponential_distribution<double> expo(1.0);
  std::vector<double> exps(100000);
  for (auto& x : exps) x = expo(rng);
  auto ce = empirical_cumulants(exps, 3);
  CHECK(ce[2] == doctest::Approx(2.0).epsilon(0.10));  // c3 of Exp(1) is 2
}

TEST_CASE("summation condition checker") {
  // Folner rectangles: sup = 1, sum = l2^2 = |D_n|
  std::vector<SummationProfile> folner;
  for (long n : {1000L, 10000L, 100000L})
    folner.push_back({n, double(n), 1.0, double(n)});
  for (const auto& rep : summation_condition_check(folner, 4)) {
    CHECK(rep.decreasing);
    for (size_t i = 0; i < folner.size(); ++i) {
      double n = folner[i].sum;
      CHECK(rep.ratios[i] == doctest::Approx(std::pow(n, 1.0 - rep.r / 2.0)));
    }
  }

  // barycenter profile: sup ~ n^{-d0/2}, sum = 1, l2^2 ~ n^{-d0/2}
  std::vector<SummationProfile> baryc;
  for (long n : {1000L, 10000L, 100000L})
    baryc.push_back({n, 1.0, std::pow(n, -1.5), std::pow(n, -1.5)});
  for (const auto& rep : summation_condition_check(baryc, 4)) CHECK(rep.decreasing);
}
