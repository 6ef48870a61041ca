#ifndef TORWALK_CUMULANT_HPP
#define TORWALK_CUMULANT_HPP

// Moment <-> cumulant calculus over set partitions, cumulants of weighted
// sums of a stationary field, empirical cumulants and the summation-sequence
// condition checkers used by the CLT criteria.

#include <functional>
#include <map>

#include "exact.hpp"

namespace cumulant {

struct arity_guard_error : torwalk::error {
  arity_guard_error() : torwalk::error("ArityGuard: order above the partition cap") {}
};

inline constexpr int kMaxArity = 8;

// all set partitions of {0..r-1}; each partition is a list of blocks
const std::vector<std::vector<std::vector<int>>>& partitions(int r);

unsigned long bell_number(int r);

// joint cumulant from a moment oracle m(I), I a sorted index subset:
//   c(X_1..X_r) = sum_partitions (-1)^{p-1} (p-1)! prod m(I_b)
template <class T, class MomentFn>
T joint_cumulant(MomentFn&& m, int r) {
  if (r < 1 || r > kMaxArity) throw arity_guard_error();
  T total = T(0);
  for (const auto& part : partitions(r)) {
    T prod = T(1);
    for (const auto& block : part) prod *= m(block);
    long p = long(part.size());
    long sign = (p % 2 == 1) ? 1 : -1;
    long fact = 1;
    for (long i = 2; i < p; ++i) fact *= i;
    prod *= T(sign * fact);
    total += prod;
  }
  return total;
}

// moment from a cumulant oracle s(I): m(J_r) = sum_partitions prod s(I_b)
template <class T, class CumulantFn>
T moments_from_cumulants(CumulantFn&& s, int r) {
  if (r < 1 || r > kMaxArity) throw arity_guard_error();
  T total = T(0);
  for (const auto& part : partitions(r)) {
    T prod = T(1);
    for (const auto& block : part) prod *= s(block);
    total += prod;
  }
  return total;
}

// c^{(r)}(Y) for Y = sum_l R(l) X_l, given the translation-invariant field
// cumulant sbar(j_2,...,j_r) = c(X_0, X_{j_2}, ..., X_{j_r}) supported on
// offsets with ||j||_inf <= range. The sum is regrouped by the anchor site.
double weighted_sum_cumulant(
    const std::function<double(const std::vector<std::vector<long>>&)>& sbar,
    const std::map<std::vector<long>, double>& weights, int r, long range);

// plug-in cumulants of a sample: c1 = mean, higher orders from central moments
std::vector<double> empirical_cumulants(const std::vector<double>& samples, int r_max);

// summation-sequence growth profile at one n
struct SummationProfile {
  long n;
  double sum;    // sum_l R_n(l)
  double sup;    // sup_l R_n(l)
  double l2sq;   // sum_l R_n(l)^2
};

// ratio sup^{r-1} sum / (l2sq)^{r/2} per r; the CLT condition needs it -> 0
struct ConditionReport {
  int r;
  std::vector<double> ratios;  // aligned with the profile grid
  bool decreasing;
};
std::vector<ConditionReport> summation_condition_check(
    const std::vector<SummationProfile>& profiles, int r_max);

}  // namespace cumulant

#endif
