#include "cumulant.hpp"

#include <cmath>

namespace cumulant {

const std::vector<std::vector<std::vector<int>>>& partitions(int r) {
  static std::vector<std::vector<std::vector<std::vector<int>>>> cache(kMaxArity + 1);
  if (r < 0 || r > kMaxArity) throw arity_guard_error();
  auto& entry = cache[r];
  if (!entry.empty() || r == 0) {
    if (r == 0 && entry.empty()) entry.push_back({});  // the empty partition
    return entry;
  }
  // enumerate restricted growth strings
  std::vector<int> rgs(r, 0);
  while (true) {
    int blocks = 0;
    for (int i = 0; i < r; ++i) blocks = std::max(blocks, rgs[i] + 1);
    std::vector<std::vector<int>> part(blocks);
    for (int i = 0; i < r; ++i) part[rgs[i]].push_back(i);
    entry.push_back(part);
    // next string: rightmost position that can be incremented
    int i = r - 1;
    for (; i > 0; --i) {
      int maxprev = 0;
      for (int j = 0; j < i; ++j) maxprev = std::max(maxprev, rgs[j]);
      if (rgs[i] <= maxprev) break;
    }
    if (i == 0) break;
    ++rgs[i];
    for (int j = i + 1; j < r; ++j) rgs[j] = 0;
  }
  return entry;
}

unsigned long bell_number(int r) { return partitions(r).size(); }

double weighted_sum_cumulant(
    const std::function<double(const std::vector<std::vector<long>>&)>& sbar,
    const std::map<std::vector<long>, double>& weights, int r, long range) {
  if (r < 1 || r > kMaxArity) throw arity_guard_error();
  if (weights.empty()) return 0;
  int d = int(weights.begin()->first.size());
  if (r == 1) {
    double tot = 0;
    for (const auto& [l, w] : weights) tot += w * sbar({});
    return tot;
  }
  // offsets j_2..j_r in the box ||j||_inf <= range
  long side = 2 * range + 1;
  size_t boxn = 1;
  for (int i = 0; i < d; ++i) boxn *= size_t(side);
  auto decode = [&](size_t code) {
    std::vector<long> j(d);
    for (int i = 0; i < d; ++i) {
      j[i] = long(code % side) - range;
      code /= side;
    }
    return j;
  };
  size_t tuples = 1;
  for (int i = 0; i < r - 1; ++i) tuples *= boxn;

  double total = 0;
  std::vector<std::vector<long>> offs(r - 1);
  std::vector<long> site(d);
  for (size_t code = 0; code < tuples; ++code) {
    size_t c = code;
    for (int i = 0; i < r - 1; ++i) {
      offs[i] = decode(c % boxn);
      c /= boxn;
    }
    double sval = sbar(offs);
    if (sval == 0) continue;
    double acc = 0;
    for (const auto& [l, w] : weights) {
      double prod = w;
      for (int i = 0; i < r - 1 && prod != 0; ++i) {
        for (int dd = 0; dd < d; ++dd) site[dd] = l[dd] + offs[i][dd];
        auto it = weights.find(site);
        prod = (it == weights.end()) ? 0.0 : prod * it->second;
      }
      acc += prod;
    }
    total += sval * acc;
  }
  return total;
}

std::vector<double> empirical_cumulants(const std::vector<double>& samples, int r_max) {
  if (r_max < 1 || r_max > kMaxArity) throw arity_guard_error();
  if (samples.size() < size_t(10 * r_max))
    throw torwalk::error("cumulant: too few samples for the requested order");
  double mean = 0;
  for (double x : samples) mean += x;
  mean /= double(samples.size());
  // central moments m_2..m_r
  std::vector<double> cm(r_max + 1, 0.0);
  for (double x : samples) {
    double p = 1, c = x - mean;
    for (int r = 1; r <= r_max; ++r) {
      p *= c;
      cm[r] += p;
    }
  }
  for (int r = 1; r <= r_max; ++r) cm[r] /= double(samples.size());
  std::vector<double> out(r_max);
  out[0] = mean;
  for (int r = 2; r <= r_max; ++r)
    out[r - 1] = joint_cumulant<double>(
        [&](const std::vector<int>& block) {
          size_t sz = block.size();
          return sz == 1 ? 0.0 : cm[sz];  // centered: m_1 = 0
        },
        r);
  return out;
}

std::vector<ConditionReport> summation_condition_check(
    const std::vector<SummationProfile>& profiles, int r_max) {
  std::vector<ConditionReport> out;
  for (int r = 3; r <= r_max; ++r) {
    ConditionReport rep;
    rep.r = r;
    for (const auto& p : profiles)
      rep.ratios.push_back(std::pow(p.sup, r - 1) * p.sum / std::pow(p.l2sq, r / 2.0));
    rep.decreasing = true;
    for (size_t i = 0; i + 1 < rep.ratios.size(); ++i)
      rep.decreasing = rep.decreasing && rep.ratios[i + 1] < rep.ratios[i];
    out.push_back(rep);
  }
  return out;
}

}  // namespace cumulant
