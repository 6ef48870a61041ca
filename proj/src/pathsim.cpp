#include "pathsim.hpp"

#include <cmath>

namespace pathsim {

using exact::Int;
using exact::Rat;

StepSampler::StepSampler(const StepDistribution& nu) {
  nu.validate();
  Rat cum(0);
  Int two64 = Int(1) << 64;
  for (size_t j = 0; j < nu.count(); ++j) {
    cum += nu.weights[j];
    Int t = (cum.get_num() * two64) / cum.get_den();
    if (t >= two64) t = two64 - 1;
    Int lo = t & Int(0xffffffffUL);
    Int hi = (t >> 32) & Int(0xffffffffUL);
    thresholds.push_back((std::uint64_t(hi.get_ui()) << 32) | std::uint64_t(lo.get_ui()));
  }
  thresholds.back() = ~0ULL;
}

std::vector<std::uint8_t> sample_steps(const StepDistribution& nu, long n,
                                       std::uint64_t seed, std::uint64_t stream) {
  if (n < 1) throw torwalk::error("pathsim: n must be >= 1");
  if (nu.count() > 255) throw torwalk::error("pathsim: too many steps for u8 indices");
  StepSampler sampler(nu);
  std::vector<std::uint8_t> out(size_t(n - 1));
  for (long k = 0; k + 1 < n; ++k)
    out[size_t(k)] = std::uint8_t(sampler.draw(rng_u64(seed, stream, std::uint64_t(k))));
  return out;
}

LocalTimeField local_times(const StepDistribution& nu, long n, std::uint64_t seed,
                           std::uint64_t stream) {
  auto steps = sample_steps(nu, n, seed, stream);
  LocalTimeField f;
  f.dim = nu.dim;
  f.n = n;
  f.seed = seed;
  f.counts.reserve(size_t(n));
  std::vector<long> pos(nu.dim, 0);
  ++f.counts[pointkey::pack(pos)];
  for (auto s : steps) {
    for (int i = 0; i < nu.dim; ++i) pos[i] += nu.steps[s][i];
    ++f.counts[pointkey::pack(pos)];
  }
  for (const auto& [k, c] : f.counts) {
    f.v_n += (long long)c * c;
    f.phi_n = std::max(f.phi_n, c);
  }
  return f;
}

std::vector<std::vector<long>> sample_positions(const StepDistribution& nu, long n,
                                                std::uint64_t seed, std::uint64_t stream) {
  auto steps = sample_steps(nu, n, seed, stream);
  std::vector<std::vector<long>> out;
  out.reserve(size_t(n));
  std::vector<long> pos(nu.dim, 0);
  out.push_back(pos);
  for (auto s : steps) {
    for (int i = 0; i < nu.dim; ++i) pos[i] += nu.steps[s][i];
    out.push_back(pos);
  }
  return out;
}

SelfIntersections self_intersections(const LocalTimeField& field,
                                     const std::vector<std::vector<long>>& p_list) {
  SelfIntersections out;
  out.v_n = field.v_n;
  out.phi_n = field.phi_n;
  for (const auto& p : p_list) {
    long long v = 0;
    std::vector<long> q(field.dim);
    for (const auto& [key, c] : field.counts) {
      auto site = pointkey::unpack(key, field.dim);
      for (int i = 0; i < field.dim; ++i) q[i] = site[i] + p[i];
      auto it = field.counts.find(pointkey::pack(q));
      if (it != field.counts.end()) v += (long long)c * it->second;
    }
    out.v_np.push_back(v);
  }
  return out;
}

std::vector<double> empirical_kernel_fourier(const LocalTimeField& field,
                                             const std::vector<std::vector<long>>& p_list) {
  if (field.v_n <= 0) throw torwalk::error("pathsim: empty field");
  auto si = self_intersections(field, p_list);
  std::vector<double> out;
  for (auto v : si.v_np) out.push_back(double(v) / double(field.v_n));
  return out;
}

double kernel_identity_check(const LocalTimeField& field,
                             const std::vector<std::vector<double>>& t_list) {
  // left: |sum_l R(l) e^{2 pi i <l,t>}|^2; right: the same mass regrouped as
  // sum_p V_{n,p} e^{2 pi i <p,t>} over realized differences p
  double worst = 0;
  std::vector<unsigned long long> keys;
  std::vector<long> cnts;
  for (const auto& [k, c] : field.counts) {
    keys.push_back(k);
    cnts.push_back(c);
  }
  std::unordered_map<unsigned long long, long long, pointkey::Hash> vnp;
  std::vector<long> diff(field.dim);
  for (size_t i = 0; i < keys.size(); ++i) {
    auto a = pointkey::unpack(keys[i], field.dim);
    for (size_t j = 0; j < keys.size(); ++j) {
      auto b = pointkey::unpack(keys[j], field.dim);
      for (int d = 0; d < field.dim; ++d) diff[d] = a[d] - b[d];
      vnp[pointkey::pack(diff)] += (long long)cnts[i] * cnts[j];
    }
  }
  for (const auto& t : t_list) {
    std::complex<double> s(0, 0);
    for (size_t i = 0; i < keys.size(); ++i) {
      auto site = pointkey::unpack(keys[i], field.dim);
      double ph = 0;
      for (int d = 0; d < field.dim; ++d) ph += site[d] * t[d];
      s += double(cnts[i]) * std::polar(1.0, 2 * M_PI * ph);
    }
    double left = std::norm(s);

    std::complex<double> r(0, 0);
    for (const auto& [key, v] : vnp) {
      auto p = pointkey::unpack(key, field.dim);
      double ph = 0;
      for (int d = 0; d < field.dim; ++d) ph += p[d] * t[d];
      r += double(v) * std::polar(1.0, 2 * M_PI * ph);
    }
    worst = std::max(worst, std::abs(left - r.real()) + std::abs(r.imag()));
  }
  return worst;
}

std::vector<SupLocalTimeRow> sup_local_time_diagnostic(const StepDistribution& nu,
                                                       const std::vector<long>& n_grid,
                                                       const std::vector<std::uint64_t>& seeds,
                                                       double epsilon) {
  auto an = rwalk::analyze(nu);
  double expo = (an.classification == rwalk::WalkClass::RecurrentD1) ? 0.5 + epsilon : epsilon;
  std::vector<SupLocalTimeRow> rows;
  for (auto seed : seeds)
    for (long n : n_grid) {
      auto f = local_times(nu, n, seed);
      rows.push_back({seed, n, f.phi_n, double(f.phi_n) / std::pow(double(n), expo)});
    }
  return rows;
}

}  // namespace pathsim
