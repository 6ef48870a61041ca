#ifndef TORWALK_PATHSIM_HPP
#define TORWALK_PATHSIM_HPP

// Monte Carlo walk paths with a counter-based generator, local-time fields,
// self-intersection functionals and kernel diagnostics.

#include <complex>
#include <cstdint>
#include <unordered_map>

#include "pointkey.hpp"
#include "rwalk.hpp"

namespace pathsim {

using rwalk::StepDistribution;

// Counter-based draw: a keyed splitmix chain, stateless and reproducible
// regardless of evaluation order or worker count.
inline std::uint64_t rng_u64(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return pointkey::mix(counter + pointkey::mix(stream + pointkey::mix(seed)));
}
inline double rng_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return double(rng_u64(seed, stream, counter) >> 11) * 0x1.0p-53;
}

// Inverse-CDF step sampler with exact 64-bit thresholds computed from the
// rational weights once (bias < J * 2^-64).
struct StepSampler {
  std::vector<std::uint64_t> thresholds;  // cumulative, last entry = 2^64-1
  explicit StepSampler(const StepDistribution& nu);
  int draw(std::uint64_t u) const {
    int j = 0;
    while (u > thresholds[j]) ++j;
    return j;
  }
};

// step index sequence for path (seed, stream); steps k = 0..n-2 move Z_k to Z_{k+1}
std::vector<std::uint8_t> sample_steps(const StepDistribution& nu, long n,
                                       std::uint64_t seed, std::uint64_t stream = 0);

struct LocalTimeField {
  int dim = 0;
  long n = 0;
  std::uint64_t seed = 0;
  std::unordered_map<unsigned long long, long, pointkey::Hash> counts;  // R_n
  long long v_n = 0;   // sum of squared counts
  long phi_n = 0;      // sup local time

  long count_at(const std::vector<long>& p) const {
    auto it = counts.find(pointkey::pack(p));
    return it == counts.end() ? 0 : it->second;
  }
};

LocalTimeField local_times(const StepDistribution& nu, long n, std::uint64_t seed,
                           std::uint64_t stream = 0);

// positions Z_0 = 0, ..., Z_{n-1} (for tests and kernel identities)
std::vector<std::vector<long>> sample_positions(const StepDistribution& nu, long n,
                                                std::uint64_t seed, std::uint64_t stream = 0);

struct SelfIntersections {
  long long v_n = 0;
  long phi_n = 0;
  std::vector<long long> v_np;  // aligned with the queried p list
};
SelfIntersections self_intersections(const LocalTimeField& field,
                                     const std::vector<std::vector<long>>& p_list);

// V_{n,p} / V_n per queried p
std::vector<double> empirical_kernel_fourier(const LocalTimeField& field,
                                             const std::vector<std::vector<long>>& p_list);

// max_t | |sum_k e^{2 pi i <Z_k,t>}|^2 - sum_p V_{n,p} e^{2 pi i <p,t>} |
double kernel_identity_check(const LocalTimeField& field,
                             const std::vector<std::vector<double>>& t_list);

struct SupLocalTimeRow {
  std::uint64_t seed;
  long n;
  long phi_n;
  double ratio;  // phi_n / n^{1/2+eps} (d=1 recurrent) or phi_n / n^eps
};
std::vector<SupLocalTimeRow> sup_local_time_diagnostic(const StepDistribution& nu,
                                                       const std::vector<long>& n_grid,
                                                       const std::vector<std::uint64_t>& seeds,
                                                       double epsilon);

}  // namespace pathsim

#endif
