#ifndef TORWALK_ERGSUM_HPP
#define TORWALK_ERGSUM_HPP

// Exact-arithmetic ergodic sums: quenched sums along a sampled walk,
// rotated rectangle sums, and barycenter iterate norms. Haar sampling is
// replaced by uniform points on the q-division lattice with q prime, so
// the hyperbolic orbits are exact; floats appear only in the final
// trigonometric evaluation.

#include "pathsim.hpp"
#include "toralact.hpp"

namespace ergsum {

using rwalk::StepDistribution;
using toralact::ToralAction;
using toralact::TrigPoly;

struct bad_modulus_error : torwalk::error {
  bad_modulus_error() : torwalk::error("BadModulus: q must be prime and coprime to the determinants") {}
};
struct endomorphism_negative_power_error : torwalk::error {
  endomorphism_negative_power_error()
      : torwalk::error("EndomorphismNegativePower: negative exponents need automorphisms") {}
};

inline constexpr std::uint64_t kDefaultModulus = 2147483647ULL;  // 2^31 - 1

// points of the q-division lattice, one flat row of rho coordinates each
struct ModularPoints {
  std::uint64_t q = 0;
  int rho = 0;
  std::vector<std::uint64_t> coords;  // count * rho
  size_t count() const { return rho ? coords.size() / size_t(rho) : 0; }
};

ModularPoints sample_points(const ToralAction& action, std::uint64_t q, size_t count,
                            std::uint64_t seed);

// modular images of the action generators and their inverses
struct ModContext {
  std::uint64_t q = 0;
  int rho = 0;
  std::vector<std::vector<std::uint64_t>> gen, gen_inv;  // row-major rho x rho

  ModContext(const ToralAction& action, std::uint64_t q);
  // y <- M y mod q in place
  void apply(const std::vector<std::uint64_t>& M, std::uint64_t* y) const;
  // A^l mod q as one matrix
  std::vector<std::uint64_t> power(const std::vector<long>& l) const;
};

// S_n(x) = sum_{k<n} f(A^{Z_k} x) per point, driven by a sampled step-index
// sequence; incremental modular orbit, one matrix apply per step
std::vector<double> quenched_sums(const ToralAction& action, const TrigPoly& f,
                                  const StepDistribution& nu,
                                  const std::vector<std::uint8_t>& step_indices,
                                  ModularPoints& points);

// sum over the rectangle [0,N1) x ... x [0,Nd) of e^{2 pi i <l,theta>} f(A^l x)
std::vector<std::complex<double>> rotated_rectangle_sums(const ToralAction& action,
                                                         const TrigPoly& f,
                                                         const std::vector<long>& rect,
                                                         const std::vector<double>& theta,
                                                         const ModularPoints& points);

// ||P^n f||_2^2 = sum_l P(Ztilde_n = l) hat phi_f(l), the sum running over the
// finite Fourier support of phi_f
struct BarycenterNorm {
  double value = 0;
  int orbit_count = 0;   // orbits found at the decomposition bound
  int bound = 0;         // unresolved connections would only enlarge the value
};
BarycenterNorm barycenter_norm_sq(const ToralAction& action, const TrigPoly& f,
                                  const StepDistribution& nu, long n, int grid_N,
                                  int orbit_bound = 12);
// exact-probability route for small n (oracle for the grid route)
BarycenterNorm barycenter_norm_sq_exact(const ToralAction& action, const TrigPoly& f,
                                        const StepDistribution& nu, long n,
                                        int orbit_bound = 12);

// f evaluated at a modular point (test hook)
double eval_at_point(const TrigPoly& f, const ModularPoints& points, size_t index);

}  // namespace ergsum

#endif
