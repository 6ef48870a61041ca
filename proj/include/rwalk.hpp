#ifndef TORWALK_RWALK_HPP
#define TORWALK_RWALK_HPP

// Exact and asymptotic analysis of a finitely supported step distribution:
// characteristic function, covariance form, walk classification, local limit
// theorem main terms, renewal sums and the limit kernel measure.

#include <complex>
#include <cstdint>
#include <functional>
#include <unordered_map>

#include "zlattice.hpp"

namespace rwalk {

using exact::Int;
using exact::QMat;
using exact::QVec;
using exact::Rat;
using exact::ZVec;
using zlattice::AnnulatorGroup;
using zlattice::IntLattice;

struct not_reduced_error : torwalk::error {
  not_reduced_error()
      : torwalk::error("NotReduced: step support is rank-deficient, apply reduce_support first") {}
};
struct not_transient_error : torwalk::error {
  not_transient_error() : torwalk::error("NotTransient: walk is recurrent") {}
};
struct singularity_error : torwalk::error {
  singularity_error() : torwalk::error("Singularity: t lies in the annulator of L") {}
};
struct box_cap_error : torwalk::error {
  box_cap_error() : torwalk::error("exact distribution support exceeds the configured cap") {}
};
struct degenerate_walk_error : torwalk::error {
  degenerate_walk_error() : torwalk::error("DegenerateWalk: singular covariance form") {}
};

struct StepDistribution {
  int dim = 0;
  std::vector<std::vector<long>> steps;  // distinct integer vectors
  std::vector<Rat> weights;              // positive, sum exactly 1

  void validate() const;
  size_t count() const { return steps.size(); }
};

enum class WalkClass { RecurrentD1, RecurrentD2, Transient, Deterministic };

struct WalkAnalysis {
  StepDistribution nu;
  IntLattice L;  // support lattice
  IntLattice D;  // difference lattice
  int d_w = 0;   // = dim (walk must be reduced)
  int d0_w = 0;  // rank of D
  QVec mean;
  QMat lambda;        // covariance form
  Rat lambda_det;     // det(lambda)
  // restriction of lambda to the difference subspace, in the basis given by
  // the columns of D.basis (only when 0 < d0 < d; lambda preserves that span)
  QMat lambda0_in_dbasis;
  Int a0;             // Card(Gamma_1 / circle part)
  Int quotient_v;     // Card(L/D) when finite, 0 otherwise
  AnnulatorGroup gamma;             // annulator of L
  AnnulatorGroup gamma1_discrete;   // discrete part of the annulator of D
  bool has_circle_component = false;
  ZVec circle_direction;            // direction of the 1-torus in Gamma_1
  WalkClass classification = WalkClass::Transient;
  bool centered = false;
  bool moment2_finite = true;
};

WalkAnalysis analyze(const StepDistribution& nu);

// characteristic function Psi(t) = sum p_j e^{2 pi i <l_j, t>}
std::complex<double> psi(const StepDistribution& nu, const std::vector<double>& t);

// exact predicates at rational points: Psi(t) = 1 and |Psi(t)| = 1
bool psi_is_one(const StepDistribution& nu, const QVec& t);
bool psi_modulus_one(const StepDistribution& nu, const QVec& t);

// --- exact n-step distribution (sparse convolution) ---

struct ExactDist {
  int dim = 0;
  long n = 0;
  Int denom;  // common denominator Q^n
  std::unordered_map<unsigned long long, Int> numer;  // packed point -> numerator
  std::vector<long> unpack(unsigned long long key) const;
  Rat prob(const std::vector<long>& point) const;
  double prob_d(const std::vector<long>& point) const;
};

ExactDist exact_distribution(const StepDistribution& nu, long n, size_t support_cap = 5000000);

// --- characteristic-function grid sums ---
// Grid identities are exact up to lattice wrap-around:
//   (1/N^d) sum_j Psi(j/N)^k e^{-2 pi i <p, j/N>} = sum_m P(Z_k = p + N m).
// Every grid routine reports a Gaussian wrap-around estimate.

struct GridValue {
  double value = 0;
  double wrap_bound = 0;   // heuristic Gaussian tail estimate, not a proof
  double tail_estimate = 0;  // LLT tail added past the truncation (green_sum)
};

// P(Z_k = p mod N Z^d)
GridValue grid_return_prob(const StepDistribution& nu, long k, const std::vector<long>& p, int N);

// P(Z_k = p mod N Z^d) for every k <= n_max (one pass per k)
std::vector<double> grid_return_probs(const StepDistribution& nu, long n_max,
                                      const std::vector<long>& p, int N);

// P(Z_k = p mod N Z^d) for several p in one grid pass
std::vector<double> grid_return_prob_multi(const StepDistribution& nu, long k,
                                           const std::vector<std::vector<long>>& ps, int N);

// I(p) truncated at K plus an LLT tail estimate:
//   1_{p=0} + sum_{k<=K} [P(Z_k=p) + P(Z_k=-p)] + tail
GridValue green_sum(const StepDistribution& nu, const std::vector<long>& p, long K, int N);

// E V_{n,p} = n 1_{p=0} + sum_{k<n} (n-k) [P(Z_k=p) + P(Z_k=-p)]
GridValue expected_self_intersections(const StepDistribution& nu, long n,
                                      const std::vector<long>& p, int N);
// exact small-n evaluation through the sparse convolution
Rat expected_self_intersections_exact(const StepDistribution& nu, long n,
                                      const std::vector<long>& p);

// --- renewal-theory quantities ---

// w(t) = (1 - |Psi|^2) / |1 - Psi|^2
double w_density(const StepDistribution& nu, const std::vector<double>& t);

// integral of w over T^d: midpoint tensor quadrature on power-of-two grids,
// doubled with one Richardson step until stable
double c_w(const StepDistribution& nu, int start_N = 32, double tol = 1e-6,
           int max_N = 1 << 12);

// K = 1/|mean| for d=1 transient walks with drift, 0 for d > 1
Rat K_constant(const WalkAnalysis& an);

// --- limit kernel ---

struct KernelMeasure {
  int dim = 0;
  enum class Normalization { PathDependentVn, CnLogN, Cn };
  Normalization norm_kind = Normalization::Cn;
  double C = 0;  // NaN when path-dependent

  std::vector<std::pair<QVec, double>> atoms;

  bool has_density = false;
  StepDistribution density_walk;  // density is w(t)/density_norm
  double density_norm = 1;

  struct Circle {
    ZVec direction;
    std::vector<std::pair<QVec, double>> bases;  // base point + weight
  };
  std::optional<Circle> circle;

  double atom_mass() const;
};

KernelMeasure limit_kernel(const WalkAnalysis& an);

// Haar measure on the annulator of D (the gamma_1 measure), as a kernel
// without an n-normalization; used for barycenter variances.
KernelMeasure gamma1_measure(const WalkAnalysis& an);

// centered LLT main term a0 det(L)^{-1/2} (2 pi n)^{-d/2} e^{-<L^{-1}k,k>/2n}
// on the admissible coset, 0 off it
double llt_main_term(const WalkAnalysis& an, long n, const std::vector<long>& k);

// admissible times {n : k in D + n l_1} as an arithmetic progression
struct Progression {
  long offset = 0;
  long period = 1;  // 0 means a single admissible time
  bool contains(long n) const {
    if (period == 0) return n == offset;
    return n >= 0 && (n - offset) % period == 0;
  }
};
std::optional<Progression> step_progression(const WalkAnalysis& an, const std::vector<long>& k);

StepDistribution barycenter_symmetrize(const StepDistribution& nu);

// largest eigenvalue of the covariance form (power iteration, for bounds)
double lambda_max(const WalkAnalysis& an);

}  // namespace rwalk

#endif
