#ifndef TORWALK_TORALACT_HPP
#define TORWALK_TORALACT_HPP

// Z^d-actions by commuting integer matrices on T^rho: validation, total
// ergodicity certificates, dual character orbits, spectral densities of
// trigonometric polynomials and the coboundary obstruction.

#include <complex>
#include <map>

#include "rwalk.hpp"

namespace toralact {

using exact::Int;
using exact::QVec;
using exact::Rat;
using exact::ZMat;
using exact::ZVec;

struct non_commuting_error : torwalk::error {
  non_commuting_error(int i, int j)
      : torwalk::error("NonCommuting: generators " + std::to_string(i) + " and " +
                       std::to_string(j) + " do not commute") {}
};
struct singular_error : torwalk::error {
  singular_error() : torwalk::error("Singular: generator has determinant 0") {}
};
struct not_unimodular_error : torwalk::error {
  not_unimodular_error() : torwalk::error("NotUnimodular: automorphism needs |det| = 1") {}
};
struct ambiguous_orbit_error : torwalk::error {
  ambiguous_orbit_error() : torwalk::error("AmbiguousOrbit: inconsistent orbit offsets") {}
};
struct unknown_gallery_error : torwalk::error {
  unknown_gallery_error(const std::string& n)
      : torwalk::error("unknown gallery entry: " + n) {}
};

enum class ActionKind { Automorphism, Endomorphism };

struct ErgodicityCertificate {
  bool pass = false;
  int bound = 0;               // search bound used (0 for unconditional passes)
  std::string method;          // "cyclotomic-search" or "multiplicative-determinants"
  std::vector<long> witness;   // failing exponent l when pass = false
};

struct ToralAction {
  int rho = 0;  // torus dimension
  int d = 0;    // action dimension
  ActionKind kind = ActionKind::Automorphism;
  std::vector<ZMat> gens;       // the matrices A_i acting on T^rho
  std::vector<ZMat> dual_gens;  // A_i^T acting on characters (fixed convention)
  std::vector<ZMat> dual_adj;   // adj(A_i^T): dual inverse = adj / det
  std::vector<Int> dets;
};

ToralAction action_from_generators(const std::vector<ZMat>& matrices, ActionKind kind);

// no A^l with l != 0, ||l||_inf <= bound has a root-of-unity eigenvalue;
// scalar endomorphism actions with multiplicatively independent determinants
// certify unconditionally
ErgodicityCertificate check_total_ergodicity(const ToralAction& a, int search_bound);

// dual action on a character: (A^T)^n k, exact; NonIntegral -> nullopt
std::optional<ZVec> dual_apply(const ToralAction& a, const std::vector<long>& n, const ZVec& k);

// --- trigonometric polynomials ---

struct TrigPoly {
  int rho = 0;
  std::map<std::vector<long>, std::complex<double>> coeffs;  // nonzero k only

  void validate_real() const;  // c(-k) = conj(c(k)), no zero frequency
  double norm_c() const;       // sum |c_k|
  double norm_l2_sq() const;   // sum |c_k|^2
  double eval(const std::vector<double>& x) const;
};

// real cosine polynomial cos(2 pi <k,x>) (coefficients 1/2 at +-k)
TrigPoly cosine_poly(int rho, const std::vector<long>& k);

// --- dual orbits and the spectral density ---

struct Orbit {
  ZVec representative;  // lexicographically minimal member found
  // members as offset -> character; member = dual_apply(offset, representative)
  std::map<std::vector<long>, ZVec> members;
};

struct OrbitDecomposition {
  int bound = 0;
  std::vector<Orbit> orbits;  // "disjoint up to bound": non-merges are separate
};

OrbitDecomposition orbit_decompose(const ToralAction& a, const std::vector<ZVec>& charset,
                                   int bound);

struct SpectralDensity {
  int d = 0;
  // per orbit: offset l -> c_f(A^l chi_j)
  std::vector<std::map<std::vector<long>, std::complex<double>>> orbit_amps;

  double eval(const std::vector<double>& t) const;   // phi_f(t) >= 0
  double fourier(const std::vector<long>& n) const;  // hat phi_f(n), real for real f
  // offsets where hat phi_f can be nonzero (differences within orbits)
  std::vector<std::vector<long>> fourier_support() const;
};

SpectralDensity spectral_density(const ToralAction& a, const TrigPoly& f, int bound = 12);

// zeta(phi_f): atoms + circle components + absolutely continuous part,
// quadrature matching the c_w policy
double variance_against(const rwalk::KernelMeasure& kernel, const SpectralDensity& sd,
                        int start_N = 32, double tol = 1e-6, int max_N = 1 << 12);

struct CoboundaryReport {
  double phi_at_zero = 0;
  bool is_mixed_coboundary_obstructed = false;  // phi_f(0) = 0 within 1e-10
};
CoboundaryReport coboundary_obstruction(const ToralAction& a, const TrigPoly& f, int bound = 12);

// --- worked examples with the published matrices ---

struct GalleryEntry {
  std::string name;
  ToralAction action;
  std::optional<rwalk::StepDistribution> walk;  // exponent walk, when bundled
  std::vector<ZMat> composed;                   // published composed matrices, if any
  std::string note;
};

GalleryEntry example_gallery(const std::string& name);
std::vector<std::string> gallery_names();

}  // namespace toralact

#endif
