#ifndef TORWALK_CLTLAB_HPP
#define TORWALK_CLTLAB_HPP

// Experiment harness: quenched / rotated / barycenter runs against the
// spectral targets, Gaussian goodness-of-fit, and report emission.

#include "cumulant.hpp"
#include "ergsum.hpp"

namespace cltlab {

using rwalk::StepDistribution;
using rwalk::WalkClass;
using toralact::ToralAction;
using toralact::TrigPoly;

struct GofReport {
  double ks_stat = 0;
  double p_value = 0;
  double c3 = 0, c4 = 0;
};

// one-sample Kolmogorov-Smirnov against N(0, sigma2), asymptotic p-value;
// sigma2 = 0 tests concentration at zero
GofReport normal_gof(const std::vector<double>& samples, double sigma2);

enum class TheoremCase { Auto, RecurrentD1, RecurrentD2, Transient };

TheoremCase case_for(WalkClass c);
std::string case_name(TheoremCase c);

struct ExperimentConfig {
  StepDistribution walk;
  ToralAction action;
  TrigPoly f;
  long n = 10000;
  size_t points = 2000;
  std::uint64_t q = ergsum::kDefaultModulus;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  TheoremCase theorem_case = TheoremCase::Auto;
  int orbit_bound = 12;
  int ergodicity_bound = 4;
  // rotated runs
  std::vector<long> rect;
  std::vector<double> theta;  // empty = draw per seed
  // barycenter runs
  std::vector<long> n_grid = {100, 140, 200, 280, 400};
  int grid_N = 192;
  // self-intersection shifts for the diagnostics CSV
  std::vector<std::vector<long>> p_list;
};

// parse the JSON config formats (walk/action/function files or one bundle)
ExperimentConfig load_config(const std::string& path);
StepDistribution walk_from_json_text(const std::string& text);
ToralAction action_from_json_text(const std::string& text);
TrigPoly function_from_json_text(const std::string& text);

struct SeedResult {
  std::uint64_t seed = 0;
  double normalization = 0;  // the squared normalizer n-term
  long long v_n = 0;
  double empirical_var = 0;
  double target_var = 0;
  double variance_ratio = 0;
  GofReport gof;
  bool pass = false;
};

struct ExperimentReport {
  std::string kind;
  std::string classification;
  double C = 0;            // normalization constant (NaN if path-dependent)
  double target_var = 0;   // zeta(phi_f) / gamma(phi_f) / phi_f(theta)
  std::vector<SeedResult> per_seed;
  int pass_count = 0;
  bool aggregate_pass = false;  // majority of seeds
  std::vector<double> pooled_samples;  // normalized, for histograms

  // acceptance windows used for per-seed verdicts
  double ratio_lo = 0.85, ratio_hi = 1.15, p_min = 0.01;
};

ExperimentReport run_quenched(const ExperimentConfig& cfg);
ExperimentReport run_rotated(const ExperimentConfig& cfg);

struct BarycenterReport {
  int d0 = 0;
  bool no_decay = false;
  std::vector<long> n_grid;
  std::vector<double> norm_sq;      // ||P^n f||_2^2
  std::vector<double> plateau;      // n^{d0/2} ||P^n f||_2^2
  double slope = 0;                 // log-log slope of ||P^n f||_2
  double sigma_p_sq = 0;            // int phi_f d gamma_1
  double plateau_target = 0;        // (2 pi)^{-d0/2} a0 det(L0)^{-1/2} sigma_p^2
  double plateau_ratio = 0;         // last plateau value / target
  bool degenerate = false;          // sigma_P = 0 flagged
};
BarycenterReport run_barycenter(const ExperimentConfig& cfg);

// report emission (report.json, hist.csv, series.csv under out_dir)
void write_report(const ExperimentReport& rep, const std::string& out_dir);
void write_report(const BarycenterReport& rep, const std::string& out_dir);

// local-time growth profiles across an n grid, for the condition checker
std::vector<cumulant::SummationProfile> walk_profiles(const StepDistribution& nu,
                                                      const std::vector<long>& n_grid,
                                                      std::uint64_t seed);

}  // namespace cltlab

#endif
