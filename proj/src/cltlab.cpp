#include "cltlab.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace cltlab {

using json = nlohmann::json;
using exact::Rat;

GofReport normal_gof(const std::vector<double>& samples, double sigma2) {
  GofReport g;
  if (samples.size() >= 40) {
    auto c = cumulant::empirical_cumulants(samples, 4);
    double s = std::sqrt(std::max(c[1], 1e-300));
    g.c3 = c[2] / (s * s * s);
    g.c4 = c[3] / (s * s * s * s);
  }
  if (sigma2 < 1e-14) {
    // degenerate target: concentration at 0
    double rms = 0;
    for (double x : samples) rms += x * x;
    rms = std::sqrt(rms / double(samples.size()));
    g.ks_stat = rms;
    g.p_value = rms < 1e-9 ? 1.0 : 0.0;
    return g;
  }
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  double m = double(sorted.size());
  double sigma = std::sqrt(sigma2);
  double dmax = 0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    double cdf = 0.5 * std::erfc(-sorted[i] / (sigma * std::sqrt(2.0)));
    double lo = double(i) / m, hi = double(i + 1) / m;
    dmax = std::max(dmax, std::max(cdf - lo, hi - cdf));
  }
  g.ks_stat = dmax;
  double lam = (std::sqrt(m) + 0.12 + 0.11 / std::sqrt(m)) * dmax;
  double p = 0;
  for (int j = 1; j <= 101; ++j)
    p += 2 * ((j % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lam * lam);
  g.p_value = std::clamp(p, 0.0, 1.0);
  return g;
}

TheoremCase case_for(WalkClass c) {
  switch (c) {
    case WalkClass::RecurrentD1: return TheoremCase::RecurrentD1;
    case WalkClass::RecurrentD2: return TheoremCase::RecurrentD2;
    default: return TheoremCase::Transient;  // deterministic is C n as well
  }
}

std::string case_name(TheoremCase c) {
  switch (c) {
    case TheoremCase::Auto: return "auto";
    case TheoremCase::RecurrentD1: return "recurrent-d1";
    case TheoremCase::RecurrentD2: return "recurrent-d2";
    default: return "transient";
  }
}

// --- config parsing ---

static Rat rat_from_string(const std::string& s) {
  Rat r(s);
  r.canonicalize();
  return r;
}

static StepDistribution walk_from_json(const json& j) {
  StepDistribution nu;
  nu.dim = j.at("dim").get<int>();
  for (const auto& s : j.at("steps")) nu.steps.push_back(s.get<std::vector<long>>());
  for (const auto& w : j.at("weights")) {
    if (w.is_string())
      nu.weights.push_back(rat_from_string(w.get<std::string>()));
    else
      nu.weights.push_back(rat_from_string(std::to_string(w.get<long>())));
  }
  nu.validate();
  return nu;
}

static ToralAction action_from_json(const json& j) {
  int rho = j.at("rho").get<int>();
  auto kind = j.at("kind").get<std::string>() == "endomorphism"
                  ? toralact::ActionKind::Endomorphism
                  : toralact::ActionKind::Automorphism;
  std::vector<exact::ZMat> gens;
  for (const auto& g : j.at("generators")) {
    exact::ZMat m(rho, rho);
    for (int i = 0; i < rho; ++i)
      for (int c = 0; c < rho; ++c) m.at(i, c) = g.at(i).at(c).get<long>();
    gens.push_back(m);
  }
  return toralact::action_from_generators(gens, kind);
}

static TrigPoly function_from_json(const json& j) {
  TrigPoly f;
  f.rho = j.at("rho").get<int>();
  for (const auto& c : j.at("coeffs")) {
    auto k = c.at("k").get<std::vector<long>>();
    double re = c.at("re").get<double>();
    double im = c.value("im", 0.0);
    f.coeffs[k] += std::complex<double>(re, im);
  }
  f.validate_real();
  return f;
}

StepDistribution walk_from_json_text(const std::string& text) {
  return walk_from_json(json::parse(text));
}
ToralAction action_from_json_text(const std::string& text) {
  return action_from_json(json::parse(text));
}
TrigPoly function_from_json_text(const std::string& text) {
  return function_from_json(json::parse(text));
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw torwalk::error("cannot open config: " + path);
  json j = json::parse(in);
  ExperimentConfig cfg;
  if (j.contains("gallery")) {
    auto e = toralact::example_gallery(j.at("gallery").get<std::string>());
    cfg.action = e.action;
    if (e.walk) cfg.walk = *e.walk;
  }
  if (j.contains("walk")) cfg.walk = walk_from_json(j.at("walk"));
  if (j.contains("action")) cfg.action = action_from_json(j.at("action"));
  if (j.contains("function")) {
    cfg.f = function_from_json(j.at("function"));
  } else if (cfg.action.rho >= 1) {
    std::vector<long> e1(cfg.action.rho, 0);
    e1[0] = 1;
    cfg.f = toralact::cosine_poly(cfg.action.rho, e1);
  }
  cfg.n = j.value("n", cfg.n);
  cfg.points = j.value("points", cfg.points);
  cfg.q = j.value("q", cfg.q);
  if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("case")) {
    auto s = j.at("case").get<std::string>();
    cfg.theorem_case = s == "recurrent-d1"   ? TheoremCase::RecurrentD1
                       : s == "recurrent-d2" ? TheoremCase::RecurrentD2
                       : s == "transient"    ? TheoremCase::Transient
                                             : TheoremCase::Auto;
  }
  cfg.orbit_bound = j.value("orbit_bound", cfg.orbit_bound);
  cfg.ergodicity_bound = j.value("ergodicity_bound", cfg.ergodicity_bound);
  if (j.contains("rect")) cfg.rect = j.at("rect").get<std::vector<long>>();
  if (j.contains("theta")) cfg.theta = j.at("theta").get<std::vector<double>>();
  if (j.contains("n_grid")) cfg.n_grid = j.at("n_grid").get<std::vector<long>>();
  cfg.grid_N = j.value("grid_N", cfg.grid_N);
  if (j.contains("p_list"))
    for (const auto& p : j.at("p_list")) cfg.p_list.push_back(p.get<std::vector<long>>());
  return cfg;
}

// --- runners ---

static void require_certified(const ExperimentConfig& cfg) {
  auto cert = toralact::check_total_ergodicity(cfg.action, cfg.ergodicity_bound);
  if (!cert.pass) {
    std::string w = "[";
    for (long x : cert.witness) w += std::to_string(x) + ",";
    w += "]";
    throw torwalk::error("action failed the total-ergodicity certificate at " + w);
  }
}

ExperimentReport run_quenched(const ExperimentConfig& cfg) {
  if (cfg.walk.dim != cfg.action.d)
    throw torwalk::error("walk dimension must equal the action dimension");
  require_certified(cfg);
  auto an = rwalk::analyze(cfg.walk);
  TheoremCase effective = case_for(an.classification);
  if (cfg.theorem_case != TheoremCase::Auto && cfg.theorem_case != effective)
    throw torwalk::error("config case '" + case_name(cfg.theorem_case) +
                         "' does not match the walk classification '" +
                         case_name(effective) + "'");
  auto kernel = rwalk::limit_kernel(an);
  auto sd = toralact::spectral_density(cfg.action, cfg.f, cfg.orbit_bound);
  double target = toralact::variance_against(kernel, sd);

  ExperimentReport rep;
  rep.kind = "quenched";
  rep.classification = case_name(effective);
  rep.C = kernel.C;
  rep.target_var = target;

  for (auto seed : cfg.seeds) {
    auto steps = pathsim::sample_steps(cfg.walk, cfg.n, seed);
    auto field = pathsim::local_times(cfg.walk, cfg.n, seed);
    auto pts = ergsum::sample_points(cfg.action, cfg.q, cfg.points, seed * 1000003ULL + 17);
    auto sums = ergsum::quenched_sums(cfg.action, cfg.f, cfg.walk, steps, pts);

    SeedResult r;
    r.seed = seed;
    r.v_n = field.v_n;
    switch (effective) {
      case TheoremCase::RecurrentD1: r.normalization = double(field.v_n); break;
      case TheoremCase::RecurrentD2:
        r.normalization = kernel.C * double(cfg.n) * std::log(double(cfg.n));
        break;
      default: r.normalization = kernel.C * double(cfg.n); break;
    }
    double inv = 1.0 / std::sqrt(r.normalization);
    std::vector<double> u(sums.size());
    for (size_t i = 0; i < sums.size(); ++i) u[i] = sums[i] * inv;
    double mean = 0;
    for (double x : u) mean += x;
    mean /= double(u.size());
    double var = 0;
    for (double x : u) var += (x - mean) * (x - mean);
    var /= double(u.size() - 1);
    r.empirical_var = var;
    r.target_var = target;
    r.variance_ratio = var / target;
    r.gof = normal_gof(u, target);
    r.pass = r.variance_ratio >= rep.ratio_lo && r.variance_ratio <= rep.ratio_hi &&
             r.gof.p_value > rep.p_min;
    if (r.pass) ++rep.pass_count;
    rep.per_seed.push_back(r);
    rep.pooled_samples.insert(rep.pooled_samples.end(), u.begin(), u.end());
  }
  rep.aggregate_pass = 2 * rep.pass_count > int(cfg.seeds.size());
  return rep;
}

// exact finite-N variance: E|S|^2/|D| = sum_n hat phi(n) prod (1-|n_i|/N_i)+
// e^{2 pi i <n,theta>} (the Fejer-smoothed spectral density)
static double fejer_target(const toralact::SpectralDensity& sd, const std::vector<long>& rect,
                           const std::vector<double>& theta) {
  std::complex<double> acc(0, 0);
  for (const auto& n : sd.fourier_support()) {
    double w = 1;
    for (size_t i = 0; i < n.size(); ++i) {
      double t = 1.0 - double(std::labs(n[i])) / double(rect[i]);
      w *= std::max(t, 0.0);
    }
    if (w == 0) continue;
    double ph = 0;
    for (size_t i = 0; i < n.size(); ++i) ph += n[i] * theta[i];
    acc += sd.fourier(n) * w * std::polar(1.0, 2 * M_PI * ph);
  }
  return acc.real();
}

ExperimentReport run_rotated(const ExperimentConfig& cfg) {
  require_certified(cfg);
  if (int(cfg.rect.size()) != cfg.action.d)
    throw torwalk::error("rotated run needs a rectangle of the action dimension");
  auto sd = toralact::spectral_density(cfg.action, cfg.f, cfg.orbit_bound);
  double cells = 1;
  for (long s : cfg.rect) cells *= double(s);

  ExperimentReport rep;
  rep.kind = "rotated";
  rep.classification = "folner-rectangle";
  rep.C = cells;

  for (auto seed : cfg.seeds) {
    std::vector<double> theta = cfg.theta;
    if (theta.empty()) {
      theta.resize(cfg.action.d);
      for (int i = 0; i < cfg.action.d; ++i)
        theta[i] = pathsim::rng_uniform(seed, 0x726f74ULL, i);  // a.e.-theta statement
    }
    double target = sd.eval(theta);
    rep.target_var = target;
    auto pts = ergsum::sample_points(cfg.action, cfg.q, cfg.points, seed * 999983ULL + 5);
    auto sums = ergsum::rotated_rectangle_sums(cfg.action, cfg.f, cfg.rect, theta, pts);

    bool theta_zero = true;
    for (double t : theta) theta_zero = theta_zero && std::abs(t) < 1e-12;

    SeedResult r;
    r.seed = seed;
    r.normalization = cells;
    double m2 = 0;
    for (const auto& s : sums) m2 += std::norm(s);
    m2 /= double(sums.size()) * cells;
    r.empirical_var = m2;
    r.target_var = target;
    r.variance_ratio = target > 1e-14 ? m2 / target : m2;
    // distributional check on the real part
    std::vector<double> u(sums.size());
    double inv = 1.0 / std::sqrt(cells);
    for (size_t i = 0; i < sums.size(); ++i) u[i] = sums[i].real() * inv;
    double gof_target = theta_zero ? target : target / 2;
    r.gof = normal_gof(u, gof_target);
    if (target > 1e-14) {
      r.pass = r.variance_ratio >= rep.ratio_lo && r.variance_ratio <= rep.ratio_hi &&
               r.gof.p_value > rep.p_min;
    } else {
      // degenerate limit delta_0: the exact finite-N variance is the
      // Fejer-smoothed density, which decays like 1/N toward phi_f(theta)=0
      double fin = fejer_target(sd, cfg.rect, theta);
      r.pass = m2 < std::max(0.02, 3 * fin);
    }
    if (r.pass) ++rep.pass_count;
    rep.per_seed.push_back(r);
    rep.pooled_samples.insert(rep.pooled_samples.end(), u.begin(), u.end());
  }
  rep.aggregate_pass = 2 * rep.pass_count > int(cfg.seeds.size());
  return rep;
}

BarycenterReport run_barycenter(const ExperimentConfig& cfg) {
  if (cfg.walk.dim != cfg.action.d)
    throw torwalk::error("walk dimension must equal the action dimension");
  require_certified(cfg);
  BarycenterReport rep;
  rep.n_grid = cfg.n_grid;

  // deterministic P is an isometry; report NoDecay before demanding a
  // reduced walk
  auto sym0 = rwalk::barycenter_symmetrize(cfg.walk);
  bool trivial = true;
  for (const auto& s : sym0.steps)
    for (long x : s) trivial = trivial && x == 0;
  if (trivial) {
    rep.no_decay = true;
    return rep;
  }

  auto an = rwalk::analyze(cfg.walk);
  rep.d0 = an.d0_w;
  auto sd = toralact::spectral_density(cfg.action, cfg.f, cfg.orbit_bound);
  auto g1 = rwalk::gamma1_measure(an);
  rep.sigma_p_sq = toralact::variance_against(g1, sd);
  rep.degenerate = rep.sigma_p_sq < 1e-12;

  // plateau target from the LLT of the reduced symmetrized walk
  auto sym = rwalk::barycenter_symmetrize(cfg.walk);
  std::vector<exact::ZVec> gens;
  for (const auto& s : sym.steps) {
    exact::ZVec z(s.size());
    for (size_t i = 0; i < s.size(); ++i) z[i] = s[i];
    gens.push_back(z);
  }
  auto red = zlattice::reduce_support(gens);
  rwalk::StepDistribution symred;
  symred.dim = red.reduced_dim;
  for (size_t j = 0; j < red.reduced_vectors.size(); ++j) {
    std::vector<long> s(red.reduced_dim);
    for (int i = 0; i < red.reduced_dim; ++i) s[i] = red.reduced_vectors[j][i].get_si();
    symred.steps.push_back(s);
    symred.weights.push_back(sym.weights[j]);
  }
  auto ansym = rwalk::analyze(symred);
  rep.plateau_target = std::pow(2 * M_PI, -rep.d0 / 2.0) * ansym.a0.get_d() /
                       std::sqrt(ansym.lambda_det.get_d()) * rep.sigma_p_sq;

  for (long n : cfg.n_grid) {
    auto v = ergsum::barycenter_norm_sq(cfg.action, cfg.f, cfg.walk, n, cfg.grid_N,
                                        cfg.orbit_bound);
    rep.norm_sq.push_back(v.value);
    rep.plateau.push_back(std::pow(double(n), rep.d0 / 2.0) * v.value);
  }
  // least-squares slope of log ||P^n f||_2 against log n
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  size_t m = cfg.n_grid.size();
  for (size_t i = 0; i < m; ++i) {
    double x = std::log(double(cfg.n_grid[i]));
    double y = 0.5 * std::log(rep.norm_sq[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  rep.slope = (double(m) * sxy - sx * sy) / (double(m) * sxx - sx * sx);
  rep.plateau_ratio = rep.plateau.back() / rep.plateau_target;
  return rep;
}

// --- emission ---

static json to_json(const SeedResult& r) {
  return json{{"seed", r.seed},
              {"normalization", r.normalization},
              {"v_n", r.v_n},
              {"empirical_var", r.empirical_var},
              {"target_var", r.target_var},
              {"variance_ratio", r.variance_ratio},
              {"ks_stat", r.gof.ks_stat},
              {"p_value", r.gof.p_value},
              {"skewness", r.gof.c3},
              {"excess_kurtosis", r.gof.c4},
              {"pass", r.pass}};
}

void write_report(const ExperimentReport& rep, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  json j{{"kind", rep.kind},
         {"classification", rep.classification},
         {"C", rep.C},
         {"target_var", rep.target_var},
         {"pass_count", rep.pass_count},
         {"aggregate_pass", rep.aggregate_pass},
         {"ratio_window", {rep.ratio_lo, rep.ratio_hi}},
         {"p_min", rep.p_min}};
  for (const auto& r : rep.per_seed) j["per_seed"].push_back(to_json(r));
  std::ofstream(out_dir + "/report.json") << j.dump(2) << "\n";

  // histogram of pooled normalized samples vs the target normal density
  if (!rep.pooled_samples.empty() && rep.target_var > 0) {
    double sigma = std::sqrt(rep.target_var);
    int bins = 61;
    double lo = -4 * sigma, hi = 4 * sigma;
    std::vector<long> count(bins, 0);
    for (double x : rep.pooled_samples) {
      int b = int((x - lo) / (hi - lo) * bins);
      if (b >= 0 && b < bins) ++count[b];
    }
    std::ofstream h(out_dir + "/hist.csv");
    h << "bin,count,normal_pdf\n";
    double w = (hi - lo) / bins;
    for (int b = 0; b < bins; ++b) {
      double c = lo + (b + 0.5) * w;
      double pdf = std::exp(-c * c / (2 * rep.target_var)) / (sigma * std::sqrt(2 * M_PI));
      h << c << "," << count[b] << "," << pdf << "\n";
    }
  }
}

void write_report(const BarycenterReport& rep, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  json j{{"kind", "barycenter"},
         {"d0", rep.d0},
         {"no_decay", rep.no_decay},
         {"slope", rep.slope},
         {"sigma_p_sq", rep.sigma_p_sq},
         {"plateau_target", rep.plateau_target},
         {"plateau_ratio", rep.plateau_ratio},
         {"degenerate", rep.degenerate}};
  std::ofstream(out_dir + "/report.json") << j.dump(2) << "\n";
  std::ofstream s(out_dir + "/series.csv");
  s << "n,norm_sq,plateau\n";
  for (size_t i = 0; i < rep.n_grid.size(); ++i)
    s << rep.n_grid[i] << "," << rep.norm_sq[i] << "," << rep.plateau[i] << "\n";
}

std::vector<cumulant::SummationProfile> walk_profiles(const StepDistribution& nu,
                                                      const std::vector<long>& n_grid,
                                                      std::uint64_t seed) {
  std::vector<cumulant::SummationProfile> out;
  for (long n : n_grid) {
    auto f = pathsim::local_times(nu, n, seed);
    out.push_back({n, double(n), double(f.phi_n), double(f.v_n)});
  }
  return out;
}

}  // namespace cltlab
