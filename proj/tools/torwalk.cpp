// torwalk: analyze lattice walks, certify toral actions, and run the
// quenched / rotated / barycenter limit-theorem experiments.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "cltlab.hpp"
#include "json.hpp"

using json = nlohmann::json;

static void emit(const json& j, const std::string& out_dir, const std::string& name) {
  if (out_dir.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::filesystem::create_directories(out_dir);
    std::ofstream(out_dir + "/" + name) << j.dump(2) << "\n";
    std::cout << out_dir << "/" << name << "\n";
  }
}

static json walk_analysis_json(const rwalk::WalkAnalysis& an) {
  json j;
  j["dim"] = an.d_w;
  j["d0"] = an.d0_w;
  j["centered"] = an.centered;
  switch (an.classification) {
    case rwalk::WalkClass::RecurrentD1: j["classification"] = "recurrent-d1"; break;
    case rwalk::WalkClass::RecurrentD2: j["classification"] = "recurrent-d2"; break;
    case rwalk::WalkClass::Transient: j["classification"] = "transient"; break;
    case rwalk::WalkClass::Deterministic: j["classification"] = "deterministic"; break;
  }
  j["index_L"] = an.gamma.order.get_str();
  j["a0"] = an.a0.get_str();
  if (an.quotient_v != 0) j["card_L_mod_D"] = an.quotient_v.get_str();
  for (const auto& m : an.mean) j["mean"].push_back(m.get_str());
  for (int i = 0; i < an.d_w; ++i) {
    json row;
    for (int k = 0; k < an.d_w; ++k) row.push_back(an.lambda.at(i, k).get_str());
    j["lambda"].push_back(row);
  }
  j["det_lambda"] = an.lambda_det.get_str();
  j["gamma_points"] = an.gamma.points.size();
  j["gamma1_discrete_points"] = an.gamma1_discrete.points.size();
  j["has_circle_component"] = an.has_circle_component;
  return j;
}

int main(int argc, char** argv) {
  CLI::App app{"toral random-walk ergodic-sum laboratory"};
  app.require_subcommand(1);

  std::string config, out_dir;
  long n_override = 0;
  int seeds_override = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON config path")->required();
    sub->add_option("--out", out_dir, "output directory (stdout if omitted)");
    sub->add_option("--n", n_override, "override n");
    sub->add_option("--seeds", seeds_override, "use seeds 1..k");
  };

  auto* c_walk = app.add_subcommand("analyze-walk", "exact walk invariants");
  add_common(c_walk);
  auto* c_action = app.add_subcommand("analyze-action", "validate + certify an action");
  add_common(c_action);
  int erg_bound = 4;
  c_action->add_option("--bound", erg_bound, "ergodicity search bound");
  auto* c_llt = app.add_subcommand("llt", "local limit theorem ratio table");
  add_common(c_llt);
  auto* c_selfint = app.add_subcommand("selfint", "self-intersection diagnostics");
  add_common(c_selfint);
  auto* c_kernel = app.add_subcommand("kernel", "limit kernel measure and constants");
  add_common(c_kernel);
  auto* c_quenched = app.add_subcommand("quenched", "quenched CLT experiment");
  add_common(c_quenched);
  auto* c_rotated = app.add_subcommand("rotated", "rotated rectangle CLT experiment");
  add_common(c_rotated);
  auto* c_baryc = app.add_subcommand("barycenter", "barycenter decay experiment");
  add_common(c_baryc);
  auto* c_cumul = app.add_subcommand("cumulants", "summation-condition diagnostics");
  add_common(c_cumul);
  auto* c_gallery = app.add_subcommand("gallery", "published example actions");
  std::string gallery_name;
  c_gallery->add_option("name", gallery_name, "entry name (omit to list)");
  c_gallery->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    auto load = [&]() {
      auto cfg = cltlab::load_config(config);
      if (n_override > 0) cfg.n = n_override;
      if (seeds_override > 0) {
        cfg.seeds.clear();
        for (int s = 1; s <= seeds_override; ++s) cfg.seeds.push_back(s);
      }
      return cfg;
    };

    if (app.got_subcommand(c_walk)) {
      auto cfg = load();
      auto an = rwalk::analyze(cfg.walk);
      emit(walk_analysis_json(an), out_dir, "walk.json");
    } else if (app.got_subcommand(c_action)) {
      auto cfg = load();
      auto cert = toralact::check_total_ergodicity(cfg.action, erg_bound);
      json j{{"rho", cfg.action.rho},
             {"d", cfg.action.d},
             {"pass", cert.pass},
             {"method", cert.method},
             {"bound", cert.bound}};
      for (long w : cert.witness) j["witness"].push_back(w);
      emit(j, out_dir, "action.json");
      return cert.pass ? 0 : 2;
    } else if (app.got_subcommand(c_llt)) {
      auto cfg = load();
      auto an = rwalk::analyze(cfg.walk);
      long n = n_override > 0 ? n_override : 200;
      std::vector<long> zero(cfg.walk.dim, 0);
      auto pr = rwalk::step_progression(an, zero);
      json j;
      j["n"] = n;
      j["rows"] = json::array();
      for (long k = n; k > 0 && j["rows"].size() < 8; --k) {
        if (!pr || !pr->contains(k)) continue;
        auto dist = rwalk::exact_distribution(cfg.walk, k);
        double main = rwalk::llt_main_term(an, k, zero);
        j["rows"].push_back({{"n", k},
                             {"p_exact", dist.prob_d(zero)},
                             {"llt_main", main},
                             {"ratio", dist.prob_d(zero) / main}});
      }
      emit(j, out_dir, "llt.json");
    } else if (app.got_subcommand(c_selfint)) {
      auto cfg = load();
      json j;
      j["rows"] = json::array();
      std::string csv = "seed,n,v_n,phi_n";
      for (const auto& p : cfg.p_list) {
        csv += ",v_np(";
        for (size_t i = 0; i < p.size(); ++i) csv += (i ? " " : "") + std::to_string(p[i]);
        csv += ")";
      }
      csv += "\n";
      for (auto seed : cfg.seeds) {
        auto f = pathsim::local_times(cfg.walk, cfg.n, seed);
        auto si = pathsim::self_intersections(f, cfg.p_list);
        csv += std::to_string(seed) + "," + std::to_string(cfg.n) + "," +
               std::to_string(f.v_n) + "," + std::to_string(f.phi_n);
        for (auto v : si.v_np) csv += "," + std::to_string(v);
        csv += "\n";
        json row{{"seed", seed}, {"v_n", f.v_n}, {"phi_n", f.phi_n}};
        for (auto v : si.v_np) row["v_np"].push_back(v);
        j["rows"].push_back(row);
      }
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream(out_dir + "/series.csv") << csv;
      }
      emit(j, out_dir, "selfint.json");
    } else if (app.got_subcommand(c_kernel)) {
      auto cfg = load();
      auto an = rwalk::analyze(cfg.walk);
      auto k = rwalk::limit_kernel(an);
      json j;
      j["C"] = k.C;
      j["atoms"] = k.atoms.size();
      j["has_density"] = k.has_density;
      switch (k.norm_kind) {
        case rwalk::KernelMeasure::Normalization::PathDependentVn:
          j["normalization"] = "V_n(omega)";
          break;
        case rwalk::KernelMeasure::Normalization::CnLogN:
          j["normalization"] = "C n log n";
          break;
        default: j["normalization"] = "C n";
      }
      if (k.has_density) j["density_norm"] = k.density_norm;
      emit(j, out_dir, "kernel.json");
    } else if (app.got_subcommand(c_quenched)) {
      auto cfg = load();
      auto rep = cltlab::run_quenched(cfg);
      if (!out_dir.empty()) cltlab::write_report(rep, out_dir);
      std::cout << "quenched: target=" << rep.target_var << " C=" << rep.C << " pass "
                << rep.pass_count << "/" << rep.per_seed.size() << "\n";
      return rep.aggregate_pass ? 0 : 2;
    } else if (app.got_subcommand(c_rotated)) {
      auto cfg = load();
      auto rep = cltlab::run_rotated(cfg);
      if (!out_dir.empty()) cltlab::write_report(rep, out_dir);
      std::cout << "rotated: pass " << rep.pass_count << "/" << rep.per_seed.size() << "\n";
      return rep.aggregate_pass ? 0 : 2;
    } else if (app.got_subcommand(c_baryc)) {
      auto cfg = load();
      auto rep = cltlab::run_barycenter(cfg);
      if (!out_dir.empty()) cltlab::write_report(rep, out_dir);
      std::cout << "barycenter: slope=" << rep.slope << " plateau_ratio=" << rep.plateau_ratio
                << (rep.no_decay ? " (no decay)" : "") << "\n";
      bool ok = rep.no_decay || std::abs(rep.slope + rep.d0 / 4.0) < 0.05;
      return ok ? 0 : 2;
    } else if (app.got_subcommand(c_cumul)) {
      auto cfg = load();
      std::vector<long> grid = {1000, 10000, 100000};
      auto profiles =
          cltlab::walk_profiles(cfg.walk, grid, cfg.seeds.empty() ? 1 : cfg.seeds[0]);
      auto reports = cumulant::summation_condition_check(profiles, 4);
      json j;
      j["conditions"] = json::array();
      bool all_dec = true;
      for (const auto& r : reports) {
        json row{{"r", r.r}, {"decreasing", r.decreasing}};
        for (double x : r.ratios) row["ratios"].push_back(x);
        j["conditions"].push_back(row);
        all_dec = all_dec && r.decreasing;
      }
      emit(j, out_dir, "cumulants.json");
      return all_dec ? 0 : 2;
    } else if (app.got_subcommand(c_gallery)) {
      if (gallery_name.empty()) {
        for (const auto& n : toralact::gallery_names()) std::cout << n << "\n";
        return 0;
      }
      auto e = toralact::example_gallery(gallery_name);
      json j{{"name", e.name}, {"rho", e.action.rho}, {"d", e.action.d}, {"note", e.note}};
      for (const auto& g : e.action.gens) {
        json m;
        for (int i = 0; i < g.rows; ++i) {
          json row;
          for (int c = 0; c < g.cols; ++c) row.push_back(g.at(i, c).get_si());
          m.push_back(row);
        }
        j["generators"].push_back(m);
      }
      if (e.walk) {
        for (const auto& s : e.walk->steps) j["walk"]["steps"].push_back(s);
        for (const auto& w : e.walk->weights) j["walk"]["weights"].push_back(w.get_str());
      }
      emit(j, out_dir, "gallery.json");
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
