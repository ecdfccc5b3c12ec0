#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "stripflow/checkpoint.hpp"
#include "stripflow/config.hpp"
#include "stripflow/diagnostics.hpp"
#include "stripflow/hash.hpp"

namespace stripflow {

namespace runner_detail {

inline std::string data_hash(const InitialData& d) {
  Fnv1a h;
  h.update(d.u0_1.data());
  h.update(d.u0_2.data());
  h.update(d.u1_1.data());
  h.update(d.u1_2.data());
  return h.hex();
}

inline nlohmann::ordered_json stream_header(const RunConfig& cfg,
                                            const std::string& hash) {
  nlohmann::ordered_json j;
  j["config"] = config_to_json(cfg);
  j["initial_data_hash"] = hash;
  return j;
}

inline DataFamily family_of(const RunConfig& cfg) {
  return cfg.family == "shear" ? DataFamily::shear : DataFamily::stream;
}

inline int steps_of(const RunConfig& cfg) {
  return static_cast<int>(std::lround(cfg.T / cfg.dt));
}

inline int stride_of(const RunConfig& cfg) {
  return std::max(1, static_cast<int>(std::lround(cfg.sample_stride / cfg.dt)));
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw StructuralError("cannot open output file " + p.string());
  f << s;
}

}  // namespace runner_detail

// Property-check suite over the weight/schedule/grid layers; pure compute,
// returns measured extremes alongside the verdicts.
struct VerifyReport {
  double radius_identity_max = 0.0;
  bool radius_identity_ok = false;
  double poincare_worst_ratio = 0.0;  // max ||f||^2 / ||dy f||^2, must be <= 4
  double poincare_sharp_err = 0.0;    // sin(pi y) ratio vs 1/pi^2, relative
  bool poincare_ok = false;
  double certify_c1_drift = 0.0;  // relative drift of the certified maxima
  double certify_c2_drift = 0.0;  // under m_max 60 -> 120, over rho grid
  bool certify_ok = false;
  int equivalence_failures = 0;
  bool equivalence_ok = false;

  bool all_ok() const {
    return radius_identity_ok && poincare_ok && certify_ok && equivalence_ok;
  }
};

inline VerifyReport run_verify(const StripGrid& g, std::uint64_t seed = 1) {
  VerifyReport rep;
  // 1. Radius-schedule identity on log-spaced times.
  for (double rho0 : {0.1, 0.5, 1.0, 2.0}) {
    RadiusSchedule sched(rho0);
    for (int i = 0; i < 1000; ++i) {
      double t = std::pow(10.0, -3.0 + 7.0 * i / 999.0);
      rep.radius_identity_max =
          std::max(rep.radius_identity_max, sched.identity_residual(t));
    }
  }
  rep.radius_identity_ok = rep.radius_identity_max <= 1e-12;

  // 2. Discrete Poincare inequality on random wall-vanishing fields, plus
  // sharpness on the ground profile sin(pi y).
  std::mt19937_64 rng(seed);
  auto draw = [&rng]() {
    return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
  };
  rep.poincare_worst_ratio = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Field f(g, true, true);
    for (int j = 1; j < g.ny() - 1; ++j)
      for (int a = 0; a < g.n1(); ++a)
        for (int b = 0; b < g.n2(); ++b)
          if (g.keep(a, b)) f.at(j, a, b) = {draw(), draw()};
    double num = l2norm2(f);
    double den = l2norm2(dy(f));
    if (den > 0.0)
      rep.poincare_worst_ratio = std::max(rep.poincare_worst_ratio, num / den);
  }
  {
    Field f(g, true, true);
    for (int j = 1; j < g.ny() - 1; ++j)
      f.at(j, 0, 0) = std::sin(pi * g.y()[j]);
    double ratio = l2norm2(f) / l2norm2(dy(f));
    rep.poincare_sharp_err = std::abs(ratio - 1.0 / (pi * pi)) * pi * pi;
  }
  double dy_ = g.dy();
  rep.poincare_ok = rep.poincare_worst_ratio <= 4.0 &&
                    rep.poincare_sharp_err <= 4.0 * pi * pi * dy_ * dy_;

  // 3. Certified weight-inequality maxima stable under doubling the scan.
  for (double rho : {0.25, 0.5, 1.0}) {
    auto lo = certify_weight_inequalities(rho, 60);
    auto hi = certify_weight_inequalities(rho, 120);
    rep.certify_c1_drift = std::max(
        rep.certify_c1_drift, std::abs(lo.first - hi.first) / hi.first);
    rep.certify_c2_drift = std::max(
        rep.certify_c2_drift, std::abs(lo.second - hi.second) / hi.second);
  }
  rep.certify_ok = rep.certify_c1_drift <= 1e-9 && rep.certify_c2_drift <= 1e-9;

  // 4. Two-sided norm equivalence on random band-limited fields.
  rep.equivalence_failures = 0;
  for (double rho : {0.25, 0.5}) {
    for (int trial = 0; trial < 100; ++trial) {
      Field h(g, true, false);
      for (int j = 0; j < g.ny(); ++j)
        for (int a = 0; a < g.n1(); ++a)
          for (int b = 0; b < g.n2(); ++b)
            if (g.keep(a, b)) h.at(j, a, b) = {draw(), draw()};
      if (!norm_equivalence_check(h, rho)) ++rep.equivalence_failures;
    }
  }
  rep.equivalence_ok = rep.equivalence_failures == 0;
  return rep;
}

inline nlohmann::ordered_json verify_to_json(const VerifyReport& r) {
  nlohmann::ordered_json j;
  j["radius_identity_max"] = r.radius_identity_max;
  j["radius_identity_ok"] = r.radius_identity_ok;
  j["poincare_worst_ratio"] = r.poincare_worst_ratio;
  j["poincare_sharp_err"] = r.poincare_sharp_err;
  j["poincare_ok"] = r.poincare_ok;
  j["certify_c1_drift"] = r.certify_c1_drift;
  j["certify_c2_drift"] = r.certify_c2_drift;
  j["certify_ok"] = r.certify_ok;
  j["equivalence_failures"] = r.equivalence_failures;
  j["equivalence_ok"] = r.equivalence_ok;
  j["all_ok"] = r.all_ok();
  return j;
}

namespace runner_detail {

inline int run_hydro_pipeline(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  StripGrid g(cfg.n1, cfg.n2, cfg.ny, cfg.period);
  InitialData d =
      make_initial_data(family_of(cfg), cfg.eps0, cfg.rho0, g, cfg.seed);
  std::string hash = data_hash(d);
  double init_sq = initial_norm_sq(d.u0_1, d.u0_2, d.u1_1, d.u1_2, cfg.rho0);

  std::ofstream jsonl(fs::path(cfg.out_dir) / "diagnostics.jsonl",
                      std::ios::binary);
  std::ofstream csv(fs::path(cfg.out_dir) / "diagnostics.csv",
                    std::ios::binary);
  if (!jsonl || !csv) throw StructuralError("cannot open diagnostics outputs");
  jsonl << stream_header(cfg, hash).dump() << "\n";
  csv << diagnostics_csv_header() << "\n";

  RadiusSchedule sched(cfg.rho0, cfg.schedule_a);
  HydroSolver solver(g);
  HydroState s{0.0, d.u0_1, d.u0_2, d.u1_1, d.u1_2, sched};
  const int nst = steps_of(cfg), stride = stride_of(cfg);
  std::vector<DiagnosticsRecord> history;
  bool c_all = true, h_all = true;
  int h_and_not_c = 0;
  int ckpt_index = 0;
  double next_ckpt = cfg.checkpoint_stride;
  for (int n = 0; n <= nst; ++n) {
    if (n % stride == 0 || n == nst) {
      if (cfg.dt > dt_max(g, s.u1, s.u2))
        throw StabilityError(
            "dt exceeds the advective stability ceiling for the current state");
      DiagnosticsRecord r = sample_hydro(s, cfg.eps0, init_sq);
      history.push_back(r);
      jsonl << record_to_json(r).dump() << "\n";
      csv << record_to_csv(r) << "\n";
      c_all = c_all && r.c_holds;
      h_all = h_all && r.h_holds;
      if (r.h_holds && !r.c_holds) ++h_and_not_c;
      if (cfg.checkpoint_stride > 0.0 && s.t >= next_ckpt - 1e-9 && n < nst) {
        Checkpoint ck{0, cfg.n1, cfg.n2, cfg.ny, cfg.period, s.t, 0.0,
                      cfg.rho0, {}};
        ck.fields.push_back({"u1", true, true, s.u1.data()});
        ck.fields.push_back({"u2", true, true, s.u2.data()});
        ck.fields.push_back({"w1", true, true, s.w1.data()});
        ck.fields.push_back({"w2", true, true, s.w2.data()});
        save_checkpoint(fs::path(cfg.out_dir) /
                            ("checkpoint_" + std::to_string(ckpt_index++) +
                             ".ckpt"),
                        ck);
        next_ckpt += cfg.checkpoint_stride;
      }
    }
    if (n < nst) s = solver.step(s, cfg.dt);
  }
  MonitorVerdict energy = energy_bound_check(history, init_sq);
  double slope = decay_fit(history, 8.0, std::min(cfg.T, 64.0));
  bool have_fit = std::isfinite(slope);
  bool decay_ok = !have_fit || slope <= -1.0 / 32.0 + 1e-12;

  Checkpoint final_ck{0,       cfg.n1, cfg.n2, cfg.ny, cfg.period,
                      s.t,     0.0,    cfg.rho0, {}};
  final_ck.fields.push_back({"u1", true, true, s.u1.data()});
  final_ck.fields.push_back({"u2", true, true, s.u2.data()});
  final_ck.fields.push_back({"w1", true, true, s.w1.data()});
  final_ck.fields.push_back({"w2", true, true, s.w2.data()});
  save_checkpoint(fs::path(cfg.out_dir) / "final.ckpt", final_ck);

  bool pass = c_all && h_all && energy.ok && decay_ok;
  nlohmann::ordered_json summary = stream_header(cfg, hash);
  summary["samples"] = history.size();
  summary["projection_events"] = solver.projection_events();
  summary["c_all"] = c_all;
  summary["h_all"] = h_all;
  summary["h_without_c_samples"] = h_and_not_c;
  summary["energy_bound_ok"] = energy.ok;
  if (!energy.ok) summary["energy_first_violation_t"] = energy.first_violation_t;
  if (have_fit) summary["decay_slope"] = slope;
  else summary["decay_slope"] = nullptr;
  summary["decay_ok"] = decay_ok;
  summary["final_x_norm"] = history.back().x_norm;
  summary["verdict"] = pass ? "pass" : "fail";
  write_text(fs::path(cfg.out_dir) / "summary.json", summary.dump(2) + "\n");
  std::cout << "hydro run: " << history.size() << " samples, verdict "
            << (pass ? "pass" : "fail") << "\n";
  return pass ? exit_ok : exit_monitor_failure;
}

inline int run_aniso_pipeline(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  StripGrid g(cfg.n1, cfg.n2, cfg.ny, cfg.period);
  InitialData d =
      make_initial_data(family_of(cfg), cfg.eps0, cfg.rho0, g, cfg.seed);
  std::string hash = data_hash(d);

  std::ofstream jsonl(fs::path(cfg.out_dir) / "diagnostics.jsonl",
                      std::ios::binary);
  std::ofstream csv(fs::path(cfg.out_dir) / "diagnostics.csv",
                    std::ios::binary);
  if (!jsonl || !csv) throw StructuralError("cannot open diagnostics outputs");
  jsonl << stream_header(cfg, hash).dump() << "\n";
  csv << diagnostics_csv_header() << "\n";

  RadiusSchedule sched(cfg.rho0, cfg.schedule_a);
  AnisoSolver solver(g);
  AnisoState s = make_aniso_state(0.0, cfg.eps, d.u0_1, d.u0_2, d.u1_1,
                                  d.u1_2, sched);
  // Weighted initial norm at radius 2 rho0 (time-derivative data is zero).
  double init_sq;
  {
    Field d1 = dy(s.u1), d2 = dy(s.u2);
    Field ev = s.eps * s.v;
    Field dv = dy(ev);
    std::vector<NormBlocks> comps{
        {nullptr, &d1, &s.u1}, {nullptr, &d2, &s.u2}, {nullptr, &dv, &ev}};
    init_sq = x_norm2_blocks(g, comps, 2.0 * cfg.rho0);
  }
  const int nst = steps_of(cfg), stride = stride_of(cfg);
  std::vector<DiagnosticsRecord> history;
  bool c_all = true, h_all = true;
  double max_stag = 0.0;
  for (int n = 0; n <= nst; ++n) {
    if (n % stride == 0 || n == nst) {
      if (cfg.dt > dt_max(g, s.u1, s.u2))
        throw StabilityError(
            "dt exceeds the advective stability ceiling for the current state");
      DiagnosticsRecord r = sample_aniso(s, cfg.eps0, init_sq);
      history.push_back(r);
      jsonl << record_to_json(r).dump() << "\n";
      csv << record_to_csv(r) << "\n";
      c_all = c_all && r.c_holds;
      h_all = h_all && r.h_holds;
      max_stag = std::max(max_stag,
                          staggered_divergence_residual(s.u1, s.u2, s.v));
      max_stag = std::max(
          max_stag, staggered_divergence_residual(s.ut1, s.ut2, s.vt));
      if (max_stag > 1e-9)
        throw ConstraintDriftError("staggered divergence residual above 1e-9",
                                   0, 0, max_stag);
    }
    if (n < nst) s = solver.step(s, cfg.dt);
  }
  MonitorVerdict energy = energy_bound_check(history, init_sq);

  Checkpoint final_ck{1,       cfg.n1, cfg.n2, cfg.ny, cfg.period,
                      s.t,     cfg.eps, cfg.rho0, {}};
  final_ck.fields.push_back({"u1", true, true, s.u1.data()});
  final_ck.fields.push_back({"u2", true, true, s.u2.data()});
  final_ck.fields.push_back({"ut1", true, true, s.ut1.data()});
  final_ck.fields.push_back({"ut2", true, true, s.ut2.data()});
  save_checkpoint(fs::path(cfg.out_dir) / "final.ckpt", final_ck);

  bool pass = c_all && energy.ok;
  nlohmann::ordered_json summary = stream_header(cfg, hash);
  summary["samples"] = history.size();
  summary["projection_events"] = solver.projection_events();
  summary["c_all"] = c_all;
  summary["h_all"] = h_all;
  summary["energy_bound_ok"] = energy.ok;
  summary["max_staggered_divergence"] = max_stag;
  summary["final_weighted_norm"] = history.back().x_norm;
  summary["verdict"] = pass ? "pass" : "fail";
  write_text(fs::path(cfg.out_dir) / "summary.json", summary.dump(2) + "\n");
  std::cout << "aniso run (eps=" << g17(cfg.eps) << "): " << history.size()
            << " samples, verdict " << (pass ? "pass" : "fail") << "\n";
  return pass ? exit_ok : exit_monitor_failure;
}

inline int run_sweep_pipeline(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  StripGrid g(cfg.n1, cfg.n2, cfg.ny, cfg.period);
  SweepPlan plan;
  plan.eps_values = cfg.eps_list;
  plan.family = family_of(cfg);
  plan.eps0 = cfg.eps0;
  plan.rho0 = cfg.rho0;
  plan.schedule_a = cfg.schedule_a;
  plan.seed = cfg.seed;
  plan.T = cfg.T;
  plan.dt = cfg.dt;
  plan.sample_stride = cfg.sample_stride;
  ConvergenceReport rep = run_sweep(g, plan, cfg.threads);

  InitialData d =
      make_initial_data(plan.family, plan.eps0, plan.rho0, g, plan.seed);
  std::string hash = data_hash(d);

  std::string csv = "eps,ok,sup_error,sup_time,u0_mismatch,u1_mismatch\n";
  for (const auto& r : rep.results) {
    csv += g17(r.eps);
    csv += ',';
    csv += r.ok ? "1" : "0";
    csv += ',';
    csv += g17(r.sup_error);
    csv += ',';
    csv += g17(r.sup_time);
    csv += ',';
    csv += g17(r.u0_mismatch);
    csv += ',';
    csv += g17(r.u1_mismatch);
    csv += '\n';
  }
  write_text(fs::path(cfg.out_dir) / "sweep.csv", csv);

  nlohmann::ordered_json j = stream_header(cfg, hash);
  j["results"] = nlohmann::ordered_json::array();
  for (const auto& r : rep.results) {
    nlohmann::ordered_json e;
    e["eps"] = r.eps;
    e["ok"] = r.ok;
    if (!r.ok) e["failure"] = r.failure;
    e["sup_error"] = r.sup_error;
    e["sup_time"] = r.sup_time;
    e["u0_mismatch"] = r.u0_mismatch;
    e["u1_mismatch"] = r.u1_mismatch;
    j["results"].push_back(e);
  }
  j["fit_ok"] = rep.fit_ok;
  if (rep.fit_ok) {
    j["order_q"] = rep.q;
    j["constant_c_hat"] = rep.c_hat;
  }
  j["monotone"] = rep.monotone;
  j["flags"] = rep.flags;
  write_text(fs::path(cfg.out_dir) / "sweep.json", j.dump(2) + "\n");

  bool all_ok = true;
  for (const auto& r : rep.results) all_ok = all_ok && r.ok;
  std::cout << "limit sweep: " << rep.results.size() << " eps values";
  if (rep.fit_ok) std::cout << ", fitted order q=" << g17(rep.q);
  std::cout << (all_ok ? ", all runs ok" : ", some runs FAILED") << "\n";
  return all_ok ? exit_ok : exit_generic;
}

inline int run_verify_pipeline(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  StripGrid g(cfg.n1, cfg.n2, cfg.ny, cfg.period);
  VerifyReport rep = run_verify(g, cfg.seed);
  write_text(fs::path(cfg.out_dir) / "verify.json",
             verify_to_json(rep).dump(2) + "\n");
  std::cout << "verify: radius identity "
            << (rep.radius_identity_ok ? "ok" : "FAIL") << ", poincare "
            << (rep.poincare_ok ? "ok" : "FAIL") << ", certify "
            << (rep.certify_ok ? "ok" : "FAIL") << ", equivalence "
            << (rep.equivalence_ok ? "ok" : "FAIL") << "\n";
  return rep.all_ok() ? exit_ok : exit_monitor_failure;
}

inline int run_dump_symbols(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  StripGrid g(cfg.n1, cfg.n2, cfg.ny, cfg.period);
  std::vector<double> kappas = grid_kappas(g);
  const struct {
    SymbolKind kind;
    const char* name;
  } kinds[] = {{SymbolKind::x, "x"},
               {SymbolKind::y_first_order, "y1"},
               {SymbolKind::y_zeroth_order, "y0"}};
  for (const auto& k : kinds) {
    NormSymbol s(cfg.rho0, k.kind, kappas);
    std::ofstream f(fs::path(cfg.out_dir) /
                        (std::string("symbols_") + k.name + ".csv"),
                    std::ios::binary);
    if (!f) throw StructuralError("cannot open symbol dump output");
    s.dump_csv(f);
  }
  std::cout << "dumped " << kappas.size() << " symbol values per kind at rho0="
            << g17(cfg.rho0) << "\n";
  return exit_ok;
}

}  // namespace runner_detail

// Exception-to-exit-code boundary; every pipeline error lands here.
inline int run_config(const RunConfig& cfg) {
  try {
    validate_config(cfg);
    switch (cfg.system) {
      case SystemKind::hydro: return runner_detail::run_hydro_pipeline(cfg);
      case SystemKind::aniso: return runner_detail::run_aniso_pipeline(cfg);
      case SystemKind::limit_sweep: return runner_detail::run_sweep_pipeline(cfg);
      case SystemKind::verify: return runner_detail::run_verify_pipeline(cfg);
      case SystemKind::dump_symbols: return runner_detail::run_dump_symbols(cfg);
    }
    return exit_generic;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const BlowUpError& e) {
    std::cerr << "blow-up: " << e.what()
              << " (last valid t=" << g17(e.last_valid_time) << ")\n";
    return exit_blowup;
  } catch (const ConstraintDriftError& e) {
    std::cerr << "constraint drift: " << e.what() << " at mode (" << e.k1
              << "," << e.k2 << "), residual " << g17(e.residual) << "\n";
    return exit_constraint_drift;
  } catch (const StabilityError& e) {
    std::cerr << "stability rejection: " << e.what() << "\n";
    return exit_stability_rejection;
  } catch (const PressureCompatibilityError& e) {
    std::cerr << "pressure compatibility: " << e.what() << "\n";
    return exit_pressure_compat;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_generic;
  }
}

}  // namespace stripflow
