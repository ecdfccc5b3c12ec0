// Acceptance suite: runs the full diagnostics stack and prints one verdict
// line per criterion; exits nonzero if any criterion fails.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "stripflow/limit.hpp"
#include "stripflow/runner.hpp"

using namespace stripflow;

namespace {

struct Criterion {
  std::string text = "not evaluated";
  bool pass = false;
  std::string detail;
};

std::vector<Criterion> crit(12);

void set(int id, bool pass, const std::string& text,
         const std::string& detail) {
  crit[id - 1] = {text, pass, detail};
  std::cerr << "[accept] criterion " << id << (pass ? " pass" : " FAIL")
            << ": " << detail << "\n";
}

void fail_block(std::initializer_list<int> ids, const std::string& text,
                const std::string& why) {
  for (int id : ids) crit[id - 1] = {text, false, "exception: " + why};
}

std::string num(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

double rel_l2_diff(const HydroState& a, const HydroState& b) {
  double nuM = l2norm2(a.u1 - b.u1) + l2norm2(a.u2 - b.u2);
  double den = l2norm2(b.u1) + l2norm2(b.u2);
  return std::sqrt(nuM / den);
}

// Criteria 1, 2 and the tangential half of 10: one long run of the
// hydrostatic system with per-step compatibility tracking.
void block_long_hydro() {
  const std::string t1 =
      "tangential Gevrey norm stays below 4 eps0 exp(-t/32) on every sample "
      "of a T=64 run (hypothesis envelope included)";
  const std::string t2 =
      "fitted decay rate over t in [8,64] is at most -1/32 and the weighted "
      "energy stays below 16x its initial value";
  const std::string t10 =
      "divergence compatibility holds every step: vertical-mean residual "
      "within 1e-10 of the field scale, staggered vertical residual within "
      "1e-9";
  try {
    std::cerr << "[accept] long tangential run (32x32x65, T=64)...\n";
    StripGrid g(32, 32, 65);
    const double eps0 = 1e-3, rho0 = 0.5, dt = 0.02, T = 64.0;
    InitialData d = make_initial_data(DataFamily::stream, eps0, rho0, g, 1);
    double init_sq = initial_norm_sq(d.u0_1, d.u0_2, d.u1_1, d.u1_2, rho0);
    HydroSolver solver(g);
    HydroState s{0.0, d.u0_1, d.u0_2, d.u1_1, d.u1_2, RadiusSchedule(rho0)};
    const int nst = static_cast<int>(std::lround(T / dt));
    const int stride = 25;  // sample every 0.5 time units
    std::vector<DiagnosticsRecord> hist;
    bool c_all = true, h_all = true;
    double max_ratio = 0.0, max_energy_ratio = 0.0, worst_compat = 0.0;
    for (int n = 0; n <= nst; ++n) {
      if (n % stride == 0 || n == nst) {
        DiagnosticsRecord r = sample_hydro(s, eps0, init_sq);
        hist.push_back(r);
        c_all = c_all && r.c_holds;
        h_all = h_all && r.h_holds;
        max_ratio = std::max(max_ratio, r.x_norm / r.bound);
        max_energy_ratio =
            std::max(max_energy_ratio, r.energy / (16.0 * init_sq));
      }
      CompatReport rep = check_compatibility(s.u1, s.u2, s.w1, s.w2);
      double scale = rep.u_scale > 0.0 ? rep.u_scale : 1.0;
      worst_compat = std::max(
          worst_compat, std::max(rep.u_residual, rep.w_residual) / scale);
      if (n < nst) s = solver.step(s, dt);
    }
    double slope = decay_fit(hist, 8.0, 64.0);
    MonitorVerdict energy = energy_bound_check(hist, init_sq);

    set(1, c_all && h_all, t1,
        "max norm/bound ratio " + num(max_ratio) + " over " +
            std::to_string(hist.size()) + " samples");
    set(2,
        std::isfinite(slope) && slope <= -1.0 / 32.0 + 1e-12 && energy.ok,
        t2,
        "slope " + num(slope) + " (cap " + num(-1.0 / 32.0) +
            "), max energy ratio " + num(max_energy_ratio));
    // Staggered half is filled in by the anisotropic block.
    crit[9].text = t10;
    crit[9].pass = worst_compat <= 1e-10;
    crit[9].detail = "tangential residual " + num(worst_compat) + " of scale";
  } catch (const std::exception& e) {
    fail_block({1, 2, 10}, t1, e.what());
  }
}

// Criterion 3: the vanishing-anisotropy sweep converges at measurable order.
void block_sweep() {
  const std::string t3 =
      "sup-in-time Gevrey gap between the anisotropic and hydrostatic runs "
      "shrinks monotonically over eps in {0.2,0.1,0.05} with fitted order at "
      "least 0.9";
  try {
    std::cerr << "[accept] vanishing-anisotropy sweep (16x16x33, T=32)...\n";
    StripGrid g(16, 16, 33);
    SweepPlan plan;
    plan.eps_values = {0.2, 0.1, 0.05};
    plan.family = DataFamily::stream;
    plan.eps0 = 1e-3;
    plan.rho0 = 0.5;
    plan.seed = 1;
    plan.T = 32.0;
    plan.dt = 0.02;
    plan.sample_stride = 0.5;
    ConvergenceReport rep = run_sweep(g, plan, 1);
    bool runs_ok = true;
    std::string errs;
    for (const auto& r : rep.results) {
      runs_ok = runs_ok && r.ok;
      errs += " e(" + num(r.eps) + ")=" + num(r.sup_error);
    }
    set(3, runs_ok && rep.monotone && rep.fit_ok && rep.q >= 0.9, t3,
        "order q=" + (rep.fit_ok ? num(rep.q) : std::string("none")) + errs);
  } catch (const std::exception& e) {
    fail_block({3}, t3, e.what());
  }
}

// Criterion 4 and the staggered half of 10: anisotropic run at eps=0.1.
void block_aniso() {
  const std::string t4 =
      "anisotropy-weighted norm of the eps=0.1 run stays below 4 delta0 "
      "exp(-t/32) on every sample of a T=32 run";
  try {
    std::cerr << "[accept] anisotropic run (16x16x33, eps=0.1, T=32)...\n";
    StripGrid g(16, 16, 33);
    const double delta0 = 1e-3, rho0 = 0.5, dt = 0.02, T = 32.0;
    InitialData d = make_initial_data(DataFamily::stream, delta0, rho0, g, 1);
    AnisoSolver solver(g);
    AnisoState s = make_aniso_state(0.0, 0.1, d.u0_1, d.u0_2, d.u1_1, d.u1_2,
                                    RadiusSchedule(rho0));
    double init_sq;
    {
      Field d1 = dy(s.u1), d2 = dy(s.u2);
      Field ev = s.eps * s.v;
      Field dv = dy(ev);
      std::vector<NormBlocks> comps{
          {nullptr, &d1, &s.u1}, {nullptr, &d2, &s.u2}, {nullptr, &dv, &ev}};
      init_sq = x_norm2_blocks(g, comps, 2.0 * rho0);
    }
    const int nst = static_cast<int>(std::lround(T / dt));
    bool c_all = true;
    double max_ratio = 0.0, max_stag = 0.0;
    for (int n = 0; n <= nst; ++n) {
      if (n % 25 == 0 || n == nst) {
        DiagnosticsRecord r = sample_aniso(s, delta0, init_sq);
        c_all = c_all && r.c_holds;
        max_ratio = std::max(max_ratio, r.x_norm / r.bound);
      }
      max_stag = std::max(
          max_stag, staggered_divergence_residual(s.u1, s.u2, s.v));
      max_stag = std::max(
          max_stag, staggered_divergence_residual(s.ut1, s.ut2, s.vt));
      if (n < nst) s = solver.step(s, dt);
    }
    set(4, c_all, t4,
        "max norm/bound ratio " + num(max_ratio) + " over " +
            std::to_string(nst) + " steps");
    bool tangential_half = crit[9].pass;
    crit[9].pass = tangential_half && max_stag <= 1e-9;
    crit[9].detail += ", staggered residual " + num(max_stag) + " over " +
                      std::to_string(nst) + " steps";
    std::cerr << "[accept] criterion 10 "
              << (crit[9].pass ? "pass" : "FAIL") << ": " << crit[9].detail
              << "\n";
  } catch (const std::exception& e) {
    fail_block({4}, t4, e.what());
    crit[9].pass = false;
    crit[9].detail += std::string(", staggered half failed: ") + e.what();
  }
}

// Criterion 5: scheme accuracy against the explicit reference integrator.
void block_scheme_accuracy() {
  const std::string t5 =
      "semi-implicit steps track a tenfold-finer explicit reference within "
      "1e-4 at dt=0.002 with second-order closure; the reference itself "
      "refines at fourth order";
  try {
    std::cerr << "[accept] scheme accuracy (8x8x17)...\n";
    StripGrid g(8, 8, 17);
    InitialData d = make_initial_data(DataFamily::stream, 0.5, 0.5, g, 1);
    HydroState s0{0.0, d.u0_1, d.u0_2, d.u1_1, d.u1_2, RadiusSchedule(0.5)};
    HydroOptions noproj;
    noproj.projection = false;
    noproj.compat_tol = 1e18;
    HydroSolver raw(g, noproj);

    const double T = 1.0, dt_ref = 2e-4;
    HydroState ref = s0;
    for (int i = 0; i < static_cast<int>(std::lround(T / dt_ref)); ++i)
      ref = raw.reference_step_rk4(ref, dt_ref);
    auto imex_err = [&](double dt) {
      HydroState s = s0;
      HydroSolver sv(g, noproj);
      for (int i = 0; i < static_cast<int>(std::lround(T / dt)); ++i)
        s = sv.step(s, dt);
      return rel_l2_diff(s, ref);
    };
    double e_main = imex_err(0.002);
    double slope = std::log2(imex_err(0.004) / e_main);

    // Richardson closure of the explicit reference on a shorter window.
    auto rk4_run = [&](double dt) {
      HydroState s = s0;
      for (int i = 0; i < static_cast<int>(std::lround(0.4 / dt)); ++i)
        s = raw.reference_step_rk4(s, dt);
      return s;
    };
    HydroState r1 = rk4_run(0.02), r2 = rk4_run(0.01), r3 = rk4_run(0.005);
    double d12 = rel_l2_diff(r1, r2), d23 = rel_l2_diff(r2, r3);
    double ref_slope = std::log2(d12 / d23);

    set(5, e_main <= 1e-4 && slope >= 1.8 && ref_slope >= 3.7, t5,
        "error " + num(e_main) + ", closure order " + num(slope) +
            ", reference order " + num(ref_slope));
  } catch (const std::exception& e) {
    fail_block({5}, t5, e.what());
  }
}

// Criteria 6-9: the pure property-check suite.
void block_verify() {
  const std::string t6 =
      "analyticity-radius schedule satisfies rho' = -a(rho - rho0/2) to "
      "1e-12 on 1000 log-spaced times for four starting radii";
  const std::string t7 =
      "discrete wall-vanishing fields obey ||f||^2 <= 4 ||dy f||^2 on 100 "
      "random draws, sharp on the half-period sine";
  const std::string t8 =
      "certified weight-inequality constants are stable to 1e-9 under "
      "doubling the scan depth";
  const std::string t9 =
      "squared Gevrey norm is sandwiched between the half-radius and "
      "full-radius axis norms on 100 random band-limited fields";
  try {
    std::cerr << "[accept] property checks (16x16x33)...\n";
    StripGrid g(16, 16, 33);
    VerifyReport rep = run_verify(g, 1);
    set(6, rep.radius_identity_ok, t6,
        "max residual " + num(rep.radius_identity_max));
    set(7, rep.poincare_ok, t7,
        "worst ratio " + num(rep.poincare_worst_ratio) + ", sharpness error " +
            num(rep.poincare_sharp_err));
    set(8, rep.certify_ok, t8,
        "drifts " + num(rep.certify_c1_drift) + " and " +
            num(rep.certify_c2_drift));
    set(9, rep.equivalence_ok, t9,
        std::to_string(rep.equivalence_failures) + " failures in 200 checks");
  } catch (const std::exception& e) {
    fail_block({6, 7, 8, 9}, t6, e.what());
  }
}

// Criterion 11: the computed initial acceleration matches the first-step
// difference quotient of the velocity derivative.
void block_quotient() {
  const std::string t11 =
      "initial acceleration agrees with the first-step difference quotient "
      "at first order in dt";
  try {
    std::cerr << "[accept] initial-acceleration quotient (8x8x17)...\n";
    StripGrid g(8, 8, 17);
    InitialData d = make_initial_data(DataFamily::stream, 0.5, 0.5, g, 2);
    HydroState s0{0.0, d.u0_1, d.u0_2, d.u1_1, d.u1_2, RadiusSchedule(0.5)};
    auto [a1, a2] = initial_acceleration(d.u0_1, d.u0_2, d.u1_1, d.u1_2);
    auto quotient_err = [&](double dt) {
      HydroSolver solver(g);
      HydroState s1 = solver.step(s0, dt);
      Field q1 = s1.w1 - s0.w1;
      q1 *= 1.0 / dt;
      Field q2 = s1.w2 - s0.w2;
      q2 *= 1.0 / dt;
      return std::sqrt(l2norm2(q1 - a1) + l2norm2(q2 - a2)) /
             std::sqrt(l2norm2(a1) + l2norm2(a2));
    };
    double e1 = quotient_err(0.02), e2 = quotient_err(0.01);
    double slope = std::log2(e1 / e2);
    set(11, e1 < 0.2 && slope > 0.9, t11,
        "error " + num(e1) + " at dt=0.02, order " + num(slope));
  } catch (const std::exception& e) {
    fail_block({11}, t11, e.what());
  }
}

// Criterion 12: rerunning a configuration reproduces the diagnostics stream
// byte for byte.
void block_determinism() {
  const std::string t12 =
      "independent reruns of the same configuration emit byte-identical "
      "diagnostics, summaries and checkpoints";
  namespace fs = std::filesystem;
  fs::path scratch = fs::temp_directory_path() / "stripflow_acceptance";
  try {
    std::cerr << "[accept] rerun determinism (16x16x17, T=2)...\n";
    fs::remove_all(scratch);
    RunConfig cfg;
    cfg.system = SystemKind::hydro;
    cfg.n1 = 16;
    cfg.n2 = 16;
    cfg.ny = 17;
    cfg.dt = 0.02;
    cfg.T = 2.0;
    cfg.sample_stride = 0.1;
    cfg.out_dir = (scratch / "a").string();
    int rc1 = run_config(cfg);
    cfg.out_dir = (scratch / "b").string();
    int rc2 = run_config(cfg);
    bool same_jsonl = slurp(scratch / "a" / "diagnostics.jsonl") ==
                      slurp(scratch / "b" / "diagnostics.jsonl");
    bool same_summary = slurp(scratch / "a" / "summary.json") ==
                        slurp(scratch / "b" / "summary.json");
    bool same_ckpt = slurp(scratch / "a" / "final.ckpt") ==
                     slurp(scratch / "b" / "final.ckpt");
    bool nonempty = !slurp(scratch / "a" / "diagnostics.jsonl").empty();
    set(12,
        rc1 == 0 && rc2 == 0 && nonempty && same_jsonl && same_summary &&
            same_ckpt,
        t12,
        std::string("exit codes ") + std::to_string(rc1) + "/" +
            std::to_string(rc2) + ", jsonl " + (same_jsonl ? "==" : "!=") +
            ", summary " + (same_summary ? "==" : "!=") + ", checkpoint " +
            (same_ckpt ? "==" : "!="));
    fs::remove_all(scratch);
  } catch (const std::exception& e) {
    fail_block({12}, t12, e.what());
    fs::remove_all(scratch);
  }
}

}  // namespace

int main() {
  block_long_hydro();
  block_sweep();
  block_aniso();
  block_scheme_accuracy();
  block_verify();
  block_quotient();
  block_determinism();

  int failures = 0;
  for (int i = 0; i < 12; ++i) {
    const Criterion& c = crit[i];
    if (!c.pass) ++failures;
    std::cout << (c.pass ? "PASS" : "FAIL") << " criterion " << (i + 1)
              << ": " << c.text;
    if (!c.detail.empty()) std::cout << " [" << c.detail << "]";
    std::cout << "\n";
  }
  if (failures == 0) {
    std::cout << "acceptance: all 12 criteria pass\n";
    return 0;
  }
  std::cout << "acceptance: " << failures << " criteria FAILED\n";
  return 1;
}
