#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stripflow/aniso.hpp"
#include "stripflow/limit.hpp"

namespace stripflow {

inline constexpr double monitor_slack = 0.05;

// One sampled row of the run log. Verdicts are pure functions of the other
// fields; energy_cap is the run constant 16(|u0|^2 + |u1|^2)(1 + slack)
// carried into every record so that holds.
struct DiagnosticsRecord {
  double t = 0.0;
  double rho = 0.0;
  double x_norm = 0.0;
  double y_norm = 0.0;
  double energy = 0.0;            // e^{t/16} x_norm^2
  double energy_cap = 0.0;        // 16 (|u0|^2 + |u1|^2) (1 + slack), radius 2 rho0
  double bound = 0.0;             // 4 eps0 e^{-t/32}
  double hypothesis_bound = 0.0;  // 8 eps0 e^{-t/32}
  bool c_holds = true;
  bool h_holds = true;
  bool energy_bound_holds = true;
  // Secondary monitored quantities (logged, no verdicts): the vertical
  // derivative pair and the time-derivative pair, both at radius rho/2.
  double dy_half_norm = 0.0;
  double wt_half_norm = 0.0;
};

inline double x_norm(const HydroState& s, double rho) {
  return x_norm(s.u1, s.u2, s.w1, s.w2, rho);
}
inline double y_norm(const HydroState& s, double rho) {
  return y_norm(s.u1, s.u2, s.w1, s.w2, rho);
}

struct BootstrapVerdict {
  bool c_holds = true;
  bool h_holds = true;
};

inline BootstrapVerdict bootstrap_monitor(const DiagnosticsRecord& r,
                                          double eps0,
                                          double slack = monitor_slack) {
  BootstrapVerdict v;
  double decay = std::exp(-r.t / 32.0);
  v.c_holds = r.x_norm <= 4.0 * eps0 * decay * (1.0 + slack);
  v.h_holds = r.x_norm <= 8.0 * eps0 * decay * (1.0 + slack);
  return v;
}

struct MonitorVerdict {
  bool ok = true;
  double first_violation_t = std::numeric_limits<double>::quiet_NaN();
};

// e^{t/16} x_norm(t)^2 <= 16 (|u0|^2 + |u1|^2)_{X_{2 rho0}} (1 + slack)
// at every sample; init_norm_sq = the parenthesized sum.
inline MonitorVerdict energy_bound_check(
    const std::vector<DiagnosticsRecord>& history, double init_norm_sq,
    double slack = monitor_slack) {
  MonitorVerdict v;
  double cap = 16.0 * init_norm_sq * (1.0 + slack);
  for (const auto& r : history) {
    if (std::exp(r.t / 16.0) * r.x_norm * r.x_norm > cap) {
      v.ok = false;
      v.first_violation_t = r.t;
      break;
    }
  }
  return v;
}

inline double initial_norm_sq(const Field& u0_1, const Field& u0_2,
                              const Field& u1_1, const Field& u1_2,
                              double rho0) {
  const StripGrid& g = u0_1.grid();
  Field d01 = dy(u0_1), d02 = dy(u0_2), d11 = dy(u1_1), d12 = dy(u1_2);
  std::vector<NormBlocks> c0{{nullptr, &d01, &u0_1}, {nullptr, &d02, &u0_2}};
  std::vector<NormBlocks> c1{{nullptr, &d11, &u1_1}, {nullptr, &d12, &u1_2}};
  return x_norm2_blocks(g, c0, 2.0 * rho0) + x_norm2_blocks(g, c1, 2.0 * rho0);
}

// Log-linear least-squares fit of log x_norm against t over [t_lo, t_hi];
// NaN when fewer than two usable samples.
inline double decay_fit(const std::vector<DiagnosticsRecord>& history,
                        double t_lo = 8.0, double t_hi = 64.0) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : history) {
    if (r.t < t_lo || r.t > t_hi) continue;
    if (!(r.x_norm > 0.0) || !std::isfinite(r.x_norm)) continue;
    double y = std::log(r.x_norm);
    n += 1;
    sx += r.t;
    sy += y;
    sxx += r.t * r.t;
    sxy += r.t * y;
  }
  double det = n * sxx - sx * sx;
  if (n < 2 || det <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / det;
}

inline DiagnosticsRecord sample_hydro(const HydroState& s, double eps0,
                                      double init_norm_sq,
                                      double slack = monitor_slack) {
  DiagnosticsRecord r;
  r.t = s.t;
  r.rho = s.schedule.radius(s.t);
  r.x_norm = x_norm(s, r.rho);
  r.y_norm = y_norm(s, r.rho);
  r.energy = std::exp(s.t / 16.0) * r.x_norm * r.x_norm;
  r.energy_cap = 16.0 * init_norm_sq * (1.0 + slack);
  double decay = std::exp(-s.t / 32.0);
  r.bound = 4.0 * eps0 * decay;
  r.hypothesis_bound = 8.0 * eps0 * decay;
  r.c_holds = r.x_norm <= r.bound * (1.0 + slack);
  r.h_holds = r.x_norm <= r.hypothesis_bound * (1.0 + slack);
  r.energy_bound_holds = r.energy <= r.energy_cap;
  {
    const StripGrid& g = s.u1.grid();
    double rh = 0.5 * r.rho;
    Field dw1 = dy(s.w1), dw2 = dy(s.w2);
    Field du1 = dy(s.u1), du2 = dy(s.u2);
    Field d2u1 = dyy(s.u1), d2u2 = dyy(s.u2);
    std::vector<NormBlocks> cdy{{&dw1, &d2u1, &du1}, {&dw2, &d2u2, &du2}};
    r.dy_half_norm = std::sqrt(x_norm2_blocks(g, cdy, rh));
    auto wdot = acceleration(g, s.u1, s.u2, s.w1, s.w2);
    std::vector<NormBlocks> cwt{{&wdot.first, &dw1, &s.w1},
                                {&wdot.second, &dw2, &s.w2}};
    r.wt_half_norm = std::sqrt(x_norm2_blocks(g, cwt, rh));
  }
  return r;
}

// Anisotropic analogue: x_norm is the eps-weighted norm of (u, eps v);
// bound is the 4 delta0 e^{-t/32} decay statement with delta0 = the run's
// data amplitude. Secondary half-radius quantities are hydrostatic-only.
inline DiagnosticsRecord sample_aniso(const AnisoState& s, double delta0,
                                      double init_norm_sq,
                                      double slack = monitor_slack) {
  DiagnosticsRecord r;
  r.t = s.t;
  r.rho = s.schedule.radius(s.t);
  r.x_norm = weighted_norm(s, r.rho);
  {
    const StripGrid& g = s.u1.grid();
    Field d1 = dy(s.u1), d2 = dy(s.u2);
    Field ev = s.eps * s.v;
    Field evt = s.eps * s.vt;
    Field dv = dy(ev);
    std::vector<NormBlocks> comps{
        {&s.ut1, &d1, &s.u1}, {&s.ut2, &d2, &s.u2}, {&evt, &dv, &ev}};
    r.y_norm = std::sqrt(y_norm2_blocks(g, comps, r.rho));
  }
  r.energy = std::exp(s.t / 16.0) * r.x_norm * r.x_norm;
  r.energy_cap = 16.0 * init_norm_sq * (1.0 + slack);
  double decay = std::exp(-s.t / 32.0);
  r.bound = 4.0 * delta0 * decay;
  r.hypothesis_bound = 8.0 * delta0 * decay;
  r.c_holds = r.x_norm <= r.bound * (1.0 + slack);
  r.h_holds = r.x_norm <= r.hypothesis_bound * (1.0 + slack);
  r.energy_bound_holds = r.energy <= r.energy_cap;
  return r;
}

inline nlohmann::ordered_json record_to_json(const DiagnosticsRecord& r) {
  nlohmann::ordered_json j;
  j["t"] = r.t;
  j["rho"] = r.rho;
  j["x_norm"] = r.x_norm;
  j["y_norm"] = r.y_norm;
  j["energy"] = r.energy;
  j["energy_cap"] = r.energy_cap;
  j["bound"] = r.bound;
  j["hypothesis_bound"] = r.hypothesis_bound;
  j["c_holds"] = r.c_holds;
  j["h_holds"] = r.h_holds;
  j["energy_bound_holds"] = r.energy_bound_holds;
  j["dy_half_norm"] = r.dy_half_norm;
  j["wt_half_norm"] = r.wt_half_norm;
  return j;
}

inline std::string diagnostics_csv_header() {
  return "t,rho,x_norm,y_norm,energy,energy_cap,bound,hypothesis_bound,"
         "c_holds,h_holds,energy_bound_holds,dy_half_norm,wt_half_norm";
}

inline std::string record_to_csv(const DiagnosticsRecord& r) {
  std::string s;
  s += g17(r.t);
  s += ',';
  s += g17(r.rho);
  s += ',';
  s += g17(r.x_norm);
  s += ',';
  s += g17(r.y_norm);
  s += ',';
  s += g17(r.energy);
  s += ',';
  s += g17(r.energy_cap);
  s += ',';
  s += g17(r.bound);
  s += ',';
  s += g17(r.hypothesis_bound);
  s += ',';
  s += r.c_holds ? "1" : "0";
  s += ',';
  s += r.h_holds ? "1" : "0";
  s += ',';
  s += r.energy_bound_holds ? "1" : "0";
  s += ',';
  s += g17(r.dy_half_norm);
  s += ',';
  s += g17(r.wt_half_norm);
  return s;
}

}  // namespace stripflow
