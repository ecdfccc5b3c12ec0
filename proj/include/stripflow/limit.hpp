#pragma once

#include <cmath>
#include <future>
#include <string>
#include <utility>
#include <vector>

#include "stripflow/aniso.hpp"

namespace stripflow {

// Matched-run experiment: one reference run of the hydrostatic solver,
// one anisotropic run per eps, errors measured in X_{rho(t)/2}.
struct SweepPlan {
  std::vector<double> eps_values;  // strictly decreasing, all <= 0.5
  DataFamily family = DataFamily::stream;
  double eps0 = 1e-3;   // amplitude of the shared initial data
  double rho0 = 0.5;
  double schedule_a = 1.0 / 96.0;
  std::uint64_t seed = 1;
  double T = 64.0;
  double dt = 0.02;
  double sample_stride = 1.0;
  // Optional deliberate data mismatch: the anisotropic runs start from
  // (1 + u0_offset) u0, exercising the data-mismatch term of the bound.
  double u0_offset = 0.0;

  void validate() const {
    if (eps_values.empty())
      throw ConfigError("sweep: eps_values must be non-empty");
    for (std::size_t i = 0; i < eps_values.size(); ++i) {
      if (!(eps_values[i] > 0.0) || eps_values[i] > 0.5)
        throw ConfigError("sweep: eps_values must lie in (0, 0.5]");
      if (i > 0 && !(eps_values[i] < eps_values[i - 1]))
        throw ConfigError("sweep: eps_values must be strictly decreasing");
    }
    if (!(T > 0.0)) throw ConfigError("sweep: T must be positive");
    if (!(dt > 0.0) || dt > T) throw ConfigError("sweep: dt must lie in (0, T]");
    if (!(sample_stride > 0.0))
      throw ConfigError("sweep: sample_stride must be positive");
  }
};

struct EpsResult {
  double eps = 0.0;
  bool ok = false;
  std::string failure;       // non-empty when ok is false
  double sup_error = 0.0;    // sup_t |u_eps(t) - u(t)|_{X_{rho(t)/2}}
  double sup_time = 0.0;     // sample time attaining the sup
  double u0_mismatch = 0.0;  // |u0_eps - u0|_{X_{2 rho0}}
  double u1_mismatch = 0.0;  // |u1_eps - u1|_{X_{2 rho0}}
};

struct ConvergenceReport {
  std::vector<EpsResult> results;
  bool fit_ok = false;   // needs >= 3 successful eps
  double q = 0.0;        // fitted order: e(eps) ~ c_hat * eps^q
  double c_hat = 0.0;
  bool monotone = true;  // e nonincreasing as eps decreases, 10% tolerance
  std::vector<std::string> flags;
};

// X norm of the tangential difference between the two systems' states at a
// common time, derivative slots filled from the respective w/ut fields.
inline double error_norm(const HydroState& a, const AnisoState& b, double rho) {
  if (&a.u1.grid() != &b.u1.grid())
    throw StructuralError("error_norm: states live on different grids");
  if (std::abs(a.t - b.t) > 1e-9 * std::max(1.0, std::abs(a.t)))
    throw StructuralError("error_norm: states are at different times");
  const StripGrid& g = a.u1.grid();
  Field e1 = b.u1 - a.u1, e2 = b.u2 - a.u2;
  Field f1 = b.ut1 - a.w1, f2 = b.ut2 - a.w2;
  Field d1 = dy(e1), d2 = dy(e2);
  std::vector<NormBlocks> comps{{&f1, &d1, &e1}, {&f2, &d2, &e2}};
  return std::sqrt(x_norm2_blocks(g, comps, rho));
}

namespace limit_detail {

struct HydroSamples {
  std::vector<HydroState> states;  // one per sample time, in order
};

inline int stride_steps(const SweepPlan& plan) {
  int s = static_cast<int>(std::lround(plan.sample_stride / plan.dt));
  return std::max(1, s);
}

inline int total_steps(const SweepPlan& plan) {
  return static_cast<int>(std::lround(plan.T / plan.dt));
}

inline HydroSamples run_hydro_reference(const StripGrid& g,
                                        const SweepPlan& plan,
                                        const InitialData& d) {
  RadiusSchedule sched(plan.rho0, plan.schedule_a);
  HydroSolver solver(g);
  HydroState s{0.0, d.u0_1, d.u0_2, d.u1_1, d.u1_2, sched};
  HydroSamples out;
  const int nst = total_steps(plan), stride = stride_steps(plan);
  for (int n = 0; n <= nst; ++n) {
    if (n % stride == 0) out.states.push_back(s);
    if (n < nst) s = solver.step(s, plan.dt);
  }
  return out;
}

inline EpsResult run_one_eps(const StripGrid& g, const SweepPlan& plan,
                             const InitialData& d, const HydroSamples& ref,
                             double eps) {
  EpsResult r;
  r.eps = eps;
  try {
    RadiusSchedule sched(plan.rho0, plan.schedule_a);
    Field au0_1 = d.u0_1, au0_2 = d.u0_2;
    if (plan.u0_offset != 0.0) {
      au0_1 *= 1.0 + plan.u0_offset;
      au0_2 *= 1.0 + plan.u0_offset;
    }
    {
      Field e1 = au0_1 - d.u0_1, e2 = au0_2 - d.u0_2;
      Field d1 = dy(e1), d2 = dy(e2);
      std::vector<NormBlocks> comps{{nullptr, &d1, &e1}, {nullptr, &d2, &e2}};
      r.u0_mismatch = std::sqrt(x_norm2_blocks(g, comps, 2.0 * plan.rho0));
      r.u1_mismatch = 0.0;  // matched time-derivative data by construction
    }
    AnisoSolver solver(g);
    AnisoState s = make_aniso_state(0.0, eps, au0_1, au0_2, d.u1_1, d.u1_2, sched);
    const int nst = total_steps(plan), stride = stride_steps(plan);
    std::size_t isamp = 0;
    for (int n = 0; n <= nst; ++n) {
      if (n % stride == 0) {
        const HydroState& h = ref.states.at(isamp++);
        double rho_half = 0.5 * sched.radius(h.t);
        double e = error_norm(h, s, rho_half);
        if (e > r.sup_error) {
          r.sup_error = e;
          r.sup_time = h.t;
        }
      }
      if (n < nst) s = solver.step(s, plan.dt);
    }
    r.ok = true;
  } catch (const std::exception& ex) {
    r.ok = false;
    r.failure = ex.what();
  }
  return r;
}

}  // namespace limit_detail

inline ConvergenceReport run_sweep(const StripGrid& g, const SweepPlan& plan,
                                   int threads = 1) {
  plan.validate();
  InitialData d = make_initial_data(plan.family, plan.eps0, plan.rho0, g,
                                    plan.seed);
  limit_detail::HydroSamples ref =
      limit_detail::run_hydro_reference(g, plan, d);
  ConvergenceReport rep;
  rep.results.resize(plan.eps_values.size());
  if (threads > 1) {
    std::vector<std::future<EpsResult>> futs;
    futs.reserve(plan.eps_values.size());
    for (double eps : plan.eps_values)
      futs.push_back(std::async(std::launch::async, [&, eps] {
        return limit_detail::run_one_eps(g, plan, d, ref, eps);
      }));
    for (std::size_t i = 0; i < futs.size(); ++i)
      rep.results[i] = futs[i].get();  // merged in plan order
  } else {
    for (std::size_t i = 0; i < plan.eps_values.size(); ++i)
      rep.results[i] =
          limit_detail::run_one_eps(g, plan, d, ref, plan.eps_values[i]);
  }

  std::vector<double> le, lq;
  for (const auto& r : rep.results) {
    if (!r.ok) {
      rep.flags.push_back("run failed at eps=" + g17(r.eps) + ": " + r.failure);
      continue;
    }
    if (r.sup_error > 0.0) {
      le.push_back(std::log(r.sup_error));
      lq.push_back(std::log(r.eps));
    }
  }
  for (std::size_t i = 0; i + 1 < rep.results.size(); ++i) {
    const auto &hi = rep.results[i], &lo = rep.results[i + 1];
    if (hi.ok && lo.ok && lo.sup_error > 1.10 * hi.sup_error) {
      rep.monotone = false;
      rep.flags.push_back("sup error increased from eps=" + g17(hi.eps) +
                          " to eps=" + g17(lo.eps));
    }
  }
  if (le.size() >= 3) {
    // log e = q log eps + log c, least squares
    double n = static_cast<double>(le.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < le.size(); ++i) {
      sx += lq[i];
      sy += le[i];
      sxx += lq[i] * lq[i];
      sxy += lq[i] * le[i];
    }
    double det = n * sxx - sx * sx;
    if (det > 0.0) {
      rep.q = (n * sxy - sx * sy) / det;
      rep.c_hat = std::exp((sy * sxx - sx * sxy) / det);
      rep.fit_ok = true;
    }
  }
  if (!rep.fit_ok)
    rep.flags.push_back("order fit skipped: fewer than 3 usable points");
  return rep;
}

}  // namespace stripflow
