#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <utility>

#include "stripflow/field.hpp"
#include "stripflow/norms.hpp"

namespace stripflow {

// v = -int_0^y div_x u; the vertical velocity is slaved to the tangential
// one by incompressibility and the bottom wall condition.
inline Field recover_v(const Field& u1, const Field& u2) {
  Field div = dx(u1, 1);
  div += dx(u2, 2);
  Field v = integral_y_cumulative(div);
  v *= -1.0;
  return v;
}

// Per-mode vertical means of the tangential divergence. Compatibility
// requires them to vanish; the physical-space max is what the examples
// quote, the worst spectral mode is what drift errors carry.
struct CompatReport {
  double u_residual = 0.0;  // max over collocation nodes of |int div_x u dy|
  double w_residual = 0.0;
  double u_scale = 0.0;     // max physical |(u1, u2)|
  int worst_k1 = 0, worst_k2 = 0;

  bool ok(double tol = 1e-10) const {
    double s = u_scale > 0.0 ? u_scale : 1.0;
    return u_residual <= tol * s && w_residual <= tol * s;
  }
};

namespace hydro_detail {

// Spectral vertical-mean divergence, one value per mode.
inline cvec mean_divergence(const Field& u1, const Field& u2) {
  const StripGrid& g = u1.grid();
  cvec I(g.plane_size(), 0.0);
  for (int j = 0; j < g.ny(); ++j) {
    double w = (j == 0 || j == g.ny() - 1) ? 0.5 * g.dy() : g.dy();
    for (int a = 0; a < g.n1(); ++a)
      for (int b = 0; b < g.n2(); ++b) {
        std::complex<double> d =
            std::complex<double>(0.0, g.k1(a)) * u1.at(j, a, b) +
            std::complex<double>(0.0, g.k2(b)) * u2.at(j, a, b);
        I[static_cast<std::size_t>(a) * g.n2() + b] += w * d;
      }
  }
  return I;
}

inline double plane_phys_max(const StripGrid& g, const cvec& plane) {
  cvec phys(g.plane_size());
  g.plane_to_physical(plane.data(), phys.data());
  double m = 0.0;
  for (const auto& z : phys) m = std::max(m, std::abs(z));
  return m;
}

inline double rms(const cvec& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

}  // namespace hydro_detail

inline CompatReport check_compatibility(const Field& u1, const Field& u2,
                                        const Field& w1, const Field& w2) {
  const StripGrid& g = u1.grid();
  cvec Iu = hydro_detail::mean_divergence(u1, u2);
  cvec Iw = hydro_detail::mean_divergence(w1, w2);
  CompatReport r;
  r.u_residual = hydro_detail::plane_phys_max(g, Iu);
  r.w_residual = hydro_detail::plane_phys_max(g, Iw);
  double worst = -1.0;
  for (int a = 0; a < g.n1(); ++a)
    for (int b = 0; b < g.n2(); ++b) {
      double m = std::max(std::abs(Iu[static_cast<std::size_t>(a) * g.n2() + b]),
                          std::abs(Iw[static_cast<std::size_t>(a) * g.n2() + b]));
      if (m > worst) {
        worst = m;
        r.worst_k1 = g.idx1(a);
        r.worst_k2 = g.idx2(b);
      }
    }
  cvec mag(g.plane_size());
  cvec p1(g.plane_size()), p2(g.plane_size());
  for (int j = 0; j < g.ny(); ++j) {
    g.plane_to_physical(u1.data().data() + j * g.plane_size(), p1.data());
    g.plane_to_physical(u2.data().data() + j * g.plane_size(), p2.data());
    for (std::size_t i = 0; i < g.plane_size(); ++i)
      r.u_scale = std::max(r.u_scale,
                           std::sqrt(std::norm(p1[i]) + std::norm(p2[i])));
  }
  return r;
}

// N(u) = (u . dx) u + v dy u, products dealiased.
inline std::pair<Field, Field> nonlinear_term(const Field& u1, const Field& u2) {
  Field v = recover_v(u1, u2);
  Field d1u1 = dx(u1, 1), d2u1 = dx(u1, 2), d1u2 = dx(u2, 1), d2u2 = dx(u2, 2);
  Field n1 = dealias_product(u1, d1u1);
  n1 += dealias_product(u2, d2u1);
  n1 += dealias_product(v, dy(u1));
  Field n2 = dealias_product(u1, d1u2);
  n2 += dealias_product(u2, d2u2);
  n2 += dealias_product(v, dy(u2));
  return {std::move(n1), std::move(n2)};
}

// y-independent pressure, zero-mean gauge (the k = 0 mode is fixed to 0).
struct PressureField {
  const StripGrid* g;
  cvec coeffs;  // one value per horizontal mode

  explicit PressureField(const StripGrid& grid)
      : g(&grid), coeffs(grid.plane_size(), 0.0) {}
  std::complex<double> at(int a, int b) const {
    return coeffs[static_cast<std::size_t>(a) * g->n2() + b];
  }
};

// Per mode k != 0: phat = -fhat / |k|^2 with
// f = -div_x int_0^1 [(u.dx)u + (div_x u) u] dy + div_x (dy u|_{y=1} - dy u|_{y=0});
// wall fluxes from the one-sided dy stencils, nonlinear integrand dealiased.
inline PressureField solve_pressure(const Field& u1, const Field& u2) {
  const StripGrid& g = u1.grid();
  Field div = dx(u1, 1);
  div += dx(u2, 2);
  Field a1 = dealias_product(u1, dx(u1, 1));
  a1 += dealias_product(u2, dx(u1, 2));
  a1 += dealias_product(div, u1);
  Field a2 = dealias_product(u1, dx(u2, 1));
  a2 += dealias_product(u2, dx(u2, 2));
  a2 += dealias_product(div, u2);
  Field I1 = integral_y_total(a1), I2 = integral_y_total(a2);
  Field du1 = dy(u1), du2 = dy(u2);
  PressureField p(g);
  const int top = g.ny() - 1;
  for (int a = 0; a < g.n1(); ++a)
    for (int b = 0; b < g.n2(); ++b) {
      double k1 = g.k1(a), k2 = g.k2(b);
      double ksq = k1 * k1 + k2 * k2;
      if (ksq == 0.0) continue;
      std::complex<double> ik1(0.0, k1), ik2(0.0, k2);
      std::complex<double> f =
          -(ik1 * I1.at(0, a, b) + ik2 * I2.at(0, a, b)) +
          ik1 * (du1.at(top, a, b) - du1.at(0, a, b)) +
          ik2 * (du2.at(top, a, b) - du2.at(0, a, b));
      p.coeffs[static_cast<std::size_t>(a) * g.n2() + b] = -f / ksq;
    }
  return p;
}

namespace hydro_detail {

// Central second difference with frozen wall rows (the implicit solve pins
// them; explicit paths must see the same operator).
inline Field dyy_dirichlet(const Field& f) {
  const StripGrid& g = f.grid();
  Field out(g, f.hermitian(), true);
  const std::size_t ps = g.plane_size();
  const double h2 = g.dy() * g.dy();
  const auto* c = f.data().data();
  auto* o = out.data().data();
  for (int j = 1; j < g.ny() - 1; ++j)
    for (std::size_t i = 0; i < ps; ++i)
      o[j * ps + i] =
          (c[(j + 1) * ps + i] - 2.0 * c[j * ps + i] + c[(j - 1) * ps + i]) / h2;
  return out;
}

// Mode-wise removal of the vertical-mean divergence: add
// c(k) * i k phi(y)/Q with phi = y(1-y), c = -I(k)/|k|^2, which cancels
// I(k) exactly and keeps the walls at zero.
inline void project_mean_divergence(Field& u1, Field& u2) {
  const StripGrid& g = u1.grid();
  cvec I = mean_divergence(u1, u2);
  std::vector<double> phiq(g.ny());
  double Q = 0.0;
  for (int j = 0; j < g.ny(); ++j) phiq[j] = g.y()[j] * (1.0 - g.y()[j]);
  for (int j = 0; j < g.ny(); ++j) {
    double w = (j == 0 || j == g.ny() - 1) ? 0.5 * g.dy() : g.dy();
    Q += w * phiq[j];
  }
  for (int j = 0; j < g.ny(); ++j) phiq[j] /= Q;
  for (int a = 0; a < g.n1(); ++a)
    for (int b = 0; b < g.n2(); ++b) {
      double k1 = g.k1(a), k2 = g.k2(b);
      double ksq = k1 * k1 + k2 * k2;
      if (ksq == 0.0) continue;
      std::complex<double> c =
          -I[static_cast<std::size_t>(a) * g.n2() + b] / ksq;
      std::complex<double> d1 = std::complex<double>(0.0, -k1) * c;
      std::complex<double> d2 = std::complex<double>(0.0, -k2) * c;
      for (int j = 0; j < g.ny(); ++j) {
        u1.at(j, a, b) += d1 * phiq[j];
        u2.at(j, a, b) += d2 * phiq[j];
      }
    }
}

}  // namespace hydro_detail

struct HydroState {
  double t;
  Field u1, u2, w1, w2;  // w = dt u
  RadiusSchedule schedule;
};

struct HydroOptions {
  bool nonlinearity = true;
  bool pressure = true;
  bool projection = true;
  double compat_tol = 1e-10;  // relative drift threshold per accepted step
};

// First-order IMEX integrator: Crank-Nicolson on (w -> -w + dyy u, u -> w)
// with per-mode tridiagonal solves and Dirichlet rows, Adams-Bashforth 2 on
// the explicit forcing -N(u) - dx p (first step: Euler predictor-corrector).
class HydroSolver {
 public:
  explicit HydroSolver(const StripGrid& g, HydroOptions opt = {})
      : g_(&g), opt_(opt) {}

  const HydroOptions& options() const { return opt_; }
  int projection_events() const { return proj_events_; }
  void reset_history() {
    gprev_.reset();
    expected_t_ = std::numeric_limits<double>::quiet_NaN();
  }

  // Explicit forcing G = -N(u) - dx p evaluated on the given tangential field.
  std::pair<Field, Field> forcing(const Field& u1, const Field& u2) const {
    Field G1(*g_, true, false), G2(*g_, true, false);
    if (opt_.nonlinearity) {
      auto [n1, n2] = nonlinear_term(u1, u2);
      G1 -= n1;
      G2 -= n2;
    }
    if (opt_.pressure) {
      PressureField p = solve_pressure(u1, u2);
      for (int a = 0; a < g_->n1(); ++a)
        for (int b = 0; b < g_->n2(); ++b) {
          std::complex<double> gp1 =
              std::complex<double>(0.0, -g_->k1(a)) * p.at(a, b);
          std::complex<double> gp2 =
              std::complex<double>(0.0, -g_->k2(b)) * p.at(a, b);
          for (int j = 0; j < g_->ny(); ++j) {
            G1.at(j, a, b) += gp1;
            G2.at(j, a, b) += gp2;
          }
        }
    }
    return {std::move(G1), std::move(G2)};
  }

  HydroState step(const HydroState& s, double dt) {
    if (!(dt > 0.0)) throw std::domain_error("step: dt must be positive");
    if (s.t != expected_t_) reset_history();
    auto Gn = forcing(s.u1, s.u2);
    Field Gx1(*g_), Gx2(*g_);
    if (!gprev_) {
      auto pred = cn_solve(s, dt, Gn.first, Gn.second);
      auto Gp = forcing(pred.u1, pred.u2);
      Gx1 = Gn.first;
      Gx1 += Gp.first;
      Gx1 *= 0.5;
      Gx2 = Gn.second;
      Gx2 += Gp.second;
      Gx2 *= 0.5;
    } else {
      Gx1 = 1.5 * Gn.first - 0.5 * gprev_->first;
      Gx2 = 1.5 * Gn.second - 0.5 * gprev_->second;
    }
    HydroState out = cn_solve(s, dt, Gx1, Gx2);
    gprev_ = std::move(Gn);
    if (!all_finite(out.u1) || !all_finite(out.u2) || !all_finite(out.w1) ||
        !all_finite(out.w2))
      throw BlowUpError("solution lost finiteness", s.t);
    enforce_compatibility(out);
    expected_t_ = out.t;
    return out;
  }

  // Classical explicit RK4 on the same semi-discretization (wall rows
  // frozen); cross-validation only. Stability demands dt < 16 dy^2 and,
  // on coarse vertical grids, dt < dy/2 (wave speed 2/dy).
  HydroState reference_step_rk4(const HydroState& s, double dt) const {
    double lim = std::min(16.0 * g_->dy() * g_->dy(), 0.5 * g_->dy());
    if (!(dt > 0.0) || dt >= lim)
      throw StabilityError("reference_step_rk4: dt outside the explicit stability bound");
    auto F = [&](const HydroState& q) {
      auto G = forcing(q.u1, q.u2);
      HydroState d{q.t, q.w1, q.w2, std::move(G.first), std::move(G.second),
                   q.schedule};
      Field l1 = hydro_detail::dyy_dirichlet(q.u1);
      Field l2 = hydro_detail::dyy_dirichlet(q.u2);
      d.w1 -= q.w1;
      d.w1 += l1;
      d.w2 -= q.w2;
      d.w2 += l2;
      zero_wall_rows(d.u1);
      zero_wall_rows(d.u2);
      zero_wall_rows(d.w1);
      zero_wall_rows(d.w2);
      return d;
    };
    HydroState k1 = F(s);
    HydroState k2 = F(shifted(s, 0.5 * dt, k1));
    HydroState k3 = F(shifted(s, 0.5 * dt, k2));
    HydroState k4 = F(shifted(s, dt, k3));
    HydroState out = s;
    out.t = s.t + dt;
    combine(out.u1, dt, k1.u1, k2.u1, k3.u1, k4.u1);
    combine(out.u2, dt, k1.u2, k2.u2, k3.u2, k4.u2);
    combine(out.w1, dt, k1.w1, k2.w1, k3.w1, k4.w1);
    combine(out.w2, dt, k1.w2, k2.w2, k3.w2, k4.w2);
    if (!all_finite(out.u1) || !all_finite(out.w1))
      throw BlowUpError("reference solution lost finiteness", s.t);
    return out;
  }

 private:
  static void zero_wall_rows(Field& f) { f.zero_walls(); }

  static HydroState shifted(const HydroState& s, double c, const HydroState& k) {
    HydroState r = s;
    r.t = s.t + c;
    r.u1 += c * k.u1;
    r.u2 += c * k.u2;
    r.w1 += c * k.w1;
    r.w2 += c * k.w2;
    return r;
  }
  static void combine(Field& f, double dt, const Field& k1, const Field& k2,
                      const Field& k3, const Field& k4) {
    auto& o = f.data();
    const auto &a = k1.data(), &b = k2.data(), &c = k3.data(), &d = k4.data();
    for (std::size_t i = 0; i < o.size(); ++i)
      o[i] += dt / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]);
  }

  HydroState cn_solve(const HydroState& s, double dt, const Field& Gx1,
                      const Field& Gx2) const {
    const StripGrid& g = *g_;
    const int ny = g.ny();
    const double dy2 = g.dy() * g.dy();
    const double lo = -dt * dt / 4.0 / dy2;
    const double di = (1.0 + dt / 2.0) + dt * dt / 2.0 / dy2;
    // Dirichlet rows are identity; factorization is mode-independent.
    std::vector<double> cp(ny), inv(ny);
    inv[0] = 1.0;
    cp[0] = 0.0;
    for (int j = 1; j < ny; ++j) {
      double a = (j == ny - 1) ? 0.0 : lo;
      double b = (j == ny - 1) ? 1.0 : di;
      double c = (j == ny - 1) ? 0.0 : lo;
      double m = b - a * cp[j - 1];
      inv[j] = 1.0 / m;
      cp[j] = c * inv[j];
    }
    HydroState out{s.t + dt, Field(g, true, true), Field(g, true, true),
                   Field(g, true, true), Field(g, true, true), s.schedule};
    const std::size_t ps = g.plane_size();
    cvec rhs(ny), dp(ny);
    auto solve_component = [&](const Field& u, const Field& w, const Field& Gx,
                               Field& un, Field& wn) {
      const auto* cu = u.data().data();
      const auto* cw = w.data().data();
      const auto* cg = Gx.data().data();
      for (std::size_t i = 0; i < ps; ++i) {
        rhs[0] = 0.0;
        rhs[ny - 1] = 0.0;
        for (int j = 1; j < ny - 1; ++j) {
          std::complex<double> d2u =
              (cu[(j + 1) * ps + i] - 2.0 * cu[j * ps + i] + cu[(j - 1) * ps + i]) / dy2;
          std::complex<double> d2w =
              (cw[(j + 1) * ps + i] - 2.0 * cw[j * ps + i] + cw[(j - 1) * ps + i]) / dy2;
          rhs[j] = (1.0 - dt / 2.0) * cw[j * ps + i] + dt * d2u +
                   dt * dt / 4.0 * d2w + dt * cg[j * ps + i];
        }
        dp[0] = rhs[0];
        for (int j = 1; j < ny; ++j) {
          double a = (j == ny - 1) ? 0.0 : lo;
          dp[j] = (rhs[j] - a * dp[j - 1]) * inv[j];
        }
        auto* ow = wn.data().data();
        auto* ou = un.data().data();
        ow[(ny - 1) * ps + i] = dp[ny - 1];
        for (int j = ny - 2; j >= 0; --j)
          ow[j * ps + i] = dp[j] - cp[j] * ow[(j + 1) * ps + i];
        for (int j = 0; j < ny; ++j)
          ou[j * ps + i] =
              cu[j * ps + i] + dt / 2.0 * (cw[j * ps + i] + ow[j * ps + i]);
      }
    };
    solve_component(s.u1, s.w1, Gx1, out.u1, out.w1);
    solve_component(s.u2, s.w2, Gx2, out.u2, out.w2);
    return out;
  }

  // With projection enabled every accepted step is re-projected, so the
  // returned state is compatible to rounding, not merely to compat_tol; the
  // event counter only records repairs of above-tolerance drift.
  void enforce_compatibility(HydroState& s) {
    using namespace hydro_detail;
    double scale =
        std::sqrt(l2norm2(s.u1) + l2norm2(s.u2)) + 1e-300;
    double ru = rms(mean_divergence(s.u1, s.u2));
    if (opt_.projection) {
      if (ru > opt_.compat_tol * scale) ++proj_events_;
      project_mean_divergence(s.u1, s.u2);
      ru = rms(mean_divergence(s.u1, s.u2));
    }
    double rw = rms(mean_divergence(s.w1, s.w2));
    if (opt_.projection) {
      if (rw > opt_.compat_tol * scale) ++proj_events_;
      project_mean_divergence(s.w1, s.w2);
      rw = rms(mean_divergence(s.w1, s.w2));
    }
    if (ru > opt_.compat_tol * scale || rw > opt_.compat_tol * scale) {
      CompatReport rep = check_compatibility(s.u1, s.u2, s.w1, s.w2);
      throw ConstraintDriftError("compatibility residual above tolerance",
                                 rep.worst_k1, rep.worst_k2, std::max(ru, rw));
    }
  }

  const StripGrid* g_;
  HydroOptions opt_;
  std::optional<std::pair<Field, Field>> gprev_;
  double expected_t_ = std::numeric_limits<double>::quiet_NaN();
  int proj_events_ = 0;
};

// Acceleration dt w implied by the momentum equation on the discrete
// operators, wall rows zeroed to match the pinned dynamics.
inline std::pair<Field, Field> acceleration(const StripGrid& g, const Field& u1,
                                            const Field& u2, const Field& w1,
                                            const Field& w2) {
  HydroSolver aux(g);
  auto G = aux.forcing(u1, u2);
  Field a1 = hydro_detail::dyy_dirichlet(u1);
  a1 -= w1;
  a1 += G.first;
  Field a2 = hydro_detail::dyy_dirichlet(u2);
  a2 -= w2;
  a2 += G.second;
  a1.zero_walls();
  a2.zero_walls();
  return {std::move(a1), std::move(a2)};
}

// -u1 - (u0.dx)u0 - v0 dy u0 + dyy u0 - dx p|_{t=0}.
inline std::pair<Field, Field> initial_acceleration(const Field& u0_1,
                                                    const Field& u0_2,
                                                    const Field& u1_1,
                                                    const Field& u1_2) {
  return acceleration(u0_1.grid(), u0_1, u0_2, u1_1, u1_2);
}

enum class DataFamily { stream, shear };

struct InitialData {
  Field u0_1, u0_2, u1_1, u1_2;
};

namespace hydro_detail {

// Deterministic uniform draw in [-1, 1); fixed mapping, no std distributions.
inline double unit_draw(std::mt19937_64& rng) {
  return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
}

}  // namespace hydro_detail

// Families: (a) stream-function type eps0 (dx2 psi, -dx1 psi) sin(pi y) with
// band-limited psi (tangentially divergence-free, hence compatible);
// (b) shear type eps0 (f(x2) sin(pi y), 0). Both normalized so that the
// X_{2 rho0} norm of (u0, 0) equals eps0 exactly.
inline InitialData make_initial_data(DataFamily family, double eps0,
                                     double rho0, const StripGrid& g,
                                     std::uint64_t seed = 1) {
  if (!(eps0 > 0.0)) throw std::domain_error("make_initial_data: eps0 must be positive");
  if (!(rho0 > 0.0)) throw std::domain_error("make_initial_data: rho0 must be positive");
  std::mt19937_64 rng(seed);
  std::vector<double> prof(g.ny());
  for (int j = 1; j < g.ny() - 1; ++j) prof[j] = std::sin(pi * g.y()[j]);
  InitialData d{Field(g, true, true), Field(g, true, true), Field(g, true, true),
                Field(g, true, true)};
  const int kmax = 2;
  if (family == DataFamily::stream) {
    cvec psi(g.plane_size(), 0.0);
    for (int a = 0; a < g.n1(); ++a)
      for (int b = 0; b < g.n2(); ++b) {
        int q = g.idx1(a) * g.idx1(a) + g.idx2(b) * g.idx2(b);
        if (q > 0 && q <= kmax * kmax) {
          double re = hydro_detail::unit_draw(rng);
          double im = hydro_detail::unit_draw(rng);
          psi[static_cast<std::size_t>(a) * g.n2() + b] = {re, im};
        }
      }
    cvec sym(g.plane_size());
    for (int a = 0; a < g.n1(); ++a)
      for (int b = 0; b < g.n2(); ++b) {
        int na = (g.n1() - a) % g.n1(), nb = (g.n2() - b) % g.n2();
        sym[static_cast<std::size_t>(a) * g.n2() + b] =
            0.5 * (psi[static_cast<std::size_t>(a) * g.n2() + b] +
                   std::conj(psi[static_cast<std::size_t>(na) * g.n2() + nb]));
      }
    for (int j = 1; j < g.ny() - 1; ++j)
      for (int a = 0; a < g.n1(); ++a)
        for (int b = 0; b < g.n2(); ++b) {
          std::complex<double> c = sym[static_cast<std::size_t>(a) * g.n2() + b];
          d.u0_1.at(j, a, b) = std::complex<double>(0.0, g.k2(b)) * c * prof[j];
          d.u0_2.at(j, a, b) = std::complex<double>(0.0, -g.k1(a)) * c * prof[j];
        }
  } else {
    cvec f(static_cast<std::size_t>(g.n2()), 0.0);
    for (int b = 0; b < g.n2(); ++b) {
      int q = std::abs(g.idx2(b));
      if (q >= 1 && q <= kmax)
        f[b] = {hydro_detail::unit_draw(rng), hydro_detail::unit_draw(rng)};
    }
    for (int b = 0; b < g.n2(); ++b) {
      int nb = (g.n2() - b) % g.n2();
      if (g.idx2(b) > 0) f[nb] = std::conj(f[b]);
    }
    for (int j = 1; j < g.ny() - 1; ++j)
      for (int a = 0; a < g.n1(); ++a)
        for (int b = 0; b < g.n2(); ++b)
          d.u0_1.at(j, a, b) = (g.idx1(a) == 0 ? f[b] : 0.0) * prof[j];
  }
  Field dy1 = dy(d.u0_1), dy2f = dy(d.u0_2);
  std::vector<NormBlocks> comps{{nullptr, &dy1, &d.u0_1},
                                {nullptr, &dy2f, &d.u0_2}};
  double n = std::sqrt(x_norm2_blocks(g, comps, 2.0 * rho0));
  if (!(n > 0.0))
    throw std::domain_error("make_initial_data: normalization failed on a zero field");
  d.u0_1 *= eps0 / n;
  d.u0_2 *= eps0 / n;
  return d;
}

// Advective CFL ceiling, checked at run start and sample times.
inline double dt_max(const StripGrid& g, const Field& u1, const Field& u2) {
  cvec p1(g.plane_size()), p2(g.plane_size());
  double umax = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    g.plane_to_physical(u1.data().data() + j * g.plane_size(), p1.data());
    g.plane_to_physical(u2.data().data() + j * g.plane_size(), p2.data());
    for (std::size_t i = 0; i < g.plane_size(); ++i)
      umax = std::max(umax, std::sqrt(std::norm(p1[i]) + std::norm(p2[i])));
  }
  double n = std::max(g.n1(), g.n2());
  double adv = 0.25 * g.period() / (n * std::max(umax, 1e-12));
  return std::min(0.5, adv);
}

}  // namespace stripflow
