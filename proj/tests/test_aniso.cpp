#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "stripflow/aniso.hpp"

using namespace stripflow;

namespace {

void add_sin_mode(Field& f, int s1, int s2, double amp,
                  const std::vector<double>& profile) {
  const StripGrid& g = f.grid();
  std::complex<double> c(0.0, -0.5 * amp);
  for (int j = 0; j < g.ny(); ++j) {
    f.at(j, g.pos1(s1), g.pos2(s2)) = c * profile[j];
    f.at(j, g.pos1(-s1), g.pos2(-s2)) = std::conj(c) * profile[j];
  }
}

std::vector<double> sin_profile(const StripGrid& g, double freq = 1.0) {
  std::vector<double> p(g.ny());
  for (int j = 0; j < g.ny(); ++j) p[j] = std::sin(freq * pi * g.y()[j]);
  return p;
}

double field_max(const Field& f) {
  double m = 0.0;
  for (const auto& z : f.data()) m = std::max(m, std::abs(z));
  return m;
}

AnisoState analytic_state(const StripGrid& g, double eps) {
  Field u1(g, true, true), u2(g, true, true), ut1(g, true, true),
      ut2(g, true, true);
  add_sin_mode(u1, 1, 0, 1.0, sin_profile(g));
  add_sin_mode(u2, 0, 2, 0.4, sin_profile(g));
  add_sin_mode(ut1, 1, 1, 0.3, sin_profile(g, 2.0));
  return make_aniso_state(0.0, eps, u1, u2, ut1, ut2,
                          RadiusSchedule(0.5, 1.0 / 96.0));
}

}  // namespace

TEST_CASE("state construction slaves the vertical velocity") {
  StripGrid g(12, 12, 33);
  AnisoState s = analytic_state(g, 0.3);
  CHECK(s.eps == 0.3);
  CHECK(field_max(s.v) > 0.01);  // genuinely nonzero vertical velocity

  double scale = std::sqrt(l2norm2(s.u1) + l2norm2(s.u2));
  CHECK(staggered_divergence_residual(s.u1, s.u2, s.v) < 1e-14 * scale);
  CHECK(staggered_divergence_residual(s.ut1, s.ut2, s.vt) < 1e-14 * scale);

  Field z(g, true, true);
  CHECK_THROWS_AS(
      make_aniso_state(0.0, 0.0, z, z, z, z, RadiusSchedule(0.5, 0.0)),
      std::domain_error);
  CHECK_THROWS_AS(
      make_aniso_state(0.0, -0.1, z, z, z, z, RadiusSchedule(0.5, 0.0)),
      std::domain_error);
}

TEST_CASE("pressure boundary-value solve") {
  SECTION("manufactured solution converges at second order") {
    auto mms_err = [](int ny) {
      StripGrid g(8, 8, ny);
      const double eps = 0.3, ie2 = 1.0 / (eps * eps);
      Field f(g, true, false);
      std::vector<double> cosy(g.ny());
      for (int j = 0; j < g.ny(); ++j) cosy[j] = std::cos(pi * g.y()[j]);
      // p = cos(x1) cos(pi y): f = (-1 - pi^2/eps^2) p, zero Neumann data.
      for (int j = 0; j < g.ny(); ++j) {
        std::complex<double> c(0.5 * (-1.0 - ie2 * pi * pi) * cosy[j], 0.0);
        f.at(j, g.pos1(1), 0) = c;
        f.at(j, g.pos1(-1), 0) = c;
      }
      cvec g0(g.plane_size(), 0.0), g1(g.plane_size(), 0.0);
      Field p = solve_pressure_bvp(g, eps, f, g0, g1);
      double worst = 0.0;
      for (int j = 0; j < g.ny(); ++j)
        worst = std::max(worst, std::abs(p.at(j, g.pos1(1), 0) -
                                         std::complex<double>(0.5 * cosy[j], 0.0)));
      return worst;
    };
    double e17 = mms_err(17), e33 = mms_err(33);
    CHECK(e17 < 0.01);
    double ratio = e17 / e33;
    CHECK(ratio > 3.4);
    CHECK(ratio < 4.6);
  }

  SECTION("horizontal-mean mode is pinned and gauged") {
    StripGrid g(8, 8, 33);
    const double eps = 0.3;
    Field f(g, true, false);
    for (int j = 0; j < g.ny(); ++j) f.at(j, 0, 0) = std::cos(pi * g.y()[j]);
    cvec g0(g.plane_size(), 0.0), g1(g.plane_size(), 0.0);
    Field p = solve_pressure_bvp(g, eps, f, g0, g1);
    // eps^-2 p'' = cos(pi y), zero-slope walls: p = -eps^2 cos(pi y)/pi^2.
    double worst = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
      double exact = -eps * eps * std::cos(pi * g.y()[j]) / (pi * pi);
      worst = std::max(worst, std::abs(p.at(j, 0, 0) -
                                       std::complex<double>(exact, 0.0)));
    }
    CHECK(worst < 5.0 * g.dy() * g.dy() * eps * eps);
    // Zero trapezoid mean by the gauge.
    std::complex<double> mean = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
      double w = (j == 0 || j == g.ny() - 1) ? 0.5 * g.dy() : g.dy();
      mean += w * p.at(j, 0, 0);
    }
    CHECK(std::abs(mean) < 1e-13);
  }

  SECTION("consistent linear Neumann data solved exactly") {
    StripGrid g(8, 8, 17);
    Field f(g, true, false);
    cvec g0(g.plane_size(), 0.0), g1(g.plane_size(), 0.0);
    g0[0] = 1.0;
    g1[0] = 1.0;
    Field p = solve_pressure_bvp(g, 0.5, f, g0, g1);
    for (int j = 0; j < g.ny(); ++j)
      CHECK(std::abs(p.at(j, 0, 0) -
                     std::complex<double>(g.y()[j] - 0.5, 0.0)) < 1e-12);
  }

  SECTION("inconsistent data is rejected") {
    StripGrid g(8, 8, 17);
    Field f(g, true, false);
    cvec g0(g.plane_size(), 0.0), g1(g.plane_size(), 0.0);
    g0[0] = 1.0;
    g1[0] = -1.0;  // sources net vertical flux with no interior sink
    CHECK_THROWS_AS(solve_pressure_bvp(g, 0.5, f, g0, g1),
                    PressureCompatibilityError);
    CHECK_THROWS_AS(solve_pressure_bvp(g, 0.0, f, g0, g1),
                    std::domain_error);
  }
}

TEST_CASE("weighted norm") {
  StripGrid g(12, 12, 33);
  AnisoState s = analytic_state(g, 0.5);

  SECTION("zero state") {
    Field z(g, true, true);
    AnisoState zs = make_aniso_state(0.0, 0.5, z, z, z, z,
                                     RadiusSchedule(0.5, 0.0));
    CHECK(weighted_norm(zs, 0.5) == 0.0);
  }

  SECTION("reduces to the tangential norm when v vanishes") {
    // x2-independent shear along x1 only: pointwise divergence-free.
    Field u1(g, true, true), z(g, true, true);
    for (int j = 0; j < g.ny(); ++j)
      u1.at(j, 0, g.pos2(1)) = 0.3 * std::sin(pi * g.y()[j]);
    AnisoState vs = make_aniso_state(0.0, 0.5, u1, z, z, z,
                                     RadiusSchedule(0.5, 0.0));
    CHECK(field_max(vs.v) == 0.0);
    double wn = weighted_norm(vs, 0.5);
    double xn = x_norm(vs.u1, vs.u2, vs.ut1, vs.ut2, 0.5);
    CHECK(std::abs(wn - xn) < 1e-13 * xn);
  }

  SECTION("vertical contribution scales as eps squared") {
    double xn2 = std::pow(x_norm(s.u1, s.u2, s.ut1, s.ut2, 0.5), 2);
    double full = std::pow(weighted_norm(s, 0.5), 2);
    AnisoState half = s;
    half.eps = 0.25;  // same fields, half the eps weight
    double fh = std::pow(weighted_norm(half, 0.5), 2);
    double vterm = full - xn2, vterm_half = fh - xn2;
    REQUIRE(vterm > 0.0);
    CHECK(std::abs(4.0 * vterm_half - vterm) < 1e-12 * full);
  }
}

TEST_CASE("vertical momentum residual refines at second order") {
  auto residual = [](int ny) {
    StripGrid g(12, 12, ny);
    return v_momentum_residual(analytic_state(g, 0.3));
  };
  double r17 = residual(17), r33 = residual(33);
  CHECK(r17 < 0.2);
  double ratio = r17 / r33;
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.5);
}

TEST_CASE("anisotropic stepping") {
  StripGrid g(16, 16, 33);

  SECTION("zero state is a fixed point") {
    Field z(g, true, true);
    AnisoState s = make_aniso_state(0.0, 0.1, z, z, z, z,
                                    RadiusSchedule(0.5, 1.0 / 96.0));
    AnisoSolver solver(g);
    AnisoState out = solver.step(s, 0.02);
    CHECK(field_max(out.u1) == 0.0);
    CHECK(field_max(out.vt) == 0.0);
    CHECK(out.t == 0.02);
    CHECK(out.eps == 0.1);
  }

  SECTION("divergence identity and decay bound along a run") {
    InitialData d = make_initial_data(DataFamily::stream, 1e-3, 0.5, g, 1);
    AnisoState s = make_aniso_state(0.0, 0.1, d.u0_1, d.u0_2, d.u1_1, d.u1_2,
                                    RadiusSchedule(0.5, 1.0 / 96.0));
    AnisoSolver solver(g);
    const double delta0 = 1e-3, dt = 0.02;
    double max_div = 0.0;
    bool bound_holds = true;
    for (int i = 1; i <= 400; ++i) {
      s = solver.step(s, dt);
      if (i % 50 == 0) {
        double scale = std::sqrt(l2norm2(s.u1) + l2norm2(s.u2)) + 1e-300;
        max_div = std::max(
            max_div,
            staggered_divergence_residual(s.u1, s.u2, s.v) / scale);
        max_div = std::max(
            max_div,
            staggered_divergence_residual(s.ut1, s.ut2, s.vt) / scale);
        double rho = s.schedule.radius(s.t);
        double wn = weighted_norm(s, rho);
        if (wn > 4.0 * delta0 * std::exp(-s.t / 32.0) * 1.05)
          bound_holds = false;
      }
    }
    CHECK(max_div < 1e-9);
    CHECK(bound_holds);
    CHECK(s.t == Catch::Approx(8.0).margin(1e-9));
  }

  SECTION("small eps tracks the hydrostatic solver") {
    StripGrid gs(8, 8, 17);
    InitialData d = make_initial_data(DataFamily::stream, 0.5, 0.5, gs, 1);
    const double T = 1.0, dt = 0.01;
    HydroSolver hydro(gs);
    HydroState h{0.0, d.u0_1, d.u0_2, d.u1_1, d.u1_2,
                 RadiusSchedule(0.5, 1.0 / 96.0)};
    for (int i = 0; i < static_cast<int>(std::lround(T / dt)); ++i)
      h = hydro.step(h, dt);

    auto gap = [&](double eps) {
      AnisoState a = make_aniso_state(0.0, eps, d.u0_1, d.u0_2, d.u1_1,
                                      d.u1_2, RadiusSchedule(0.5, 1.0 / 96.0));
      AnisoSolver solver(gs);
      for (int i = 0; i < static_cast<int>(std::lround(T / dt)); ++i)
        a = solver.step(a, dt);
      double num = l2norm2(a.u1 - h.u1) + l2norm2(a.u2 - h.u2);
      double den = l2norm2(h.u1) + l2norm2(h.u2);
      return std::sqrt(num / den);
    };
    double e_big = gap(0.2), e_small = gap(0.1);
    CHECK(e_small < 0.05);
    double ratio = e_big / e_small;
    CHECK(ratio > 2.5);  // consistent with the measured quadratic closure
    CHECK(ratio < 8.0);
  }
}
