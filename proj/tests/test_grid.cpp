#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "stripflow/field.hpp"

using namespace stripflow;

namespace {

double draw(std::mt19937_64& rng) {
  return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
}

Field random_dirichlet(const StripGrid& g, std::mt19937_64& rng) {
  Field f(g, true, true);
  for (int j = 1; j < g.ny() - 1; ++j)
    for (int a = 0; a < g.n1(); ++a)
      for (int b = 0; b < g.n2(); ++b)
        if (g.keep(a, b)) f.at(j, a, b) = {draw(rng), draw(rng)};
  return f;
}

double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace

TEST_CASE("grid construction and validation") {
  StripGrid g(8, 8, 17);
  CHECK(g.dy() == 1.0 / 16.0);
  CHECK(g.y().front() == 0.0);
  CHECK(g.y().back() == 1.0);
  CHECK(g.period() == two_pi);
  CHECK(g.idx1(0) == 0);
  CHECK(g.idx1(4) == -4);
  CHECK(g.idx1(7) == -1);
  CHECK(g.k1(1) == 1.0);
  CHECK_FALSE(g.keep(4, 0));   // Nyquist excluded
  CHECK_FALSE(g.keep(3, 0));   // outside the 2/3 ball
  CHECK(g.keep(2, 2));

  CHECK_THROWS_AS(StripGrid(7, 8, 17), ConfigError);
  CHECK_THROWS_AS(StripGrid(8, 0, 17), ConfigError);
  CHECK_THROWS_AS(StripGrid(8, 8, 7), ConfigError);
  CHECK_THROWS_AS(StripGrid(8, 8, 17, -1.0), ConfigError);
}

TEST_CASE("horizontal derivative is the mode multiplier") {
  StripGrid g(8, 8, 17);
  Field f(g);
  int a = g.pos1(3), b = g.pos2(-2);
  for (int j = 0; j < g.ny(); ++j) f.at(j, a, b) = {1.5, -0.25};
  Field d1 = dx(f, 1);
  for (int j = 0; j < g.ny(); ++j) {
    auto expect = std::complex<double>(0.0, 3.0) * f.at(j, a, b);
    CHECK(std::abs(d1.at(j, a, b) - expect) < 1e-15);
  }
  Field d2 = dx(f, 2);
  for (int j = 0; j < g.ny(); ++j) {
    auto expect = std::complex<double>(0.0, -2.0) * f.at(j, a, b);
    CHECK(std::abs(d2.at(j, a, b) - expect) < 1e-15);
  }

  Field c(g);
  for (int j = 0; j < g.ny(); ++j) c.at(j, 0, 0) = 2.0;  // constant field
  CHECK(max_abs_diff(dx(c, 1), Field(g)) == 0.0);

  std::mt19937_64 rng(5);
  Field r = random_dirichlet(g, rng);
  CHECK(max_abs_diff(dx(dx(r, 1), 2), dx(dx(r, 2), 1)) < 1e-15);

  CHECK_THROWS_AS(dx(f, 3), std::domain_error);
}

TEST_CASE("vertical derivatives, exactness and convergence") {
  StripGrid g(4, 4, 17);

  SECTION("dyy exact on quadratics") {
    Field f(g);
    for (int j = 0; j < g.ny(); ++j)
      f.at(j, 0, 0) = g.y()[j] * (1.0 - g.y()[j]);
    Field d = dyy(f);
    for (int j = 0; j < g.ny(); ++j)
      CHECK(std::abs(d.at(j, 0, 0) - std::complex<double>(-2.0, 0.0)) < 1e-12);
  }

  SECTION("dy of sin at the midpoint") {
    Field f(g);
    for (int j = 0; j < g.ny(); ++j) f.at(j, 0, 0) = std::sin(pi * g.y()[j]);
    Field d = dy(f);
    CHECK(std::abs(d.at(8, 0, 0)) < g.dy() * g.dy());
  }

  SECTION("dyy second-order refinement on sin") {
    // Interior rows carry the central-stencil error pi^4 h^2 / 12; the
    // one-sided wall rows carry an h^3 term (the h^2 term vanishes with
    // f'''' at the wall), so the two regions are checked separately.
    auto worst = [](int ny) {
      StripGrid gg(4, 4, ny);
      Field f(gg);
      for (int j = 0; j < gg.ny(); ++j)
        f.at(j, 0, 0) = std::sin(pi * gg.y()[j]);
      Field d = dyy(f);
      double interior = 0.0;
      for (int j = 1; j + 1 < gg.ny(); ++j)
        interior = std::max(interior, std::abs(d.at(j, 0, 0) +
                                               pi * pi *
                                                   std::sin(pi * gg.y()[j])));
      double wall = std::max(std::abs(d.at(0, 0, 0)),
                             std::abs(d.at(gg.ny() - 1, 0, 0)));
      return std::pair<double, double>{interior, wall};
    };
    auto [i17, w17] = worst(17);
    auto [i33, w33] = worst(33);
    double h = 1.0 / 16.0;
    CHECK(i17 < pi * pi * pi * pi / 12.0 * h * h * 1.3);
    double ratio = i17 / i33;
    CHECK(ratio > 3.6);
    CHECK(ratio < 4.4);
    CHECK(w17 < std::pow(pi, 5) * h * h * h * 1.3);
    double wall_ratio = w17 / w33;
    CHECK(wall_ratio > 6.0);
    CHECK(wall_ratio < 10.0);
  }
}

TEST_CASE("vertical integration") {
  StripGrid g(4, 4, 17);

  SECTION("cumulative integral of 1 is y") {
    Field f(g);
    for (int j = 0; j < g.ny(); ++j) f.at(j, 0, 0) = 1.0;
    Field c = integral_y_cumulative(f);
    for (int j = 0; j < g.ny(); ++j)
      CHECK(std::abs(c.at(j, 0, 0) - std::complex<double>(g.y()[j], 0.0)) <
            1e-14);
  }

  SECTION("total integral of sin within quadrature error") {
    Field f(g);
    for (int j = 0; j < g.ny(); ++j) f.at(j, 0, 0) = std::sin(pi * g.y()[j]);
    Field tot = integral_y_total(f);
    for (int j = 0; j < g.ny(); ++j)
      CHECK(std::abs(tot.at(j, 0, 0) - std::complex<double>(2.0 / pi, 0.0)) <
            g.dy() * g.dy());
  }

  SECTION("odd linear integrand integrates to exactly zero") {
    Field f(g);
    for (int j = 0; j < g.ny(); ++j) f.at(j, 0, 0) = 2.0 * g.y()[j] - 1.0;
    Field tot = integral_y_total(f);
    CHECK(tot.at(0, 0, 0) == std::complex<double>(0.0, 0.0));
  }
}

TEST_CASE("dealiased products") {
  StripGrid g(12, 12, 17);
  auto single = [&](int s1, int s2, std::complex<double> amp) {
    Field f(g);
    for (int j = 0; j < g.ny(); ++j) f.at(j, g.pos1(s1), g.pos2(s2)) = amp;
    return f;
  };

  SECTION("convolution of two modes inside the ball") {
    Field a = single(1, 2, {2.0, 0.0});
    Field b = single(2, -1, {0.5, 0.0});
    Field p = dealias_product(a, b);
    for (int j = 0; j < g.ny(); ++j)
      CHECK(std::abs(p.at(j, g.pos1(3), g.pos2(1)) -
                     std::complex<double>(1.0, 0.0)) < 1e-13);
    double off = 0.0;
    for (int j = 0; j < g.ny(); ++j)
      for (int aa = 0; aa < g.n1(); ++aa)
        for (int bb = 0; bb < g.n2(); ++bb)
          if (!(aa == g.pos1(3) && bb == g.pos2(1)))
            off = std::max(off, std::abs(p.at(j, aa, bb)));
    CHECK(off < 1e-13);
  }

  SECTION("product landing outside the ball is truncated") {
    Field a = single(3, 0, {1.0, 0.0});
    Field b = single(2, 0, {1.0, 0.0});
    Field p = dealias_product(a, b);
    double m = 0.0;
    for (const auto& z : p.data()) m = std::max(m, std::abs(z));
    CHECK(m < 1e-14);
  }

  SECTION("commutativity") {
    std::mt19937_64 rng(11);
    Field a = random_dirichlet(g, rng);
    Field b = random_dirichlet(g, rng);
    CHECK(max_abs_diff(dealias_product(a, b), dealias_product(b, a)) < 1e-15);
  }

  SECTION("grid mismatch rejected") {
    StripGrid g2(12, 12, 33);
    Field a(g);
    Field b(g2);
    CHECK_THROWS_AS(dealias_product(a, b), StructuralError);
  }
}

TEST_CASE("transform round trip and Parseval") {
  StripGrid g(16, 8, 17);
  std::mt19937_64 rng(3);
  Field f = random_dirichlet(g, rng);

  cvec phys, back;
  g.to_physical(f.data(), phys);
  back.resize(phys.size());
  g.to_spectral(phys, back);
  double m = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < back.size(); ++i) {
    m = std::max(m, std::abs(back[i] - f.data()[i]));
    scale = std::max(scale, std::abs(f.data()[i]));
  }
  CHECK(m < 1e-13 * scale);

  // Spectral-sum norm against physical-space quadrature.
  double spectral = l2norm2(f);
  double physical = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    double w = (j == 0 || j == g.ny() - 1) ? 0.5 * g.dy() : g.dy();
    double cell = g.period() * g.period() /
                  (static_cast<double>(g.n1()) * g.n2());
    for (std::size_t i = 0; i < g.plane_size(); ++i)
      physical += w * cell * std::norm(phys[j * g.plane_size() + i]);
  }
  CHECK(std::abs(spectral - physical) < 1e-12 * spectral);
}

TEST_CASE("discrete Poincare inequality") {
  StripGrid g(8, 8, 33);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    Field f = random_dirichlet(g, rng);
    double num = l2norm2(f);
    double den = l2norm2(dy(f));
    REQUIRE(den > 0.0);
    CHECK(num <= 4.0 * den);
  }
  Field s(g, true, true);
  for (int j = 1; j < g.ny() - 1; ++j) s.at(j, 0, 0) = std::sin(pi * g.y()[j]);
  double ratio = l2norm2(s) / l2norm2(dy(s));
  CHECK(std::abs(ratio - 1.0 / (pi * pi)) <
        4.0 * g.dy() * g.dy() / (pi * pi));
}

TEST_CASE("summation by parts up to second-order boundary defect") {
  auto defect = [](int ny) {
    StripGrid g(4, 4, ny);
    Field f(g, true, true);
    for (int j = 1; j < g.ny() - 1; ++j)
      f.at(j, 0, 0) = std::sin(pi * g.y()[j]) +
                      0.3 * std::sin(2.0 * pi * g.y()[j]);
    double s = inner(dyy(f), f) + l2norm2(dy(f));
    return std::abs(s) / l2norm2(dy(f));
  };
  double d17 = defect(17), d33 = defect(33);
  CHECK(d17 <= 10.0 * (1.0 / 16.0) * (1.0 / 16.0));
  CHECK(d33 <= 10.0 * (1.0 / 32.0) * (1.0 / 32.0));
}

TEST_CASE("field flags and wall handling") {
  StripGrid g(8, 8, 17);
  Field f(g, true, false);
  for (int j = 0; j < g.ny(); ++j) f.at(j, 1, 2) = {1.0, 1.0};
  CHECK(f.wall_max() > 0.0);
  f.zero_walls();
  CHECK(f.wall_max() == 0.0);
  CHECK(f.dirichlet());

  Field a(g, true, true), b(g, false, false);
  Field c = a + b;
  CHECK_FALSE(c.hermitian());
  CHECK_FALSE(c.dirichlet());

  Field d = dy(a);
  CHECK(d.hermitian());
  CHECK_FALSE(d.dirichlet());

  StripGrid g2(8, 8, 33);
  Field other(g2);
  CHECK_THROWS_AS(a += other, StructuralError);
}

TEST_CASE("hermitian symmetry is preserved by products") {
  StripGrid g(8, 8, 17);
  std::mt19937_64 rng(23);
  // Hermitian-symmetrize a random field so it is real in physical space.
  Field f(g, true, true);
  for (int j = 1; j < g.ny() - 1; ++j)
    for (int a = 0; a < g.n1(); ++a)
      for (int b = 0; b < g.n2(); ++b)
        if (g.keep(a, b)) f.at(j, a, b) = {draw(rng), draw(rng)};
  Field h(g, true, true);
  for (int j = 0; j < g.ny(); ++j)
    for (int a = 0; a < g.n1(); ++a)
      for (int b = 0; b < g.n2(); ++b) {
        int na = (g.n1() - a) % g.n1(), nb = (g.n2() - b) % g.n2();
        h.at(j, a, b) =
            0.5 * (f.at(j, a, b) + std::conj(f.at(j, na, nb)));
      }
  CHECK(h.hermitian_defect() < 1e-15);
  Field p = dealias_product(h, h);
  CHECK(p.hermitian());
  CHECK(p.hermitian_defect() < 1e-14);
}
