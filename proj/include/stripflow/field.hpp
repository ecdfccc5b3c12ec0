#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include "stripflow/grid.hpp"

namespace stripflow {

// Complex spectral coefficients indexed (k1, k2, y-node), stored y-plane
// major. The Hermitian flag records that the field is real-valued in
// physical space; the Dirichlet flag that it vanishes at y in {0, 1}.
class Field {
 public:
  explicit Field(const StripGrid& g, bool hermitian = true,
                 bool dirichlet = false)
      : g_(&g), c_(g.size()), hermitian_(hermitian), dirichlet_(dirichlet) {}

  const StripGrid& grid() const { return *g_; }
  cvec& data() { return c_; }
  const cvec& data() const { return c_; }

  std::complex<double>& at(int iy, int a, int b) { return c_[g_->at(iy, a, b)]; }
  const std::complex<double>& at(int iy, int a, int b) const {
    return c_[g_->at(iy, a, b)];
  }

  bool hermitian() const { return hermitian_; }
  bool dirichlet() const { return dirichlet_; }
  void set_hermitian(bool v) { hermitian_ = v; }
  void set_dirichlet(bool v) { dirichlet_ = v; }

  void zero_walls() {
    std::fill_n(c_.begin(), g_->plane_size(), std::complex<double>(0.0));
    std::fill_n(c_.begin() + (g_->ny() - 1) * g_->plane_size(), g_->plane_size(),
                std::complex<double>(0.0));
    dirichlet_ = true;
  }

  double wall_max() const {
    double m = 0.0;
    for (std::size_t i = 0; i < g_->plane_size(); ++i) {
      m = std::max(m, std::abs(c_[i]));
      m = std::max(m, std::abs(c_[(g_->ny() - 1) * g_->plane_size() + i]));
    }
    return m;
  }

  double hermitian_defect() const {
    const StripGrid& g = *g_;
    double m = 0.0;
    for (int j = 0; j < g.ny(); ++j)
      for (int a = 0; a < g.n1(); ++a)
        for (int b = 0; b < g.n2(); ++b) {
          int na = (g.n1() - a) % g.n1(), nb = (g.n2() - b) % g.n2();
          m = std::max(m, std::abs(at(j, a, b) - std::conj(at(j, na, nb))));
        }
    return m;
  }

  Field& operator+=(const Field& o) {
    require_same_grid(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    hermitian_ = hermitian_ && o.hermitian_;
    dirichlet_ = dirichlet_ && o.dirichlet_;
    return *this;
  }
  Field& operator-=(const Field& o) {
    require_same_grid(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    hermitian_ = hermitian_ && o.hermitian_;
    dirichlet_ = dirichlet_ && o.dirichlet_;
    return *this;
  }
  Field& operator*=(double s) {
    for (auto& z : c_) z *= s;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field f) { return f *= s; }

  void require_same_grid(const Field& o) const {
    if (g_ != o.g_) throw StructuralError("Field: grid mismatch");
  }

 private:
  const StripGrid* g_;
  cvec c_;
  bool hermitian_, dirichlet_;
};

// i k_d multiplier; exact for band-limited fields. Keeps walls (Dirichlet)
// and realness (Hermitian symmetry) intact.
inline Field dx(const Field& f, int direction) {
  if (direction != 1 && direction != 2)
    throw std::domain_error("dx: direction must be 1 or 2");
  const StripGrid& g = f.grid();
  Field out(g, f.hermitian(), f.dirichlet());
  const std::complex<double> i1(0.0, 1.0);
  for (int j = 0; j < g.ny(); ++j)
    for (int a = 0; a < g.n1(); ++a)
      for (int b = 0; b < g.n2(); ++b) {
        double k = direction == 1 ? g.k1(a) : g.k2(b);
        out.at(j, a, b) = i1 * k * f.at(j, a, b);
      }
  return out;
}

// Second-order central differences inside, second-order one-sided stencils
// at the walls; dyy is exact on quadratics. Differentiation in y commutes
// with the x-transform, so the stencils act directly on coefficients.
inline Field dy(const Field& f) {
  const StripGrid& g = f.grid();
  Field out(g, f.hermitian(), false);
  const std::size_t ps = g.plane_size();
  const double h = g.dy();
  const auto* c = f.data().data();
  auto* o = out.data().data();
  for (std::size_t i = 0; i < ps; ++i) {
    o[i] = (-3.0 * c[i] + 4.0 * c[ps + i] - c[2 * ps + i]) / (2.0 * h);
    std::size_t t = (g.ny() - 1) * ps + i;
    o[t] = (3.0 * c[t] - 4.0 * c[t - ps] + c[t - 2 * ps]) / (2.0 * h);
  }
  for (int j = 1; j < g.ny() - 1; ++j)
    for (std::size_t i = 0; i < ps; ++i)
      o[j * ps + i] = (c[(j + 1) * ps + i] - c[(j - 1) * ps + i]) / (2.0 * h);
  return out;
}

inline Field dyy(const Field& f) {
  const StripGrid& g = f.grid();
  Field out(g, f.hermitian(), false);
  const std::size_t ps = g.plane_size();
  const double h2 = g.dy() * g.dy();
  const auto* c = f.data().data();
  auto* o = out.data().data();
  for (std::size_t i = 0; i < ps; ++i) {
    o[i] = (2.0 * c[i] - 5.0 * c[ps + i] + 4.0 * c[2 * ps + i] - c[3 * ps + i]) / h2;
    std::size_t t = (g.ny() - 1) * ps + i;
    o[t] = (2.0 * c[t] - 5.0 * c[t - ps] + 4.0 * c[t - 2 * ps] - c[t - 3 * ps]) / h2;
  }
  for (int j = 1; j < g.ny() - 1; ++j)
    for (std::size_t i = 0; i < ps; ++i)
      o[j * ps + i] =
          (c[(j + 1) * ps + i] - 2.0 * c[j * ps + i] + c[(j - 1) * ps + i]) / h2;
  return out;
}

// Composite trapezoid from 0 to each node; exact on linear functions of y.
inline Field integral_y_cumulative(const Field& f) {
  const StripGrid& g = f.grid();
  Field out(g, f.hermitian(), false);
  const std::size_t ps = g.plane_size();
  const auto* c = f.data().data();
  auto* o = out.data().data();
  for (int j = 1; j < g.ny(); ++j)
    for (std::size_t i = 0; i < ps; ++i)
      o[j * ps + i] = o[(j - 1) * ps + i] +
                      0.5 * g.dy() * (c[j * ps + i] + c[(j - 1) * ps + i]);
  return out;
}

// Total trapezoid integral over [0, 1], one value per mode (stored
// y-independently: every y-plane holds the same value).
inline Field integral_y_total(const Field& f) {
  const StripGrid& g = f.grid();
  Field out(g, f.hermitian(), false);
  const std::size_t ps = g.plane_size();
  const auto* c = f.data().data();
  auto* o = out.data().data();
  for (int j = 0; j < g.ny(); ++j) {
    double w = (j == 0 || j == g.ny() - 1) ? 0.5 * g.dy() : g.dy();
    for (std::size_t i = 0; i < ps; ++i) o[i] += w * c[j * ps + i];
  }
  for (int j = 1; j < g.ny(); ++j)
    for (std::size_t i = 0; i < ps; ++i) o[j * ps + i] = o[i];
  return out;
}

// Trapezoid integral of one mode's |coefficient|^2 profile.
inline double trapz_abs2(const StripGrid& g, const cvec& c, int a, int b) {
  double s = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    double w = (j == 0 || j == g.ny() - 1) ? 0.5 * g.dy() : g.dy();
    s += w * std::norm(c[g.at(j, a, b)]);
  }
  return s;
}

inline Field dealias(const Field& f) {
  const StripGrid& g = f.grid();
  Field out(g, f.hermitian(), f.dirichlet());
  for (int j = 0; j < g.ny(); ++j)
    for (int a = 0; a < g.n1(); ++a)
      for (int b = 0; b < g.n2(); ++b)
        out.at(j, a, b) = g.keep(a, b) ? f.at(j, a, b) : 0.0;
  return out;
}

// Pointwise physical-space product with 2/3-rule truncation of the result.
// Alias-free when the inputs are band-limited to the 2/3 ball (the solvers
// keep their states inside it).
inline Field dealias_product(const Field& a, const Field& b) {
  a.require_same_grid(b);
  const StripGrid& g = a.grid();
  Field out(g, a.hermitian() && b.hermitian(), a.dirichlet() || b.dirichlet());
  cvec pa(g.plane_size()), pb(g.plane_size()), ps(g.plane_size());
  for (int j = 0; j < g.ny(); ++j) {
    const auto* ca = a.data().data() + j * g.plane_size();
    const auto* cb = b.data().data() + j * g.plane_size();
    g.plane_to_physical(ca, pa.data());
    g.plane_to_physical(cb, pb.data());
    for (std::size_t i = 0; i < g.plane_size(); ++i) pa[i] *= pb[i];
    g.plane_to_spectral(pa.data(), ps.data());
    auto* co = out.data().data() + j * g.plane_size();
    for (int x = 0; x < g.n1(); ++x)
      for (int y = 0; y < g.n2(); ++y) {
        std::size_t i = static_cast<std::size_t>(x) * g.n2() + y;
        co[i] = g.keep(x, y) ? ps[i] : 0.0;
      }
  }
  return out;
}

// Squared L^2 norm over the strip: integral |f|^2 dx dy
// = period^2 * sum_k trapz_y |fhat(k, .)|^2 (Parseval).
inline double l2norm2(const Field& f) {
  const StripGrid& g = f.grid();
  double s = 0.0;
  for (int a = 0; a < g.n1(); ++a)
    for (int b = 0; b < g.n2(); ++b) s += trapz_abs2(g, f.data(), a, b);
  return s * g.period() * g.period();
}

// Real L^2 inner product <a, b> with the same Parseval/trapezoid convention.
inline double inner(const Field& a, const Field& b) {
  a.require_same_grid(b);
  const StripGrid& g = a.grid();
  double s = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    double w = (j == 0 || j == g.ny() - 1) ? 0.5 * g.dy() : g.dy();
    const auto* ca = a.data().data() + j * g.plane_size();
    const auto* cb = b.data().data() + j * g.plane_size();
    for (std::size_t i = 0; i < g.plane_size(); ++i)
      s += w * (ca[i] * std::conj(cb[i])).real();
  }
  return s * g.period() * g.period();
}

inline bool all_finite(const Field& f) {
  for (const auto& z : f.data())
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

}  // namespace stripflow
