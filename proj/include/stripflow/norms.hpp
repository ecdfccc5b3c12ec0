#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "stripflow/field.hpp"
#include "stripflow/gevrey.hpp"

namespace stripflow {

// Distinct wavenumber magnitudes appearing along either grid direction.
inline std::vector<double> grid_kappas(const StripGrid& g) {
  std::vector<double> v;
  for (int a = 0; a < g.n1(); ++a) v.push_back(std::abs(g.k1(a)));
  for (int b = 0; b < g.n2(); ++b) v.push_back(std::abs(g.k2(b)));
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

namespace norm_detail {

// Combined per-mode symbol S(|k1|) + S(|k2|) minus the doubly counted
// zeroth-order term (the m = 0 contribution belongs to the mode once).
inline double combined(const NormSymbol& s, double zeroth, double ka, double kb) {
  return s.value(ka) + s.value(kb) - zeroth;
}

}  // namespace norm_detail

// One component of a state contributes three L^2_y blocks per mode:
// time-derivative slot, vertical-derivative slot, zeroth slot.
struct NormBlocks {
  const Field* dt_slot;    // may be null (treated as zero)
  const Field* dy_slot;    // may be null
  const Field* zero_slot;  // may be null
};

// Squared X_rho norm: sum over components and modes of
// S_X-combined(k) * (||dt||^2_y + ||dy||^2_y + ||.||^2_y), times period^2.
inline double x_norm2_blocks(const StripGrid& g,
                             const std::vector<NormBlocks>& comps, double rho) {
  NormSymbol sx(rho, SymbolKind::x, grid_kappas(g));
  const double zeroth = rho * rho;
  double tot = 0.0;
  for (const auto& c : comps)
    for (int a = 0; a < g.n1(); ++a)
      for (int b = 0; b < g.n2(); ++b) {
        double blocks = 0.0;
        if (c.dt_slot) blocks += trapz_abs2(g, c.dt_slot->data(), a, b);
        if (c.dy_slot) blocks += trapz_abs2(g, c.dy_slot->data(), a, b);
        if (c.zero_slot) blocks += trapz_abs2(g, c.zero_slot->data(), a, b);
        tot += norm_detail::combined(sx, zeroth, std::abs(g.k1(a)),
                                     std::abs(g.k2(b))) *
               blocks;
      }
  return tot * g.period() * g.period();
}

// Squared Y_rho norm: (m+1)/rho weights on the dt and dy blocks,
// (m+1)^3/rho^3 on the zeroth block.
inline double y_norm2_blocks(const StripGrid& g,
                             const std::vector<NormBlocks>& comps, double rho) {
  auto kappas = grid_kappas(g);
  NormSymbol s1(rho, SymbolKind::y_first_order, kappas);
  NormSymbol s0(rho, SymbolKind::y_zeroth_order, kappas);
  const double z1 = rho;            // (1/rho) L_{rho,0}^2
  const double z0 = 1.0 / rho;      // (1/rho^3) L_{rho,0}^2
  double tot = 0.0;
  for (const auto& c : comps)
    for (int a = 0; a < g.n1(); ++a)
      for (int b = 0; b < g.n2(); ++b) {
        double ka = std::abs(g.k1(a)), kb = std::abs(g.k2(b));
        double first = 0.0, zero = 0.0;
        if (c.dt_slot) first += trapz_abs2(g, c.dt_slot->data(), a, b);
        if (c.dy_slot) first += trapz_abs2(g, c.dy_slot->data(), a, b);
        if (c.zero_slot) zero += trapz_abs2(g, c.zero_slot->data(), a, b);
        tot += norm_detail::combined(s1, z1, ka, kb) * first +
               norm_detail::combined(s0, z0, ka, kb) * zero;
      }
  return tot * g.period() * g.period();
}

// X_rho norm of a two-component pair (u, w = dt u); the dy blocks are the
// discrete vertical derivatives of u.
inline double x_norm(const Field& u1, const Field& u2, const Field& w1,
                     const Field& w2, double rho) {
  Field d1 = dy(u1), d2 = dy(u2);
  std::vector<NormBlocks> comps{{&w1, &d1, &u1}, {&w2, &d2, &u2}};
  return std::sqrt(x_norm2_blocks(u1.grid(), comps, rho));
}

inline double y_norm(const Field& u1, const Field& u2, const Field& w1,
                     const Field& w2, double rho) {
  Field d1 = dy(u1), d2 = dy(u2);
  std::vector<NormBlocks> comps{{&w1, &d1, &u1}, {&w2, &d2, &u2}};
  return std::sqrt(y_norm2_blocks(u1.grid(), comps, rho));
}

// Scalar-field norm equivalence sandwich:
//   (1/2) ||h||^2_{rho/2}  <=  |h|^2_{X_rho}  <=  ||h||^2_rho
// where ||.||_rho runs over all multi-indices and |.|_{X_rho} over the two
// axis directions, both reduced to per-mode Fourier symbols against the
// plain L^2_y profile of the field.
inline bool norm_equivalence_check(const Field& h, double rho,
                                   double slack = 1e-12) {
  const StripGrid& g = h.grid();
  NormSymbol sx(rho, SymbolKind::x, grid_kappas(g));
  WeightTable wt_full(rho), wt_half(0.5 * rho);
  const double zeroth = rho * rho;
  double axis = 0.0, full = 0.0, half = 0.0;
  for (int a = 0; a < g.n1(); ++a)
    for (int b = 0; b < g.n2(); ++b) {
      double B = trapz_abs2(g, h.data(), a, b);
      if (B == 0.0) continue;
      double ka = std::abs(g.k1(a)), kb = std::abs(g.k2(b));
      axis += norm_detail::combined(sx, zeroth, ka, kb) * B;
      full += detail::full_symbol(wt_full, ka, kb) * B;
      half += detail::full_symbol(wt_half, ka, kb) * B;
    }
  return 0.5 * half <= axis * (1.0 + slack) && axis <= full * (1.0 + slack);
}

}  // namespace stripflow
