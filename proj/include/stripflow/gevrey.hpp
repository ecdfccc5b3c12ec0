#pragma once

#include <cmath>
#include <map>
#include <ostream>
#include <utility>
#include <vector>

#include "stripflow/common.hpp"

namespace stripflow {

inline constexpr int default_m_max = 400;
inline constexpr double default_tail_tol = 1e-14;

// Shrinking analyticity radius rho(t) = rho0/2 + (rho0/2) e^{-a t}.
// a = 0 is accepted as the degenerate constant schedule.
struct RadiusSchedule {
  double rho0;
  double a;

  explicit RadiusSchedule(double rho0_, double a_ = 1.0 / 96.0)
      : rho0(rho0_), a(a_) {
    if (!(rho0 > 0.0)) throw std::domain_error("RadiusSchedule: rho0 must be positive");
    if (!(a >= 0.0)) throw std::domain_error("RadiusSchedule: a must be nonnegative");
  }

  double radius(double t) const {
    check_t(t);
    return 0.5 * rho0 + 0.5 * rho0 * std::exp(-a * t);
  }
  double drho(double t) const {
    check_t(t);
    return -0.5 * rho0 * a * std::exp(-a * t);
  }
  double ddrho(double t) const {
    check_t(t);
    return 0.5 * rho0 * a * a * std::exp(-a * t);
  }

  // |(rho'' - rho'^2/rho) - rho0 a^2 e^{-at} / (2 (1 + e^{-at}))|
  double identity_residual(double t) const {
    check_t(t);
    double e = std::exp(-a * t);
    double lhs = ddrho(t) - drho(t) * drho(t) / radius(t);
    double rhs = rho0 * a * a * e / (2.0 * (1.0 + e));
    return std::abs(lhs - rhs);
  }

 private:
  static void check_t(double t) {
    if (!(t >= 0.0)) throw std::domain_error("RadiusSchedule: t must be nonnegative");
  }
};

namespace detail {

// log of the weight rho^{m+1} (m+1)^7 / (m!)^2 via the multiplicative
// recurrence; (m!)^2 overflows double precision near m = 86, so everything
// log-space and long double.
inline std::vector<long double> build_log_weights(double rho, int m_max) {
  if (!(rho > 0.0)) throw std::domain_error("weight: rho must be positive");
  if (m_max < 0) throw std::domain_error("weight: m_max must be nonnegative");
  std::vector<long double> lw(static_cast<std::size_t>(m_max) + 1);
  const long double lr = std::log(static_cast<long double>(rho));
  lw[0] = lr;  // rho^1 * 1^7 / (0!)^2
  for (int m = 0; m < m_max; ++m) {
    long double mm = m;
    lw[m + 1] = lw[m] + lr + 7.0L * std::log((mm + 2.0L) / (mm + 1.0L)) -
                2.0L * std::log(mm + 1.0L);
  }
  return lw;
}

}  // namespace detail

class WeightTable {
 public:
  explicit WeightTable(double rho, int m_max = default_m_max)
      : rho_(rho), m_max_(m_max), lw_(detail::build_log_weights(rho, m_max)) {}

  double rho() const { return rho_; }
  int m_max() const { return m_max_; }

  long double log_weight(int m) const {
    if (m < 0 || m > m_max_) throw std::domain_error("WeightTable: m out of range");
    return lw_[static_cast<std::size_t>(m)];
  }
  // Values span far beyond double range over the contract domain
  // (rho in [1e-3, 10], m <= 400), hence long double.
  long double weight(int m) const { return std::exp(log_weight(m)); }

 private:
  double rho_;
  int m_max_;
  std::vector<long double> lw_;
};

inline long double weight(double rho, int m, int m_max = default_m_max) {
  if (m < 0 || m > m_max) throw std::domain_error("weight: m out of range");
  return WeightTable(rho, m).weight(m);
}

enum class SymbolKind { x, y_first_order, y_zeroth_order };

namespace detail {

inline long double log_block_factor(SymbolKind kind, double rho, int m) {
  switch (kind) {
    case SymbolKind::x:
      return 0.0L;
    case SymbolKind::y_first_order:
      return std::log(static_cast<long double>(m + 1)) -
             std::log(static_cast<long double>(rho));
    case SymbolKind::y_zeroth_order:
      return 3.0L * std::log(static_cast<long double>(m + 1)) -
             3.0L * std::log(static_cast<long double>(rho));
  }
  return 0.0L;
}

// Truncated sum over m of c_m L_{rho,m}^2 kappa^{2m}; stops once the last 20
// terms together contribute under tail_tol relatively (the terms decay
// super-exponentially after the pre-asymptotic hump, so a 20-term window
// bounds the omitted tail).
inline double symbol_sum(const WeightTable& wt, double kappa, SymbolKind kind,
                         double tail_tol) {
  const double rho = wt.rho();
  if (kappa == 0.0) {
    return static_cast<double>(
        std::exp(2.0L * wt.log_weight(0) + log_block_factor(kind, rho, 0)));
  }
  const long double lk = std::log(static_cast<long double>(kappa));
  long double s = 0.0L;
  long double window[20] = {};
  long double window_sum = 0.0L;
  int wpos = 0;
  for (int m = 0; m <= wt.m_max(); ++m) {
    long double lt = 2.0L * wt.log_weight(m) + 2.0L * m * lk +
                     log_block_factor(kind, rho, m);
    long double t = std::exp(lt);
    s += t;
    window_sum += t - window[wpos];
    window[wpos] = t;
    wpos = (wpos + 1) % 20;
    if (m >= 19 && window_sum < tail_tol * s) return static_cast<double>(s);
  }
  throw PrecisionError("norm symbol sum did not converge within m_max terms");
}

}  // namespace detail

inline double norm_symbol(double rho, double kappa, SymbolKind kind,
                          double tail_tol = default_tail_tol,
                          int m_max = default_m_max) {
  if (!(rho > 0.0)) throw std::domain_error("norm_symbol: rho must be positive");
  if (!(kappa >= 0.0)) throw std::domain_error("norm_symbol: kappa must be nonnegative");
  WeightTable wt(rho, m_max);
  return detail::symbol_sum(wt, kappa, kind, tail_tol);
}

// Immutable per-(rho, kind) table of symbol values over a fixed kappa set;
// built single-threaded, safe to share afterwards.
class NormSymbol {
 public:
  NormSymbol(double rho, SymbolKind kind, const std::vector<double>& kappas,
             double tail_tol = default_tail_tol, int m_max = default_m_max)
      : rho_(rho), kind_(kind), tail_tol_(tail_tol) {
    WeightTable wt(rho, m_max);
    for (double k : kappas)
      values_.emplace(k, detail::symbol_sum(wt, k, kind, tail_tol));
  }

  double rho() const { return rho_; }
  SymbolKind kind() const { return kind_; }
  double tail_tol() const { return tail_tol_; }
  const std::map<double, double>& values() const { return values_; }

  double value(double kappa) const {
    auto it = values_.find(kappa);
    if (it == values_.end())
      throw StructuralError("NormSymbol: kappa not in the cached set");
    return it->second;
  }

  void dump_csv(std::ostream& os) const {
    os << "kappa,value\n";
    for (const auto& [k, v] : values_) os << g17(k) << "," << g17(v) << "\n";
  }

 private:
  double rho_;
  SymbolKind kind_;
  double tail_tol_;
  std::map<double, double> values_;
};

// Brute-force certification constants for the two combinatorial weight
// inequalities: the maxima over the stated (m, k) ranges of the left side
// divided by its claimed right-side shape. Log-space throughout (binomials
// and weights overflow otherwise).
inline std::pair<double, double> certify_weight_inequalities(double rho,
                                                             int m_max) {
  if (m_max < 4) throw std::domain_error("certify_weight_inequalities: m_max < 4");
  WeightTable wt(rho, m_max + 3);
  const long double lr = std::log(static_cast<long double>(rho));
  auto lbinom = [](int m, int k) {
    return std::lgamma(static_cast<long double>(m + 1)) -
           std::lgamma(static_cast<long double>(k + 1)) -
           std::lgamma(static_cast<long double>(m - k + 1));
  };
  long double c1 = 0.0L, c2 = 0.0L;
  for (int m = 0; m <= m_max; ++m) {
    for (int k = 0; k <= m / 2; ++k) {
      // binom(m,k) L_m / (L_{k+2} L_{m-k+1})  vs
      // rho^{-2} (k+1)^{-1} ((m+1)/rho)^{1/2} ((m-k+2)/rho)^{3/2}
      long double lhs = lbinom(m, k) + wt.log_weight(m) - wt.log_weight(k + 2) -
                        wt.log_weight(m - k + 1);
      long double shape = -2.0L * lr -
                          std::log(static_cast<long double>(k + 1)) +
                          0.5L * (std::log(static_cast<long double>(m + 1)) - lr) +
                          1.5L * (std::log(static_cast<long double>(m - k + 2)) - lr);
      long double q = std::exp(lhs - shape);
      if (!std::isfinite(static_cast<double>(q)))
        throw PrecisionError("certify_weight_inequalities: non-finite fac1 ratio");
      if (q > c1) c1 = q;
    }
    for (int k = m / 2 + 1; k <= m; ++k) {
      // binom(m,k) L_m / (L_k L_{m-k+3})  vs  rho^{-4} (m-k+1)^{-1}
      long double lhs = lbinom(m, k) + wt.log_weight(m) - wt.log_weight(k) -
                        wt.log_weight(m - k + 3);
      long double shape = -4.0L * lr -
                          std::log(static_cast<long double>(m - k + 1));
      long double q = std::exp(lhs - shape);
      if (!std::isfinite(static_cast<double>(q)))
        throw PrecisionError("certify_weight_inequalities: non-finite fac2 ratio");
      if (q > c2) c2 = q;
    }
  }
  return {static_cast<double>(c1), static_cast<double>(c2)};
}

namespace detail {

// Per-mode symbol of the all-multi-index norm: sum over n of L_{rho,n}^2 h_n
// with h_n = sum_{a+b=n} k1^{2a} k2^{2b}. Terms are built by a scaled
// recurrence so the partial products stay near the actual term magnitude.
inline double full_symbol(const WeightTable& wt, double k1, double k2,
                          double tail_tol = default_tail_tol) {
  k1 = std::abs(k1);
  k2 = std::abs(k2);
  if (k2 > k1) std::swap(k1, k2);  // k1 >= k2, so k2^{2n} never overflows first
  const long double a2 = static_cast<long double>(k1) * k1;
  const long double b2 = static_cast<long double>(k2) * k2;
  long double L2 = std::exp(2.0L * wt.log_weight(0));
  long double H = L2;       // L_n^2 h_n
  long double Bn = L2;      // L_n^2 k2^{2n}
  long double s = 0.0L;
  long double window[20] = {};
  long double window_sum = 0.0L;
  int wpos = 0;
  for (int n = 0; n <= wt.m_max(); ++n) {
    s += H;
    window_sum += H - window[wpos];
    window[wpos] = H;
    wpos = (wpos + 1) % 20;
    if (n >= 19 && window_sum < tail_tol * s) return static_cast<double>(s);
    if (n == wt.m_max()) break;
    long double r = std::exp(2.0L * (wt.log_weight(n + 1) - wt.log_weight(n)));
    Bn *= b2 * r;
    H = a2 * r * H + Bn;
  }
  throw PrecisionError("full norm symbol sum did not converge within m_max terms");
}

}  // namespace detail

}  // namespace stripflow
