#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <vector>

#include "stripflow/common.hpp"

namespace stripflow {

using cvec = std::vector<std::complex<double>>;

// Periodic Fourier representation in x = (x1, x2) on a torus of side
// `period`, uniform nodes in y on [0, 1] including both walls.
// Coefficient layout everywhere: y-plane major, index (iy, i1, i2), i2 fastest.
class StripGrid {
 public:
  StripGrid(int n1, int n2, int ny, double period = two_pi)
      : n1_(n1), n2_(n2), ny_(ny), period_(period) {
    if (n1 <= 0 || n1 % 2 != 0 || n2 <= 0 || n2 % 2 != 0)
      throw ConfigError("StripGrid: n1 and n2 must be even positive");
    if (ny < 8) throw ConfigError("StripGrid: ny must be at least 8");
    if (!(period > 0.0)) throw ConfigError("StripGrid: period must be positive");
    dy_ = 1.0 / (ny - 1);
    y_.resize(ny);
    for (int j = 0; j < ny; ++j) y_[j] = static_cast<double>(j) / (ny - 1);

    auto fill = [&](int n, std::vector<int>& idx, std::vector<double>& k) {
      idx.resize(n);
      k.resize(n);
      for (int i = 0; i < n; ++i) {
        idx[i] = (i <= n / 2 - 1) ? i : i - n;
        k[i] = (two_pi / period) * idx[i];
      }
    };
    fill(n1, idx1_, k1_);
    fill(n2, idx2_, k2_);

    // 2/3-rule ball, Nyquist excluded from nonlinear products.
    keep_.assign(static_cast<std::size_t>(n1) * n2, 0);
    for (int a = 0; a < n1; ++a)
      for (int b = 0; b < n2; ++b) {
        bool ok = std::abs(idx1_[a]) <= n1 / 3 && std::abs(idx2_[b]) <= n2 / 3 &&
                  idx1_[a] != -n1 / 2 && idx2_[b] != -n2 / 2;
        keep_[static_cast<std::size_t>(a) * n2 + b] = ok ? 1 : 0;
      }

    // FFTW's planner is not thread-safe; creation and destruction are
    // serialized globally. FFTW_ESTIMATE keeps the algorithm choice (and
    // hence every bit of the output) deterministic.
    cvec tmp_in(plane_size()), tmp_out(plane_size());
    std::lock_guard<std::mutex> lock(planner_mutex());
    int dims[2] = {n1, n2};
    fwd_ = fftw_plan_many_dft(
        2, dims, 1, reinterpret_cast<fftw_complex*>(tmp_in.data()), nullptr, 1,
        0, reinterpret_cast<fftw_complex*>(tmp_out.data()), nullptr, 1, 0,
        FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    bwd_ = fftw_plan_many_dft(
        2, dims, 1, reinterpret_cast<fftw_complex*>(tmp_in.data()), nullptr, 1,
        0, reinterpret_cast<fftw_complex*>(tmp_out.data()), nullptr, 1, 0,
        FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!fwd_ || !bwd_) throw StructuralError("StripGrid: FFTW plan creation failed");
  }

  ~StripGrid() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }

  StripGrid(const StripGrid&) = delete;
  StripGrid& operator=(const StripGrid&) = delete;

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  int ny() const { return ny_; }
  double period() const { return period_; }
  double dy() const { return dy_; }
  const std::vector<double>& y() const { return y_; }

  int idx1(int a) const { return idx1_[a]; }
  int idx2(int b) const { return idx2_[b]; }
  double k1(int a) const { return k1_[a]; }
  double k2(int b) const { return k2_[b]; }
  bool keep(int a, int b) const {
    return keep_[static_cast<std::size_t>(a) * n2_ + b] != 0;
  }
  // Position of signed integer index in storage order.
  int pos1(int s) const { return s >= 0 ? s : s + n1_; }
  int pos2(int s) const { return s >= 0 ? s : s + n2_; }

  std::size_t plane_size() const { return static_cast<std::size_t>(n1_) * n2_; }
  std::size_t size() const { return plane_size() * ny_; }
  std::size_t at(int iy, int a, int b) const {
    return (static_cast<std::size_t>(iy) * n1_ + a) * n2_ + b;
  }

  // Spectral coefficients are Fourier-series coefficients:
  // f(x) = sum_k fhat(k) e^{i k.x}; forward transform divides by n1*n2.
  // Both directions work plane-by-plane (fftw_execute_dft is thread-safe).
  void plane_to_physical(const std::complex<double>* spec,
                         std::complex<double>* phys) const {
    fftw_execute_dft(
        bwd_,
        reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(spec)),
        reinterpret_cast<fftw_complex*>(phys));
  }
  void plane_to_spectral(const std::complex<double>* phys,
                         std::complex<double>* spec) const {
    fftw_execute_dft(
        fwd_,
        reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(phys)),
        reinterpret_cast<fftw_complex*>(spec));
    double inv = 1.0 / (static_cast<double>(n1_) * n2_);
    for (std::size_t i = 0; i < plane_size(); ++i) spec[i] *= inv;
  }
  void to_physical(const cvec& spec, cvec& phys) const {
    phys.resize(size());
    for (int j = 0; j < ny_; ++j)
      plane_to_physical(spec.data() + j * plane_size(),
                        phys.data() + j * plane_size());
  }
  void to_spectral(const cvec& phys, cvec& spec) const {
    spec.resize(size());
    for (int j = 0; j < ny_; ++j)
      plane_to_spectral(phys.data() + j * plane_size(),
                        spec.data() + j * plane_size());
  }

  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }

 private:
  int n1_, n2_, ny_;
  double period_, dy_;
  std::vector<double> y_;
  std::vector<int> idx1_, idx2_;
  std::vector<double> k1_, k2_;
  std::vector<char> keep_;
  fftw_plan fwd_, bwd_;
};

}  // namespace stripflow
