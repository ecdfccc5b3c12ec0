#pragma once

#include <complex>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace stripflow {

// FNV-1a, 64-bit: content hashes for checkpoints, initial data, and reports.
class Fnv1a {
 public:
  void update(const void* data, std::size_t n) {
    auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 1099511628211ULL;
    }
  }
  void update(const std::string& s) { update(s.data(), s.size()); }
  void update(double x) { update(&x, sizeof x); }
  void update(const std::vector<std::complex<double>>& v) {
    update(v.data(), v.size() * sizeof(std::complex<double>));
  }
  std::uint64_t value() const { return h_; }

  std::string hex() const {
    static const char* d = "0123456789abcdef";
    std::string s(16, '0');
    std::uint64_t v = h_;
    for (int i = 15; i >= 0; --i) {
      s[i] = d[v & 0xf];
      v >>= 4;
    }
    return s;
  }

 private:
  std::uint64_t h_ = 14695981039346656037ULL;
};

}  // namespace stripflow
