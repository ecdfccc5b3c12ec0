#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "stripflow/field.hpp"
#include "stripflow/hash.hpp"

namespace stripflow {

// Self-describing binary container, little-endian throughout:
//   magic "STRIPCKP", u32 version, u32 system tag (0 hydro, 1 aniso),
//   i32 n1 n2 ny, f64 period time eps rho0, u32 field count,
//   per field: u16 name length, name bytes, u8 flags (bit0 hermitian,
//   bit1 dirichlet), then n1*n2*ny coefficients as f64 re, f64 im pairs in
//   (iy, i1, i2) order with i2 fastest,
//   trailing u64 FNV-1a hash of everything before it.
// Raw f64 bytes make the round trip bit-exact by construction.

namespace ckpt_detail {

inline constexpr char magic[8] = {'S', 'T', 'R', 'I', 'P', 'C', 'K', 'P'};
inline constexpr std::uint32_t version = 1;

template <class T>
void put(std::string& buf, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  buf.append(b, sizeof(T));
}

template <class T>
T take(const std::string& buf, std::size_t& off) {
  if (off + sizeof(T) > buf.size())
    throw StructuralError("checkpoint: truncated file");
  T v;
  std::memcpy(&v, buf.data() + off, sizeof(T));
  off += sizeof(T);
  return v;
}

}  // namespace ckpt_detail

struct CheckpointField {
  std::string name;
  bool hermitian = false, dirichlet = false;
  cvec coeffs;
};

struct Checkpoint {
  std::uint32_t system = 0;  // 0 hydro, 1 aniso
  int n1 = 0, n2 = 0, ny = 0;
  double period = 0, time = 0, eps = 0, rho0 = 0;
  std::vector<CheckpointField> fields;

  const CheckpointField& field(const std::string& name) const {
    for (const auto& f : fields)
      if (f.name == name) return f;
    throw StructuralError("checkpoint: no field named " + name);
  }

  Field make_field(const StripGrid& g, const std::string& name) const {
    if (g.n1() != n1 || g.n2() != n2 || g.ny() != ny)
      throw StructuralError("checkpoint: grid mismatch");
    const CheckpointField& cf = field(name);
    Field out(g, cf.hermitian, cf.dirichlet);
    out.data() = cf.coeffs;
    return out;
  }
};

inline void save_checkpoint(const std::string& path, const Checkpoint& c) {
  using namespace ckpt_detail;
  std::string buf;
  buf.append(magic, sizeof magic);
  put(buf, version);
  put(buf, c.system);
  put<std::int32_t>(buf, c.n1);
  put<std::int32_t>(buf, c.n2);
  put<std::int32_t>(buf, c.ny);
  put(buf, c.period);
  put(buf, c.time);
  put(buf, c.eps);
  put(buf, c.rho0);
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(c.fields.size()));
  for (const auto& f : c.fields) {
    put<std::uint16_t>(buf, static_cast<std::uint16_t>(f.name.size()));
    buf.append(f.name);
    put<std::uint8_t>(buf, (f.hermitian ? 1 : 0) | (f.dirichlet ? 2 : 0));
    for (const auto& z : f.coeffs) {
      put(buf, z.real());
      put(buf, z.imag());
    }
  }
  Fnv1a h;
  h.update(buf.data(), buf.size());
  put(buf, h.value());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw StructuralError("checkpoint: cannot open " + path);
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!os) throw StructuralError("checkpoint: write failed for " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
  using namespace ckpt_detail;
  std::ifstream is(path, std::ios::binary);
  if (!is) throw StructuralError("checkpoint: cannot open " + path);
  std::string buf((std::istreambuf_iterator<char>(is)),
                  std::istreambuf_iterator<char>());
  if (buf.size() < sizeof magic + 8)
    throw StructuralError("checkpoint: truncated file");
  Fnv1a h;
  h.update(buf.data(), buf.size() - 8);
  std::size_t off = buf.size() - 8;
  if (take<std::uint64_t>(buf, off) != h.value())
    throw StructuralError("checkpoint: content hash mismatch");
  off = 0;
  if (std::memcmp(buf.data(), magic, sizeof magic) != 0)
    throw StructuralError("checkpoint: bad magic");
  off += sizeof magic;
  if (take<std::uint32_t>(buf, off) != version)
    throw StructuralError("checkpoint: unsupported version");
  Checkpoint c;
  c.system = take<std::uint32_t>(buf, off);
  c.n1 = take<std::int32_t>(buf, off);
  c.n2 = take<std::int32_t>(buf, off);
  c.ny = take<std::int32_t>(buf, off);
  c.period = take<double>(buf, off);
  c.time = take<double>(buf, off);
  c.eps = take<double>(buf, off);
  c.rho0 = take<double>(buf, off);
  auto nf = take<std::uint32_t>(buf, off);
  std::size_t n = static_cast<std::size_t>(c.n1) * c.n2 * c.ny;
  for (std::uint32_t i = 0; i < nf; ++i) {
    CheckpointField f;
    auto len = take<std::uint16_t>(buf, off);
    if (off + len > buf.size()) throw StructuralError("checkpoint: truncated file");
    f.name.assign(buf.data() + off, len);
    off += len;
    auto flags = take<std::uint8_t>(buf, off);
    f.hermitian = flags & 1;
    f.dirichlet = flags & 2;
    f.coeffs.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      double re = take<double>(buf, off);
      double im = take<double>(buf, off);
      f.coeffs[j] = {re, im};
    }
    c.fields.push_back(std::move(f));
  }
  return c;
}

}  // namespace stripflow
