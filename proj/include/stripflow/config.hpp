#pragma once

#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stripflow/common.hpp"

namespace stripflow {

enum class SystemKind { hydro, aniso, limit_sweep, verify, dump_symbols };

inline std::string system_name(SystemKind s) {
  switch (s) {
    case SystemKind::hydro: return "hydro";
    case SystemKind::aniso: return "aniso";
    case SystemKind::limit_sweep: return "limit-sweep";
    case SystemKind::verify: return "verify";
    case SystemKind::dump_symbols: return "dump-symbols";
  }
  return "hydro";
}

inline SystemKind system_from_name(const std::string& s) {
  if (s == "hydro") return SystemKind::hydro;
  if (s == "aniso") return SystemKind::aniso;
  if (s == "limit-sweep") return SystemKind::limit_sweep;
  if (s == "verify") return SystemKind::verify;
  if (s == "dump-symbols") return SystemKind::dump_symbols;
  throw ConfigError("config: unknown system '" + s + "'");
}

struct RunConfig {
  SystemKind system = SystemKind::hydro;
  int n1 = 32, n2 = 32, ny = 65;
  double period = two_pi;
  double dt = 0.02;
  double T = 64.0;
  double eps0 = 1e-3;  // initial-data amplitude (delta0 of the aniso runs)
  double rho0 = 0.5;
  double schedule_a = 1.0 / 96.0;
  double eps = 0.1;  // anisotropy parameter for single aniso runs
  std::vector<double> eps_list{0.2, 0.1, 0.05};
  std::string family = "stream";  // or "shear"
  // Vertical initial data is always reconstructed from the horizontal
  // divergence; the key exists so that asking for independent vertical data
  // fails with an explanation instead of being silently ignored.
  std::string v_data = "constraint";
  std::uint64_t seed = 1;
  double sample_stride = 1.0;
  double checkpoint_stride = 0.0;  // 0: final checkpoint only
  std::string out_dir = "out";
  int threads = 1;

  bool operator==(const RunConfig&) const = default;
};

namespace config_detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("config: value of '" + key + "' is not a number: " + v);
  return x;
}

inline long long parse_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("config: value of '" + key + "' is not an integer: " + v);
  return x;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  char* end = nullptr;
  unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0' || v.find('-') != std::string::npos)
    throw ConfigError("config: value of '" + key + "' is not an unsigned integer: " + v);
  return x;
}

inline std::vector<double> parse_list(const std::string& key,
                                      const std::string& v) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    std::size_t c = v.find(',', pos);
    std::string item = trim(c == std::string::npos ? v.substr(pos)
                                                   : v.substr(pos, c - pos));
    if (!item.empty()) out.push_back(parse_double(key, item));
    if (c == std::string::npos) break;
    pos = c + 1;
  }
  if (out.empty())
    throw ConfigError("config: value of '" + key + "' is an empty list");
  return out;
}

inline void set_key(RunConfig& c, const std::string& key,
                    const std::string& value) {
  if (key == "system") c.system = system_from_name(value);
  else if (key == "n1") c.n1 = static_cast<int>(parse_int(key, value));
  else if (key == "n2") c.n2 = static_cast<int>(parse_int(key, value));
  else if (key == "ny") c.ny = static_cast<int>(parse_int(key, value));
  else if (key == "period") c.period = parse_double(key, value);
  else if (key == "dt") c.dt = parse_double(key, value);
  else if (key == "T") c.T = parse_double(key, value);
  else if (key == "eps0" || key == "delta0") c.eps0 = parse_double(key, value);
  else if (key == "rho0") c.rho0 = parse_double(key, value);
  else if (key == "schedule_a") c.schedule_a = parse_double(key, value);
  else if (key == "eps") c.eps = parse_double(key, value);
  else if (key == "eps_list") c.eps_list = parse_list(key, value);
  else if (key == "family") c.family = value;
  else if (key == "v_data") c.v_data = value;
  else if (key == "seed") c.seed = parse_u64(key, value);
  else if (key == "sample_stride") c.sample_stride = parse_double(key, value);
  else if (key == "checkpoint_stride") c.checkpoint_stride = parse_double(key, value);
  else if (key == "out_dir") c.out_dir = value;
  else if (key == "threads") c.threads = static_cast<int>(parse_int(key, value));
  else throw ConfigError("config: unknown key '" + key + "'");
}

}  // namespace config_detail

inline void validate_config(const RunConfig& c) {
  auto bad = [](const std::string& field, const std::string& why) {
    throw ConfigError("config: field '" + field + "' " + why);
  };
  if (c.n1 <= 0 || c.n1 % 2 != 0) bad("n1", "must be a positive even integer");
  if (c.n2 <= 0 || c.n2 % 2 != 0) bad("n2", "must be a positive even integer");
  if (c.ny < 8) bad("ny", "must be at least 8");
  if (!(c.period > 0.0)) bad("period", "must be positive");
  if (!(c.T > 0.0)) bad("T", "must be positive");
  if (!(c.dt > 0.0) || c.dt > c.T) bad("dt", "must lie in (0, T]");
  if (!(c.eps0 > 0.0)) bad("eps0", "must be positive");
  if (!(c.rho0 > 0.0)) bad("rho0", "must be positive");
  if (c.schedule_a < 0.0) bad("schedule_a", "must be nonnegative");
  if (!(c.eps > 0.0) || c.eps > 1.0) bad("eps", "must lie in (0, 1]");
  if (c.eps_list.empty()) bad("eps_list", "must be non-empty");
  for (std::size_t i = 0; i < c.eps_list.size(); ++i) {
    if (!(c.eps_list[i] > 0.0) || c.eps_list[i] > 0.5)
      bad("eps_list", "entries must lie in (0, 0.5]");
    if (i > 0 && !(c.eps_list[i] < c.eps_list[i - 1]))
      bad("eps_list", "must be strictly decreasing");
  }
  if (c.family != "stream" && c.family != "shear")
    bad("family", "must be 'stream' or 'shear'");
  if (c.v_data != "constraint")
    bad("v_data",
        "must be 'constraint': the vertical velocity is slaved to the "
        "horizontal divergence, so independent vertical data cannot satisfy "
        "the divergence identity the state maintains");
  if (!(c.sample_stride > 0.0)) bad("sample_stride", "must be positive");
  if (c.checkpoint_stride < 0.0) bad("checkpoint_stride", "must be nonnegative");
  if (c.threads < 1) bad("threads", "must be at least 1");
}

// Flat key = value lines; blank lines and #/; comments skipped; [section]
// headers are organizational only (keys are globally unique). Unknown keys
// and duplicates are errors.
inline RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::set<std::string> seen;
  std::size_t pos = 0;
  int lineno = 0;
  while (pos <= text.size()) {
    std::size_t e = text.find('\n', pos);
    std::string line = config_detail::trim(
        e == std::string::npos ? text.substr(pos) : text.substr(pos, e - pos));
    ++lineno;
    pos = (e == std::string::npos) ? text.size() + 1 : e + 1;
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config: malformed section header at line " +
                          std::to_string(lineno));
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key = value at line " +
                        std::to_string(lineno));
    std::string key = config_detail::trim(line.substr(0, eq));
    std::string value = config_detail::trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config: empty key at line " + std::to_string(lineno));
    std::string canon = (key == "delta0") ? "eps0" : key;
    if (!seen.insert(canon).second)
      throw ConfigError("config: duplicate key '" + key + "'");
    config_detail::set_key(c, key, value);
  }
  validate_config(c);
  return c;
}

inline void apply_override(RunConfig& c, const std::string& kv) {
  std::size_t eq = kv.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must have the form key=value: " + kv);
  std::string key = config_detail::trim(kv.substr(0, eq));
  std::string value = config_detail::trim(kv.substr(eq + 1));
  if (key.empty()) throw ConfigError("override has an empty key: " + kv);
  config_detail::set_key(c, key, value);
}

inline std::string serialize_config(const RunConfig& c) {
  std::string s;
  s += "system = " + system_name(c.system) + "\n";
  s += "n1 = " + std::to_string(c.n1) + "\n";
  s += "n2 = " + std::to_string(c.n2) + "\n";
  s += "ny = " + std::to_string(c.ny) + "\n";
  s += "period = " + g17(c.period) + "\n";
  s += "dt = " + g17(c.dt) + "\n";
  s += "T = " + g17(c.T) + "\n";
  s += "eps0 = " + g17(c.eps0) + "\n";
  s += "rho0 = " + g17(c.rho0) + "\n";
  s += "schedule_a = " + g17(c.schedule_a) + "\n";
  s += "eps = " + g17(c.eps) + "\n";
  s += "eps_list = ";
  for (std::size_t i = 0; i < c.eps_list.size(); ++i) {
    if (i) s += ", ";
    s += g17(c.eps_list[i]);
  }
  s += "\n";
  s += "family = " + c.family + "\n";
  s += "v_data = " + c.v_data + "\n";
  s += "seed = " + std::to_string(c.seed) + "\n";
  s += "sample_stride = " + g17(c.sample_stride) + "\n";
  s += "checkpoint_stride = " + g17(c.checkpoint_stride) + "\n";
  s += "out_dir = " + c.out_dir + "\n";
  s += "threads = " + std::to_string(c.threads) + "\n";
  return s;
}

// Physics-relevant portion of the config for embedding into run outputs;
// excludes execution details (out_dir, threads) so that reruns at other
// paths or parallelism produce identical streams.
inline nlohmann::ordered_json config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["system"] = system_name(c.system);
  j["n1"] = c.n1;
  j["n2"] = c.n2;
  j["ny"] = c.ny;
  j["period"] = c.period;
  j["dt"] = c.dt;
  j["T"] = c.T;
  j["eps0"] = c.eps0;
  j["rho0"] = c.rho0;
  j["schedule_a"] = c.schedule_a;
  j["eps"] = c.eps;
  j["eps_list"] = c.eps_list;
  j["family"] = c.family;
  j["v_data"] = c.v_data;
  j["seed"] = c.seed;
  j["sample_stride"] = c.sample_stride;
  j["checkpoint_stride"] = c.checkpoint_stride;
  return j;
}

}  // namespace stripflow
