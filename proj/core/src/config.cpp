#include "ura/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ura/errors.hpp"

namespace ura {
namespace {

std::string trim(const std::string& s) {
  std::size_t lo = 0;
  std::size_t hi = s.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
  return s.substr(lo, hi - lo);
}

}  // namespace

double SystemConfig::power() const {
  return 2.0 * b * sigma2 * std::pow(10.0, eb_n0_db / 10.0) / n();
}

ConfigMap ConfigMap::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_stream(in);
}

ConfigMap ConfigMap::parse_stream(std::istream& in) {
  ConfigMap cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key");
    }
    cfg.set(key, value);
  }
  return cfg;
}

void ConfigMap::set(const std::string& key, const std::string& value) {
  map_[key] = value;
}

bool ConfigMap::has(const std::string& key) const {
  return map_.count(key) != 0;
}

std::string ConfigMap::get_str(const std::string& key) const {
  const auto it = map_.find(key);
  if (it == map_.end()) throw ConfigError("missing config key: " + key);
  return it->second;
}

std::string ConfigMap::get_str_or(const std::string& key,
                                  const std::string& dflt) const {
  const auto it = map_.find(key);
  return it == map_.end() ? dflt : it->second;
}

long long ConfigMap::get_int(const std::string& key) const {
  const std::string raw = get_str(key);
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an integer: " + raw);
  }
}

long long ConfigMap::get_int_or(const std::string& key, long long dflt) const {
  return has(key) ? get_int(key) : dflt;
}

double ConfigMap::get_double(const std::string& key) const {
  const std::string raw = get_str(key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: " + raw);
  }
}

double ConfigMap::get_double_or(const std::string& key, double dflt) const {
  return has(key) ? get_double(key) : dflt;
}

std::vector<int> ConfigMap::get_int_list(const std::string& key) const {
  const std::string raw = get_str(key);
  std::vector<int> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(static_cast<int>(std::stoll(t, &pos)));
      if (pos != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': bad list entry: " + t);
    }
  }
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

std::vector<std::string> ConfigMap::get_str_list(const std::string& key) const {
  const std::string raw = get_str(key);
  std::vector<std::string> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

std::string ConfigMap::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto absorb = [&h](const std::string& s) {
    for (const char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [key, value] : map_) {  // std::map iterates sorted
    absorb(key);
    absorb("=");
    absorb(value);
    absorb("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

SystemConfig system_config_from(const ConfigMap& cfg) {
  SystemConfig sys;
  sys.k_tot = static_cast<int>(cfg.get_int_or("k_tot", sys.k_tot));
  sys.k_a = static_cast<int>(cfg.get_int_or("k_a", sys.k_a));
  sys.m = static_cast<int>(cfg.get_int_or("m", sys.m));
  sys.l = static_cast<int>(cfg.get_int_or("l", sys.l));
  sys.n0 = static_cast<int>(cfg.get_int_or("n0", sys.n0));
  sys.b = static_cast<int>(cfg.get_int_or("b", sys.b));
  sys.j = static_cast<int>(cfg.get_int_or("j", sys.j));
  sys.sigma2 = cfg.get_double_or("sigma2", sys.sigma2);
  sys.eb_n0_db = cfg.get_double_or("eb_n0_db", sys.eb_n0_db);
  sys.delta = static_cast<int>(cfg.get_int_or("delta", sys.delta));
  sys.d_max = cfg.get_double_or("d_max", sys.d_max);
  sys.epsilon = cfg.get_double_or("epsilon", sys.epsilon);
  sys.seed = static_cast<std::uint64_t>(cfg.get_int_or(
      "seed", static_cast<long long>(sys.seed)));

  if (sys.k_tot <= 0) throw ConfigError("k_tot must be positive");
  if (sys.k_a < 0 || sys.k_a > sys.k_tot)
    throw ConfigError("k_a must be in [0, k_tot]");
  if (sys.m <= 0) throw ConfigError("m must be positive");
  if (sys.l <= 0) throw ConfigError("l must be positive");
  if (sys.n0 <= 0) throw ConfigError("n0 must be positive");
  if (sys.j <= 0 || sys.j > 26) throw ConfigError("j must be in [1, 26]");
  if (sys.b <= 0 || sys.b > sys.l * sys.j)
    throw ConfigError("b must be in [1, l*j]");
  if (sys.sigma2 <= 0.0) throw ConfigError("sigma2 must be positive");
  if (sys.delta < 0) throw ConfigError("delta must be nonnegative");
  if (sys.d_max <= 0.0) throw ConfigError("d_max must be positive");
  if (sys.epsilon < 0.0 || sys.epsilon > 1.0)
    throw ConfigError("epsilon must be in [0, 1]");
  if (sys.list_size() > sys.num_codewords())
    throw ConfigError("support list size exceeds codebook size");
  return sys;
}

}  // namespace ura
