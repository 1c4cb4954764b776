#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ura {

// System-level parameters shared by every module.
struct SystemConfig {
  int k_tot = 100;        // population size
  int k_a = 10;           // active UEs per round
  int m = 64;             // BS antennas
  int l = 4;              // sub-slots
  int n0 = 16;            // channel uses per sub-slot
  int b = 6;              // message bits
  int j = 6;              // bits per sub-block, 2^j codewords
  double sigma2 = 1.0;    // noise variance per complex dimension
  double eb_n0_db = 0.0;  // per-bit SNR driving the symbol power
  int delta = 2;          // support selection slack
  double d_max = 100.0;   // cell radius in meters
  double epsilon = 0.1;   // activity prior, K_a_est = epsilon * k_tot
  std::uint64_t seed = 1;

  int n() const { return l * n0; }
  int num_codewords() const { return 1 << j; }
  // Estimated active count and support list size K = eps * K_tot + delta.
  int k_a_est() const { return static_cast<int>(epsilon * k_tot); }
  int list_size() const { return k_a_est() + delta; }
  // Symbol power P = 2 b sigma^2 10^(EbN0/10) / n.
  double power() const;
};

// Flat key = value configuration file with '#' comments. Later keys win,
// which is also how command line overrides are applied.
class ConfigMap {
 public:
  ConfigMap() = default;

  static ConfigMap parse_file(const std::string& path);
  static ConfigMap parse_stream(std::istream& in);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  // Typed getters throw ConfigError on malformed values; the _or variants
  // fall back to a default when the key is absent.
  std::string get_str(const std::string& key) const;
  std::string get_str_or(const std::string& key, const std::string& dflt) const;
  long long get_int(const std::string& key) const;
  long long get_int_or(const std::string& key, long long dflt) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double dflt) const;
  std::vector<int> get_int_list(const std::string& key) const;
  std::vector<std::string> get_str_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return map_; }

  // FNV-1a hash of the sorted "key=value" canonical form, as a hex string.
  // Used by run manifests to detect config drift between runs.
  std::string hash() const;

 private:
  std::map<std::string, std::string> map_;
};

// Extracts the SystemConfig fields from a ConfigMap, validating ranges.
SystemConfig system_config_from(const ConfigMap& cfg);

}  // namespace ura
