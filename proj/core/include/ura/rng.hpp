#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <span>
#include <vector>

namespace ura {

// Deterministic pseudo-random generator: xoshiro256++ seeded through
// splitmix64. All derived draws (uniform, Gaussian via Box-Muller, bounded
// integers via the multiply-shift reduction) are written out explicitly so
// that a given seed reproduces the same stream on every platform and
// toolchain, which the run manifests and replay tests rely on.
// std::normal_distribution is implementation-defined and is avoided.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) { seed_from({&seed, 1}); }

  // Derives an independent stream from a tuple of identifiers, e.g.
  // {master_seed, trial_index, sub_slot}.
  Rng(std::initializer_list<std::uint64_t> ids) {
    seed_from({ids.begin(), ids.size()});
  }

  explicit Rng(std::span<const std::uint64_t> ids) { seed_from(ids); }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), n > 0. The multiply-shift reduction keeps the
  // mapping deterministic; its bias is O(n / 2^64).
  std::uint64_t uniform_below(std::uint64_t n) {
    const auto wide = static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::uint64_t>(wide >> 64);
  }

  // Standard normal via Box-Muller (cosine branch).
  double normal() {
    const double u = 1.0 - uniform();  // (0, 1], keeps log(u) finite
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) *
           std::cos(2.0 * std::numbers::pi * v);
  }

  // Circularly-symmetric complex normal CN(0, 1): both Box-Muller branches,
  // each scaled to variance 1/2.
  std::complex<double> cnormal() {
    const double u = 1.0 - uniform();
    const double v = uniform();
    const double r = std::sqrt(-std::log(u));
    const double phi = 2.0 * std::numbers::pi * v;
    return {r * std::cos(phi), r * std::sin(phi)};
  }

  // Uniform k-subset of {0, .., n-1} via partial Fisher-Yates, returned sorted.
  std::vector<int> sample_without_replacement(int n, int k) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < k; ++i) {
      const auto j = i + static_cast<int>(uniform_below(
                             static_cast<std::uint64_t>(n - i)));
      std::swap(idx[static_cast<std::size_t>(i)],
                idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(k));
    std::sort(idx.begin(), idx.end());
    return idx;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  void seed_from(std::span<const std::uint64_t> ids) {
    // Absorb the id words and their count so that {s} and {s, 0} differ.
    std::uint64_t x = 0x243f6a8885a308d3ULL ^
                      (0x9e3779b97f4a7c15ULL * (ids.size() + 1));
    for (const std::uint64_t w : ids) {
      x = mix64(x + 0x9e3779b97f4a7c15ULL + w);
    }
    bool all_zero = true;
    for (auto& word : s_) {
      x += 0x9e3779b97f4a7c15ULL;
      word = mix64(x);
      all_zero = all_zero && word == 0;
    }
    if (all_zero) s_[0] = 0x1ULL;
  }

  std::array<std::uint64_t, 4> s_{};
};

}  // namespace ura
