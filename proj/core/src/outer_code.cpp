#include "ura/outer_code.hpp"

#include <cmath>

#include "ura/errors.hpp"

namespace ura {
namespace {

// Packs bits[off..off+len) MSB first.
std::uint32_t pack_bits(const std::vector<int>& bits, int off, int len) {
  std::uint32_t v = 0;
  for (int t = 0; t < len; ++t) {
    const int bit = bits[off + t];
    if (bit != 0 && bit != 1)
      throw ConfigError("outer_encode: message bits must be 0 or 1");
    v = (v << 1) | static_cast<std::uint32_t>(bit);
  }
  return v;
}

// Parity segment of slot lt (0-based, >= 1) for the given data sections of
// slots 0..lt-1: XOR of the generator rows selected by set data bits.
std::uint32_t parity_of(const std::vector<std::uint32_t>& data,
                        const AllocationProfile& alloc,
                        const ParityGeneratorSet& gens, int lt) {
  std::uint32_t par = 0;
  for (int i = 0; i < lt; ++i) {
    const int bi = alloc.b_l[i];
    if (bi == 0 || alloc.a_l[lt] == 0) continue;
    const auto& rows = gens.g[lt][i];
    for (int t = 0; t < bi; ++t) {
      if ((data[i] >> (bi - 1 - t)) & 1u) par ^= rows[t];
    }
  }
  return par;
}

}  // namespace

AllocationProfile make_allocation(int l, int j, const std::vector<int>& a_tail) {
  if (l < 2) throw ConfigError("make_allocation: L must be >= 2");
  if (j < 1 || j > 26) throw ConfigError("make_allocation: J must be in [1, 26]");
  if (static_cast<int>(a_tail.size()) != l - 1)
    throw ConfigError("make_allocation: need exactly L-1 parity lengths");
  AllocationProfile alloc;
  alloc.l = l;
  alloc.j = j;
  alloc.a_l.assign(1, 0);
  alloc.a_l.insert(alloc.a_l.end(), a_tail.begin(), a_tail.end());
  alloc.b_l.resize(l);
  for (int i = 0; i < l; ++i) {
    if (alloc.a_l[i] < 0 || alloc.a_l[i] > j)
      throw ConfigError("make_allocation: a_l out of [0, J]");
    alloc.b_l[i] = j - alloc.a_l[i];
  }
  return alloc;
}

ParityGeneratorSet draw_parity_generators(const AllocationProfile& alloc,
                                          Rng& rng) {
  ParityGeneratorSet gens;
  gens.g.resize(alloc.l);
  for (int lt = 1; lt < alloc.l; ++lt) {
    gens.g[lt].resize(lt);
    const int al = alloc.a_l[lt];
    for (int i = 0; i < lt; ++i) {
      auto& rows = gens.g[lt][i];
      rows.assign(alloc.b_l[i], 0);
      for (int t = 0; t < alloc.b_l[i]; ++t) {
        std::uint32_t mask = 0;
        for (int c = 0; c < al; ++c) {
          mask |= static_cast<std::uint32_t>(rng.uniform_below(2))
                  << (al - 1 - c);
        }
        rows[t] = mask;
      }
    }
  }
  return gens;
}

std::vector<std::uint32_t> outer_encode(const std::vector<int>& message_bits,
                                        const AllocationProfile& alloc,
                                        const ParityGeneratorSet& gens) {
  if (static_cast<int>(message_bits.size()) != alloc.b())
    throw ConfigError("outer_encode: message length must equal b");
  std::vector<std::uint32_t> data(alloc.l);
  int off = 0;
  for (int l = 0; l < alloc.l; ++l) {
    data[l] = pack_bits(message_bits, off, alloc.b_l[l]);
    off += alloc.b_l[l];
  }
  std::vector<std::uint32_t> subs(alloc.l);
  for (int l = 0; l < alloc.l; ++l) {
    const std::uint32_t par = l == 0 ? 0 : parity_of(data, alloc, gens, l);
    subs[l] = (data[l] << alloc.a_l[l]) | par;
  }
  return subs;
}

bool check_parity(const std::vector<std::uint32_t>& prefix,
                  const AllocationProfile& alloc,
                  const ParityGeneratorSet& gens) {
  const int l = static_cast<int>(prefix.size());
  if (l < 2) throw ConfigError("check_parity: prefix length must be >= 2");
  if (l > alloc.l) throw ConfigError("check_parity: prefix longer than L");
  std::vector<std::uint32_t> data(l - 1);
  for (int i = 0; i < l - 1; ++i) data[i] = prefix[i] >> alloc.a_l[i];
  const std::uint32_t expected = parity_of(data, alloc, gens, l - 1);
  const std::uint32_t mask = (1u << alloc.a_l[l - 1]) - 1u;
  return (prefix[l - 1] & mask) == expected;
}

DecodeResult outer_decode(const std::vector<std::vector<std::uint32_t>>& lists,
                          const AllocationProfile& alloc,
                          const ParityGeneratorSet& gens) {
  if (static_cast<int>(lists.size()) != alloc.l)
    throw ConfigError("outer_decode: need one list per sub-slot");
  DecodeResult res;

  std::vector<std::uint32_t> data(alloc.l);  // data sections along the path
  std::vector<std::uint32_t> path(alloc.l);
  for (const std::uint32_t root : lists[0]) {
    RootStat stat;
    stat.root = root;
    std::vector<std::uint32_t> winner;
    path[0] = root;
    data[0] = root >> alloc.a_l[0];

    // Depth-first: extend the prefix ending at slot `depth` by every entry
    // of the next list that passes its parity check.
    auto dfs = [&](auto&& self, int depth) -> void {
      if (depth == alloc.l - 1) {
        ++stat.survivors;
        if (stat.survivors == 1) winner = path;
        return;
      }
      const int lt = depth + 1;
      const std::uint32_t expected = parity_of(data, alloc, gens, lt);
      const std::uint32_t mask = (1u << alloc.a_l[lt]) - 1u;
      for (const std::uint32_t cand : lists[lt]) {
        ++stat.checks;
        if ((cand & mask) != expected) continue;
        path[lt] = cand;
        data[lt] = cand >> alloc.a_l[lt];
        self(self, lt);
      }
    };
    dfs(dfs, 0);

    res.checked_nodes += stat.checks;
    if (stat.survivors == 1) {
      std::vector<int> msg;
      msg.reserve(alloc.b());
      for (int l = 0; l < alloc.l; ++l) {
        const std::uint32_t d = winner[l] >> alloc.a_l[l];
        for (int t = alloc.b_l[l] - 1; t >= 0; --t)
          msg.push_back(static_cast<int>((d >> t) & 1u));
      }
      res.messages.push_back(std::move(msg));
    }
    res.root_stats.push_back(stat);
  }
  return res;
}

double decoding_complexity(int k, int l, const std::vector<int>& a_tail) {
  if (k < 1 || l < 2) throw ConfigError("decoding_complexity: need K >= 1, L >= 2");
  if (static_cast<int>(a_tail.size()) != l - 1)
    throw ConfigError("decoding_complexity: need a_2..a_L");
  const double kd = k;
  double xi = kd * (l - 1);
  for (int j = 2; j <= l - 1; ++j) {
    for (int m = 2; m <= j; ++m) {
      double term = std::pow(kd, j - m) * (kd - 1.0);
      for (int ll = m; ll <= j; ++ll)
        term *= std::pow(2.0, -a_tail[ll - 2]);
      xi += kd * term;
    }
  }
  return xi;
}

double expected_survivors(int k, int l, const std::vector<double>& tau_tail) {
  if (k < 1 || l < 2) throw ConfigError("expected_survivors: need K >= 1, L >= 2");
  if (static_cast<int>(tau_tail.size()) != l - 1)
    throw ConfigError("expected_survivors: need tau_2..tau_L");
  const double kd = k;
  double e = 0.0;
  for (int m = 2; m <= l; ++m) {
    double term = std::pow(kd, l - m) * (kd - 1.0);
    for (int ll = m; ll <= l; ++ll) term *= tau_tail[ll - 2];
    e += term;
  }
  return e;
}

}  // namespace ura
