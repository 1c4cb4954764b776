#pragma once

#include <cstdint>
#include <vector>

#include "ura/rng.hpp"

namespace ura {

// Per-slot bit budget of the tree code. Sub-block l carries b_l message bits
// followed by a_l parity bits with b_l + a_l = J; the first slot carries no
// parity (a_1 = 0). Message bits are assigned to slots greedily front to
// back, so slot l holds message bits [sum(b_1..b_{l-1}), sum(b_1..b_l)).
struct AllocationProfile {
  int l = 0;
  int j = 0;
  std::vector<int> b_l;  // length l
  std::vector<int> a_l;  // length l, a_l[0] == 0

  int b() const {
    int s = 0;
    for (const int v : b_l) s += v;
    return s;
  }
};

// Builds the profile from the parity tail (a_2..a_L); b_l = J - a_l.
AllocationProfile make_allocation(int l, int j, const std::vector<int>& a_tail);

// Parity generator matrices over GF(2). g[lt][i] holds G_{i+1,lt} of the
// paper (source slot i feeding target slot lt >= 1) as b_l[i] row masks of
// a_l[lt] bits each, packed MSB first so XOR-accumulating selected rows
// yields the parity segment directly in packed form.
struct ParityGeneratorSet {
  std::vector<std::vector<std::vector<std::uint32_t>>> g;
};

// Draws every generator entry Bernoulli(1/2). The set is common to encoder
// and decoder; fix the rng seed to share it across a run.
ParityGeneratorSet draw_parity_generators(const AllocationProfile& alloc,
                                          Rng& rng);

// Encodes b message bits (MSB first) into L sub-block codeword indices.
// Index layout per slot: (data << a_l) | parity, both segments MSB first,
// matching the decimal(m|p) convention of the inner code.
std::vector<std::uint32_t> outer_encode(const std::vector<int>& message_bits,
                                        const AllocationProfile& alloc,
                                        const ParityGeneratorSet& gens);

// True iff the parity segment of the last sub-block of the prefix equals the
// GF(2) combination of the preceding data segments. Prefix length >= 2.
bool check_parity(const std::vector<std::uint32_t>& prefix,
                  const AllocationProfile& alloc,
                  const ParityGeneratorSet& gens);

struct RootStat {
  std::uint32_t root = 0;
  int survivors = 0;       // chi_L for this root
  long long checks = 0;    // parity evaluations spent under this root
};

struct DecodeResult {
  std::vector<std::vector<int>> messages;  // recovered b-bit messages
  std::vector<RootStat> root_stats;        // one entry per list-1 root
  long long checked_nodes = 0;             // total parity evaluations
};

// Depth-first stitching decoder. Every entry of list 1 is a root; a prefix
// is extended by each entry of the next list (in list order) that passes
// check_parity. A root decodes iff exactly one full-length survival path
// exists; its message is the concatenated data segments. chi_L = 0 roots are
// misdetections, chi_L >= 2 roots are discarded as ambiguous.
DecodeResult outer_decode(const std::vector<std::vector<std::uint32_t>>& lists,
                          const AllocationProfile& alloc,
                          const ParityGeneratorSet& gens);

// Expected parity evaluations for decoding one root against lists of size K:
// Xi = K(L-1) + K * sum_{j=2}^{L-1} sum_{m=2}^{j} K^{j-m}(K-1) prod_{l=m}^{j} 2^{-a_l}.
double decoding_complexity(int k, int l, const std::vector<int>& a_tail);

// Expected false survival paths per root:
// E[chi_L] = sum_{m=2}^{L} K^{L-m}(K-1) prod_{l=m}^{L} tau_l.
double expected_survivors(int k, int l, const std::vector<double>& tau_tail);

}  // namespace ura
