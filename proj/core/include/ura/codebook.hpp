#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ura/rng.hpp"

namespace ura {

// Common codebook shared by all UEs: an n0 x 2^J complex matrix whose columns
// are the candidate sub-slot codewords. Every column has squared norm exactly
// n0*P so any sequence of L codewords meets the slot power budget n*P with
// equality.
struct Codebook {
  int n0 = 0;
  int j = 0;
  double p = 0.0;          // per-symbol power budget
  std::uint64_t seed = 0;  // provenance only; recorded in save/load header
  Eigen::MatrixXcd c;      // n0 x 2^J

  int num_codewords() const { return 1 << j; }

  // Codeword index for a J-bit sub-block, MSB first. Returns the 1-based
  // index decimal(bits) + 1; column r-1 of c is the corresponding codeword.
  int index_of(const std::vector<int>& bits) const;

  // Inverse of index_of: J bits, MSB first, for a 1-based index r.
  std::vector<int> bits_of(int r) const;
};

// Draws i.i.d. CN(0,1) entries and rescales each column to squared norm
// n0*P. Deterministic under the rng state; seed_label is recorded in the
// returned struct (and in saved files) but does not influence the draw.
Codebook generate_codebook(int n0, int j, double p, Rng& rng,
                           std::uint64_t seed_label = 0);

// Convenience overload: seeds a fresh stream from `seed` and records it.
Codebook generate_codebook(int n0, int j, double p, std::uint64_t seed);

// Binary save/load for cross-run reproducibility. Layout: 8-byte magic,
// u32 n0, u32 J, f64 P, u64 seed, then row-major complex64 (float32
// re/im pairs). Loading therefore reproduces the matrix to float precision.
void save_codebook(const Codebook& cb, const std::string& path);
Codebook load_codebook(const std::string& path);

}  // namespace ura
