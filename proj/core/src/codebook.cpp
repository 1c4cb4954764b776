#include "ura/codebook.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "ura/errors.hpp"

namespace ura {
namespace {

constexpr char kMagic[8] = {'U', 'R', 'A', 'C', 'B', 'K', '0', '1'};

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw ConfigError("codebook file: truncated");
  return v;
}

}  // namespace

int Codebook::index_of(const std::vector<int>& bits) const {
  if (static_cast<int>(bits.size()) != j)
    throw ConfigError("index_of: expected exactly J bits");
  int r0 = 0;
  for (const int b : bits) {
    if (b != 0 && b != 1) throw ConfigError("index_of: bits must be 0 or 1");
    r0 = (r0 << 1) | b;
  }
  return r0 + 1;
}

std::vector<int> Codebook::bits_of(int r) const {
  if (r < 1 || r > num_codewords())
    throw ConfigError("bits_of: index out of range");
  const int r0 = r - 1;
  std::vector<int> bits(j);
  for (int i = 0; i < j; ++i) bits[i] = (r0 >> (j - 1 - i)) & 1;
  return bits;
}

Codebook generate_codebook(int n0, int j, double p, Rng& rng,
                           std::uint64_t seed_label) {
  if (n0 < 1) throw ConfigError("generate_codebook: n0 must be >= 1");
  if (j < 1) throw ConfigError("generate_codebook: J must be >= 1");
  if (j > 26) throw ConfigError("generate_codebook: J > 26 would overflow");
  if (p <= 0.0) throw ConfigError("generate_codebook: P must be positive");

  Codebook cb;
  cb.n0 = n0;
  cb.j = j;
  cb.p = p;
  cb.seed = seed_label;
  const int cols = 1 << j;
  cb.c.resize(n0, cols);
  const double target = std::sqrt(static_cast<double>(n0) * p);
  for (int r = 0; r < cols; ++r) {
    for (int t = 0; t < n0; ++t) cb.c(t, r) = rng.cnormal();
    cb.c.col(r) *= target / cb.c.col(r).norm();
  }
  return cb;
}

Codebook generate_codebook(int n0, int j, double p, std::uint64_t seed) {
  Rng rng{seed};
  return generate_codebook(n0, j, p, rng, seed);
}

void save_codebook(const Codebook& cb, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out.write(kMagic, sizeof kMagic);
  write_pod(out, static_cast<std::uint32_t>(cb.n0));
  write_pod(out, static_cast<std::uint32_t>(cb.j));
  write_pod(out, cb.p);
  write_pod(out, cb.seed);
  for (int t = 0; t < cb.n0; ++t) {
    for (int r = 0; r < cb.c.cols(); ++r) {
      write_pod(out, static_cast<float>(cb.c(t, r).real()));
      write_pod(out, static_cast<float>(cb.c(t, r).imag()));
    }
  }
  if (!out) throw ConfigError("write failed: " + path);
}

Codebook load_codebook(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open codebook file: " + path);
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw ConfigError("not a codebook file: " + path);
  Codebook cb;
  cb.n0 = static_cast<int>(read_pod<std::uint32_t>(in));
  cb.j = static_cast<int>(read_pod<std::uint32_t>(in));
  cb.p = read_pod<double>(in);
  cb.seed = read_pod<std::uint64_t>(in);
  if (cb.n0 < 1 || cb.j < 1 || cb.j > 26)
    throw ConfigError("codebook file: bad header: " + path);
  cb.c.resize(cb.n0, 1 << cb.j);
  for (int t = 0; t < cb.n0; ++t) {
    for (int r = 0; r < cb.c.cols(); ++r) {
      const float re = read_pod<float>(in);
      const float im = read_pod<float>(in);
      cb.c(t, r) = std::complex<double>(re, im);
    }
  }
  return cb;
}

}  // namespace ura
