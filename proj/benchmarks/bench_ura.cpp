// Microbenchmarks for the hot paths: the coordinate step and its rank-1
// state update, the detector objective and gradient, one full detect() call,
// the Fisher matrix build and the tree-code stitching decoder.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "ura/codebook.hpp"
#include "ura/fisher.hpp"
#include "ura/inner_detector.hpp"
#include "ura/outer_code.hpp"
#include "ura/rng.hpp"

namespace {

Eigen::MatrixXcd crandn(ura::Rng& rng, int rows, int cols) {
  Eigen::MatrixXcd a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = rng.cnormal();
  return a;
}

struct DetectorFixture {
  ura::Codebook cb;
  Eigen::MatrixXcd y;
  ura::EffectiveChannelModel model;
  Eigen::VectorXd gamma;
  double sigma2 = 1.0;

  DetectorFixture(int n0, int j, int m, std::uint64_t seed) {
    ura::Rng rng{seed};
    cb = ura::generate_codebook(n0, j, 1.0, rng, seed);
    const int ncw = cb.num_codewords();
    y = crandn(rng, n0, m);
    model.g_tilde = 0.5 * crandn(rng, ncw, m);
    model.r_diag = Eigen::VectorXd::Constant(ncw, 0.5);
    gamma = Eigen::VectorXd::Zero(ncw);
    for (int r = 0; r < ncw; r += 3) gamma(r) = 0.4;
  }
};

void BM_CoordinateUpdate(benchmark::State& state) {
  double n1 = 1.7, n2 = 2.3, n3 = 0.2, gamma_r = 0.5;
  for (auto _ : state) {
    const ura::CoordinateStep step = ura::coordinate_update(n1, n2, n3, gamma_r);
    benchmark::DoNotOptimize(step.d);
  }
}
BENCHMARK(BM_CoordinateUpdate);

void BM_ApplyUpdate(benchmark::State& state) {
  const int n0 = static_cast<int>(state.range(0));
  DetectorFixture fx(n0, 6, 16, 11);
  ura::DetectorState st(fx.cb.c, fx.y, fx.sigma2);
  ura::Rng rng{12};
  for (auto _ : state) {
    const int r = static_cast<int>(rng.uniform_below(64));
    st.apply_update(r, 0.1);
    st.apply_update(r, -0.1);
  }
  state.SetItemsProcessed(state.iterations() * 2);
}
BENCHMARK(BM_ApplyUpdate)->Arg(32)->Arg(100);

void BM_DetectorObjective(benchmark::State& state) {
  DetectorFixture fx(32, 6, 64, 13);
  for (auto _ : state) {
    const double v = ura::detector_objective(fx.cb.c, fx.y, fx.model,
                                             fx.sigma2, fx.gamma);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_DetectorObjective);

void BM_GradQ(benchmark::State& state) {
  DetectorFixture fx(32, 6, 64, 14);
  for (auto _ : state) {
    const Eigen::VectorXd g = ura::detector_grad_q(fx.cb.c, fx.y, fx.model,
                                                   fx.sigma2, fx.gamma);
    benchmark::DoNotOptimize(g.sum());
  }
}
BENCHMARK(BM_GradQ);

void BM_Detect(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  DetectorFixture fx(16, 4, m, 15);
  ura::DetectorOptions opts;
  std::uint64_t t = 0;
  for (auto _ : state) {
    ura::Rng rng{16, t++};
    const ura::DetectorResult res =
        ura::detect(fx.y, fx.cb, fx.model, fx.sigma2, opts, rng);
    benchmark::DoNotOptimize(res.gamma.sum());
  }
}
BENCHMARK(BM_Detect)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_FisherMatrix(benchmark::State& state) {
  DetectorFixture fx(32, 6, 128, 17);
  for (auto _ : state) {
    const Eigen::MatrixXd f =
        ura::fisher_matrix(fx.gamma, fx.cb, fx.model, fx.sigma2, 128);
    benchmark::DoNotOptimize(f.sum());
  }
}
BENCHMARK(BM_FisherMatrix)->Unit(benchmark::kMillisecond);

void BM_OuterDecode(benchmark::State& state) {
  const ura::AllocationProfile alloc = ura::make_allocation(4, 4, {1, 1, 1});
  ura::Rng rng{18};
  const ura::ParityGeneratorSet gens = ura::draw_parity_generators(alloc, rng);
  // Five entries per list: three encoded messages plus two random decoys.
  std::vector<std::vector<std::uint32_t>> lists(4);
  for (int k = 0; k < 3; ++k) {
    std::vector<int> bits(alloc.b());
    for (int& bit : bits) bit = static_cast<int>(rng.uniform_below(2));
    const std::vector<std::uint32_t> cw = ura::outer_encode(bits, alloc, gens);
    for (int l = 0; l < 4; ++l) lists[l].push_back(cw[l]);
  }
  for (int l = 0; l < 4; ++l)
    for (int d = 0; d < 2; ++d)
      lists[l].push_back(static_cast<std::uint32_t>(rng.uniform_below(16)));
  for (auto _ : state) {
    const ura::DecodeResult res = ura::outer_decode(lists, alloc, gens);
    benchmark::DoNotOptimize(res.checked_nodes);
  }
}
BENCHMARK(BM_OuterDecode);

}  // namespace

BENCHMARK_MAIN();
