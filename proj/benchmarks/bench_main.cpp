#include <benchmark/benchmark.h>

#include <vector>

#include "nfres/cavity.hpp"
#include "nfres/constants.hpp"
#include "nfres/fibermode.hpp"
#include "nfres/scanforge.hpp"
#include "nfres/specfit.hpp"

namespace {

using namespace nfres;

cavity::CavityConfig reference_cavity() {
  cavity::CavityConfig c;
  c.mirror_1 = cavity::FbgMirror::gaussian_mirror(851.8944e-9, 0.962, 0.1e-9);
  c.mirror_2 = c.mirror_1;
  c.single_pass_transmission = 0.934;
  c.free_spectral_range = 1.05e9;
  return c;
}

void BM_SolveHe11(benchmark::State& state) {
  fibermode::FiberGeometry geom;
  geom.radius = 250e-9;
  for (auto _ : state) {
    auto mode = fibermode::solve_he11(geom, 852e-9);
    benchmark::DoNotOptimize(mode);
  }
}
BENCHMARK(BM_SolveHe11);

void BM_CompositeSpectrum(benchmark::State& state) {
  const auto cfg = reference_cavity();
  const double nu_c = constants::speed_of_light / 851.8944e-9;
  std::vector<double> grid(state.range(0));
  for (size_t i = 0; i < grid.size(); ++i) {
    grid[i] = nu_c - 2e9 + 4e9 * i / (grid.size() - 1);
  }
  for (auto _ : state) {
    auto scan = cavity::composite_spectrum(cfg, grid);
    benchmark::DoNotOptimize(scan);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CompositeSpectrum)->Range(256, 16384)->Complexity();

void BM_GenerateScan(benchmark::State& state) {
  const auto cfg = reference_cavity();
  const double nu_c = constants::speed_of_light / 851.8944e-9;
  scanforge::NoiseModel noise;
  noise.detector_sigma = 0.01;
  noise.seed = 1;
  scanforge::BirefringenceModel none;
  for (auto _ : state) {
    auto scan = scanforge::generate_scan(cfg, nu_c - 1.1e9, nu_c + 1.1e9,
                                         static_cast<int>(state.range(0)), noise, none);
    benchmark::DoNotOptimize(scan);
  }
}
BENCHMARK(BM_GenerateScan)->Range(256, 4096);

void BM_FitAiry(benchmark::State& state) {
  const auto cfg = reference_cavity();
  const double nu_c = constants::speed_of_light / 851.8944e-9;
  scanforge::NoiseModel noise;
  noise.detector_sigma = 0.01;
  noise.seed = 2;
  scanforge::BirefringenceModel none;
  const auto scan = scanforge::generate_scan(cfg, nu_c - 1.1e9, nu_c + 1.1e9, 600, noise, none);
  const auto seed = specfit::make_seed(scan);
  for (auto _ : state) {
    auto fit = specfit::fit_airy(scan, seed);
    benchmark::DoNotOptimize(fit);
  }
}
BENCHMARK(BM_FitAiry);

}  // namespace

BENCHMARK_MAIN();
