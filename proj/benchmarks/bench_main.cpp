#include <benchmark/benchmark.h>

#include "tlsdd/analysis.hpp"
#include "tlsdd/dynamics.hpp"
#include "tlsdd/linalg.hpp"
#include "tlsdd/noise.hpp"
#include "tlsdd/protocols.hpp"

using namespace tlsdd;

namespace {

const DeviceParams kDev = DeviceParams::defaults();

void BM_ExpmBlock(benchmark::State& state) {
  const Matrix4c h = rotating_hamiltonian(-72.0, kDev);
  double t = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(expm_hermitian(h, t));
    t += 1e-9;
  }
}
BENCHMARK(BM_ExpmBlock);

void BM_ExpmDense(benchmark::State& state) {
  const Matrix4c h = full_hamiltonian(-4.0, kDev);
  for (auto _ : state) benchmark::DoNotOptimize(expm_hermitian(h, 0.003));
}
BENCHMARK(BM_ExpmDense);

// Echo sequence with 1.5 ns Gaussian edges; range(0) is dt in ps.
void BM_PropagateEcho(benchmark::State& state) {
  SequenceSettings s;
  std::vector<double> iv{100.0, 100.0};
  auto seq = build_sequence(-72.0, iv, s.refocus_duration(), kDev, s);
  EvolutionOptions o;
  o.dt = static_cast<double>(state.range(0)) * 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(propagate_piecewise(DensityMatrix4::basis(k0g), seq, kDev, o));
}
BENCHMARK(BM_PropagateEcho)->Arg(10)->Arg(50)->Unit(benchmark::kMicrosecond);

void BM_LindbladHold(benchmark::State& state) {
  PulseSequence seq({PulseSegment::hold(0.0, 200.0), PulseSegment::readout()});
  auto rec = time_grid(0.0, 200.0, 1.0);
  EvolutionOptions o;
  auto ch = RelaxationChannels::from(kDev, {});
  for (auto _ : state) benchmark::DoNotOptimize(evolve_lindblad(DensityMatrix4::basis(k1g), seq, kDev, ch, o, rec));
}
BENCHMARK(BM_LindbladHold)->Unit(benchmark::kMicrosecond);

void BM_SynthesizeTrajectory(benchmark::State& state) {
  OneOverFSpectrum spec;
  const double duration = static_cast<double>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(synthesize_trajectory(spec, duration, 0.5, seed++));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(duration / 0.5));
}
BENCHMARK(BM_SynthesizeTrajectory)->Arg(1024)->Arg(8192)->Unit(benchmark::kMicrosecond);

void BM_FilterCoefficient(benchmark::State& state) {
  OneOverFSpectrum spec;
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(filter_coefficient(n, 300.0, spec));
}
BENCHMARK(BM_FilterCoefficient)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);

// One CP point averaged over range(0) synthesized-noise trajectories on one thread.
void BM_CpPoint(benchmark::State& state) {
  SimulationContext ctx;
  ctx.evolution.mode = EvolutionMode::MonteCarlo;
  ctx.evolution.sampling = NoiseSampling::Synthesized;
  ctx.evolution.n_traj = static_cast<int>(state.range(0));
  ctx.evolution.dt = 0.05;
  ctx.evolution.threads = 1;
  std::vector<double> t{300.0};
  for (auto _ : state) benchmark::DoNotOptimize(cp_sequence(-84.0, 2, t, ctx));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CpPoint)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_FitDecay(benchmark::State& state) {
  std::vector<double> t, h;
  for (int i = 0; i < 40; ++i) {
    t.push_back(10.0 * i);
    h.push_back(std::exp(-t.back() / 800.0) * std::exp(-std::pow(t.back() / 120.0, 2)));
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_decay(t, h));
}
BENCHMARK(BM_FitDecay)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
