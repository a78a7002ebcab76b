#include <benchmark/benchmark.h>

#include <vector>

#include "echoforge/pipeline.h"
#include "echoforge/raec.h"
#include "echoforge/random.h"
#include "echoforge/stft.h"
#include "echoforge/suppressor.h"
#include "echoforge/synth.h"

namespace {

using namespace echoforge;

constexpr int kFs = 16000;

std::vector<double> Echo(const std::vector<double>& x) {
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t n = 0; n < x.size(); ++n) {
    for (std::size_t k = 0; k < 64 && k <= n; ++k) y[n] += 0.9 * x[n - k] / static_cast<double>(k + 1);
  }
  return y;
}

void BM_RaecBlock(benchmark::State& state) {
  RaecParams p;
  p.num_partitions = static_cast<std::size_t>(state.range(0));
  Raec aec(p, kFs);
  Rng rng(1);
  const auto x = synth::WhiteNoise(kFs, rng, 0.1);
  const auto y = Echo(x);
  const std::size_t n = p.frame_size;
  std::vector<double> e(n), d(n);
  std::size_t pos = 0;
  for (auto _ : state) {
    if (pos + n > x.size()) pos = 0;
    aec.Process(std::span(x).subspan(pos, n), std::span(y).subspan(pos, n), e, d);
    benchmark::DoNotOptimize(e.data());
    pos += n;
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_RaecBlock)->Arg(1)->Arg(4);

void BM_StftRoundTrip(benchmark::State& state) {
  Rng rng(2);
  const AudioBuffer x(synth::WhiteNoise(kFs, rng, 0.1), kFs);
  const StftConfig cfg;
  for (auto _ : state) {
    const auto frames = Analyze(x, cfg);
    benchmark::DoNotOptimize(Synthesize(frames, cfg, x.size(), kFs));
  }
  state.SetItemsProcessed(state.iterations() * kFs);
}
BENCHMARK(BM_StftRoundTrip);

void BM_LsaGain(benchmark::State& state) {
  Rng rng(3);
  std::vector<double> xi(1024), gamma(1024);
  for (auto& v : xi) v = rng.Uniform(0.01, 100.0);
  for (auto& v : gamma) v = rng.Uniform(0.01, 100.0);
  for (auto _ : state) {
    double acc = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i) acc += LsaGain(xi[i], gamma[i]);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_LsaGain);

// One second of audio through the whole chain.
void BM_PipelineSecond(benchmark::State& state) {
  Rng rng(4);
  const auto x = synth::MusicLike(kFs, kFs, rng, 0.1);
  auto y = Echo(x);
  const auto s = synth::SpeechLike(kFs, kFs, rng, 0.05);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += s[i];
  const AudioBuffer mic(y, kFs), ref(x, kFs);
  const ParamVector params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ProcessStream(mic, ref, params).enhanced.samples.data());
  }
  state.SetItemsProcessed(state.iterations() * kFs);
}
BENCHMARK(BM_PipelineSecond)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
