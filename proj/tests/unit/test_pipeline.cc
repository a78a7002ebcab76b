#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "echoforge/errors.h"
#include "echoforge/metrics.h"
#include "echoforge/pipeline.h"
#include "scenarios.h"

using namespace echoforge;
using namespace echoforge::testing;

namespace {

EchoScene Scene(double seconds, std::uint64_t seed) {
  EchoSceneSpec spec;
  spec.seconds = seconds;
  spec.music_far_end = true;
  spec.noise_db = -30.0;
  spec.bursts = {{seconds / 2.0, seconds}};
  spec.seed = seed;
  return MakeEchoScene(spec);
}

}  // namespace

TEST_CASE("neutralized pipeline returns the microphone signal") {
  const auto scene = Scene(3.0, 1);
  PipelineOptions opt;
  opt.force_unity_mask = true;
  opt.freeze_aec = true;
  const auto r = ProcessStream(AudioBuffer(scene.mic, kFs), AudioBuffer(scene.far, kFs), {}, opt);
  REQUIRE(r.enhanced.size() == scene.mic.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < scene.mic.size(); ++i) {
    worst = std::max(worst, std::abs(r.enhanced.samples[i] - scene.mic[i]));
  }
  CHECK(worst <= 1e-6);
  CHECK(r.aec_error.samples == scene.mic);
}

TEST_CASE("output depends on at most a frame of future input") {
  const auto scene = Scene(3.0, 2);
  const PipelineOptions opt;
  const std::size_t lookahead = PipelineLookaheadSamples(opt);
  CHECK(lookahead == opt.stft.frame_len - 1);
  const auto base = ProcessStream(AudioBuffer(scene.mic, kFs), AudioBuffer(scene.far, kFs), {});
  for (std::size_t n0 : {20000u, 30000u, 30111u}) {
    auto mic = scene.mic;
    for (std::size_t i = n0; i < mic.size(); ++i) mic[i] += 0.05;
    const auto r = ProcessStream(AudioBuffer(mic, kFs), AudioBuffer(scene.far, kFs), {});
    for (std::size_t i = 0; i + lookahead < n0; ++i) {
      REQUIRE(r.enhanced.samples[i] == base.enhanced.samples[i]);
    }
    // And the perturbation is visible within the lookahead span.
    bool changed = false;
    for (std::size_t i = n0 - lookahead; i <= n0; ++i) {
      changed = changed || r.enhanced.samples[i] != base.enhanced.samples[i];
    }
    CHECK(changed);
  }
}

TEST_CASE("processing is deterministic and removes echo") {
  const auto scene = Scene(4.0, 3);
  const AudioBuffer mic(scene.mic, kFs), ref(scene.far, kFs);
  const auto a = ProcessStream(mic, ref, {});
  const auto b = ProcessStream(mic, ref, {});
  CHECK(a.enhanced.samples == b.enhanced.samples);
  CHECK(a.vad_frames == b.vad_frames);
  // Echo-only first half: the chain should remove most of it.
  const double erle = ErleOverDb(scene.mic, a.enhanced.samples, 1.0, 2.0);
  MESSAGE("echo-only erle ", erle, " dB");
  CHECK(erle > 15.0);
}

TEST_CASE("diagnostics have one record per frame") {
  const auto scene = Scene(1.0, 4);
  PipelineOptions opt;
  opt.diagnostics = true;
  const auto r = ProcessStream(AudioBuffer(scene.mic, kFs), AudioBuffer(scene.far, kFs), {}, opt);
  const auto& d = r.diagnostics;
  const std::size_t frames = d.num_frames, bins = d.num_bins;
  CHECK(bins == 257);
  CHECK(d.xi.size() == frames * bins);
  CHECK(d.zeta.size() == frames * bins);
  CHECK(d.p_dt.size() == frames);
  CHECK(r.vad_frames.size() == frames);
  for (double p : d.p_dt) REQUIRE((p >= 0.0 && p <= 1.0));
  TempDir dir("diag");
  const auto path = dir.path() / "d.bin";
  WriteDiagnostics(path, d);
  CHECK(std::filesystem::file_size(path) == frames * bins * 3 * 4);
}

TEST_CASE("bad input is rejected") {
  const AudioBuffer a(std::vector<double>(1000, 0.0), 16000);
  const AudioBuffer b(std::vector<double>(1000, 0.0), 8000);
  CHECK_THROWS_AS(ProcessStream(a, b, {}), InputError);
  auto nan = a;
  nan.samples[10] = NAN;
  CHECK_THROWS_AS(ProcessStream(nan, a, {}), InputError);
  ParamVector p;
  p.suppressor.theta1 = 10.0;
  CHECK_THROWS_AS(ProcessStream(a, a, p), ConfigError);
  // Shorter reference is zero padded.
  const AudioBuffer shorter(std::vector<double>(500, 0.0), 16000);
  CHECK(ProcessStream(a, shorter, {}).enhanced.size() == 1000);
}
