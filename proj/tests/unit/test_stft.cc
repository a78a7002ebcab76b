#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "echoforge/errors.h"
#include "echoforge/fft.h"
#include "echoforge/random.h"
#include "echoforge/stft.h"
#include "echoforge/synth.h"

using namespace echoforge;
using namespace echoforge::synth;

namespace {

double MaxAbsDiff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("real fft matches a direct dft") {
  Rng rng(3);
  const std::size_t n = 64;
  const auto x = WhiteNoise(n, rng);
  RealFft fft(n);
  std::vector<Complex> spec(fft.num_bins());
  fft.Forward(x, spec);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    std::complex<double> s{};
    for (std::size_t t = 0; t < n; ++t) {
      s += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * double(k * t) / double(n));
    }
    CHECK(std::abs(spec[k] - s) < 1e-10);
  }
  std::vector<double> back(n);
  fft.Inverse(spec, back);
  CHECK(MaxAbsDiff(back, x) < 1e-12);
}

TEST_CASE("round trip reconstructs the buffer") {
  Rng rng(11);
  for (std::size_t len : {1u, 255u, 256u, 257u, 512u, 16000u, 40001u}) {
    const auto x = WhiteNoise(len, rng);
    StftConfig cfg;
    const auto y = Synthesize(Analyze(AudioBuffer(x, 16000), cfg), cfg, len);
    REQUIRE(y.size() == len);
    CHECK(MaxAbsDiff(y.samples, x) <= 1e-6);
  }
}

TEST_CASE("round trip holds for every window pair and several hops") {
  Rng rng(12);
  const auto x = WhiteNoise(5000, rng);
  for (auto w : {Window::kSqrtHann, Window::kHann, Window::kRect}) {
    StftConfig cfg;
    cfg.window = w;
    cfg.frame_len = 256;
    cfg.hop = w == Window::kRect ? 256 : 128;
    cfg.Validate();
    const auto y = Synthesize(Analyze(AudioBuffer(x, 16000), cfg), cfg, x.size());
    CHECK(MaxAbsDiff(y.samples, x) <= 1e-6);
  }
}

TEST_CASE("frame energy equals windowed time-domain energy") {
  Rng rng(5);
  const auto x = WhiteNoise(2048, rng);
  StftConfig cfg;
  const auto frames = Analyze(AudioBuffer(x, 16000), cfg);
  const auto w = AnalysisWindow(cfg);
  for (std::size_t m = 0; m + 2 < frames.size(); ++m) {
    double direct = 0.0;
    for (std::size_t i = 0; i < cfg.frame_len; ++i) {
      const double v = w[i] * x[m * cfg.hop + i];
      direct += v * v;
    }
    CHECK(FrameEnergy(frames[m], cfg.frame_len) == doctest::Approx(direct).epsilon(1e-6));
  }
}

TEST_CASE("analysis is linear") {
  Rng rng(6);
  const auto x = WhiteNoise(3000, rng);
  const auto y = WhiteNoise(3000, rng);
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = 2.5 * x[i] - 0.75 * y[i];
  StftConfig cfg;
  const auto fx = Analyze(AudioBuffer(x, 16000), cfg);
  const auto fy = Analyze(AudioBuffer(y, 16000), cfg);
  const auto fz = Analyze(AudioBuffer(z, 16000), cfg);
  double worst = 0.0;
  for (std::size_t m = 0; m < fz.size(); ++m) {
    for (std::size_t k = 0; k < cfg.num_bins(); ++k) {
      worst = std::max(worst, std::abs(fz[m].bins[k] - (2.5 * fx[m].bins[k] - 0.75 * fy[m].bins[k])));
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("frame counting and defaults") {
  StftConfig cfg;
  CHECK(cfg.num_bins() == 257);
  CHECK(NumFrames(0, cfg) == 0);
  CHECK(NumFrames(1, cfg) == 1);
  CHECK(NumFrames(256, cfg) == 1);
  CHECK(NumFrames(257, cfg) == 2);
  const auto frames = Analyze(AudioBuffer(std::vector<double>(1000, 0.0), 16000), cfg);
  CHECK(frames.size() == 4);
  CHECK(frames[2].index == 2);
}

TEST_CASE("an impulse lands in the frames that cover it") {
  std::vector<double> x(2048, 0.0);
  x[700] = 1.0;
  StftConfig cfg;
  const auto frames = Analyze(AudioBuffer(x, 16000), cfg);
  for (const auto& f : frames) {
    const bool covers = f.index * cfg.hop <= 700 && 700 < f.index * cfg.hop + cfg.frame_len;
    CHECK((FrameEnergy(f, cfg.frame_len) > 0.0) == covers);
  }
}

TEST_CASE("scaling frames scales the output") {
  Rng rng(8);
  const auto x = WhiteNoise(4000, rng);
  StftConfig cfg;
  auto frames = Analyze(AudioBuffer(x, 16000), cfg);
  for (auto& f : frames) {
    for (auto& b : f.bins) b *= 3.0;
  }
  const auto y = Synthesize(frames, cfg, x.size());
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(y.samples[i] == doctest::Approx(3.0 * x[i]).epsilon(1e-9));
}

TEST_CASE("invalid configurations are rejected") {
  StftConfig cfg;
  cfg.frame_len = 500;
  CHECK_THROWS_AS(cfg.Validate(), ConfigError);
  cfg.frame_len = 512;
  cfg.hop = 0;
  CHECK_THROWS_AS(cfg.Validate(), ConfigError);
  cfg.hop = 600;
  CHECK_THROWS_AS(cfg.Validate(), ConfigError);
  cfg.hop = 384;  // sine windows do not overlap-add at 3/4 of the frame
  CHECK_THROWS_AS(cfg.Validate(), ConfigError);
}

TEST_CASE("synthesis rejects frames of the wrong width") {
  StftConfig cfg;
  std::vector<SpectralFrame> frames(2);
  frames[0].bins.resize(257);
  frames[1].bins.resize(100);
  CHECK_THROWS_AS(Synthesize(frames, cfg, 800), ShapeError);
}
