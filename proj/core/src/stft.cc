#include "echoforge/stft.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "echoforge/errors.h"

namespace echoforge {
namespace {

std::vector<double> SineWindow(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::sin(std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n));
  }
  return w;
}

// Sum over frames of wa*ws at each offset within one hop.
std::vector<double> OverlapSums(const std::vector<double>& wa, const std::vector<double>& ws,
                                std::size_t hop) {
  std::vector<double> sums(hop, 0.0);
  for (std::size_t n = 0; n < wa.size(); ++n) sums[n % hop] += wa[n] * ws[n];
  return sums;
}

}  // namespace

std::vector<double> AnalysisWindow(const StftConfig& cfg) {
  switch (cfg.window) {
    case Window::kSqrtHann:
      return SineWindow(cfg.frame_len);
    case Window::kHann: {
      auto w = SineWindow(cfg.frame_len);
      for (double& v : w) v *= v;
      return w;
    }
    case Window::kRect:
      break;
  }
  return std::vector<double>(cfg.frame_len, 1.0);
}

std::vector<double> SynthesisWindow(const StftConfig& cfg) {
  if (cfg.window == Window::kSqrtHann) return SineWindow(cfg.frame_len);
  return std::vector<double>(cfg.frame_len, 1.0);
}

void StftConfig::Validate() const {
  if (!IsPowerOfTwo(frame_len) || frame_len < 2) {
    throw ConfigError("stft.frame_len must be a power of two >= 2", "stft.frame_len");
  }
  if (hop == 0 || hop > frame_len) {
    throw ConfigError("stft.hop must satisfy 0 < hop <= frame_len", "stft.hop");
  }
  const auto sums = OverlapSums(AnalysisWindow(*this), SynthesisWindow(*this), hop);
  const auto [lo, hi] = std::minmax_element(sums.begin(), sums.end());
  if (*lo <= 0.0 || (*hi - *lo) > 1e-9 * *hi) {
    throw ConfigError("window pair is not constant-overlap-add at this hop", "stft.hop");
  }
}

std::size_t NumFrames(std::size_t num_samples, const StftConfig& cfg) {
  return (num_samples + cfg.hop - 1) / cfg.hop;
}

std::vector<SpectralFrame> Analyze(const AudioBuffer& buffer, const StftConfig& cfg) {
  cfg.Validate();
  const std::size_t frames = NumFrames(buffer.size(), cfg);
  std::vector<SpectralFrame> out(frames);
  if (frames == 0) return out;

  const auto window = AnalysisWindow(cfg);
  RealFft fft(cfg.frame_len);
  std::vector<double> segment(cfg.frame_len);
  for (std::size_t m = 0; m < frames; ++m) {
    const std::size_t start = m * cfg.hop;
    for (std::size_t i = 0; i < cfg.frame_len; ++i) {
      const std::size_t n = start + i;
      segment[i] = n < buffer.size() ? buffer.samples[n] * window[i] : 0.0;
    }
    out[m].index = m;
    out[m].bins.resize(cfg.num_bins());
    fft.Forward(segment, out[m].bins);
  }
  return out;
}

AudioBuffer Synthesize(std::span<const SpectralFrame> frames, const StftConfig& cfg,
                       std::size_t length, int sample_rate) {
  cfg.Validate();
  AudioBuffer out(length, sample_rate);
  if (frames.empty() || length == 0) return out;

  const auto wa = AnalysisWindow(cfg);
  const auto ws = SynthesisWindow(cfg);
  std::vector<double> norm(length, 0.0);
  RealFft fft(cfg.frame_len);
  std::vector<double> segment(cfg.frame_len);
  for (std::size_t m = 0; m < frames.size(); ++m) {
    if (frames[m].bins.size() != cfg.num_bins()) {
      throw ShapeError("Synthesize: frame " + std::to_string(m) + " has " +
                       std::to_string(frames[m].bins.size()) + " bins, expected " +
                       std::to_string(cfg.num_bins()));
    }
    fft.Inverse(frames[m].bins, segment);
    const std::size_t start = m * cfg.hop;
    for (std::size_t i = 0; i < cfg.frame_len && start + i < length; ++i) {
      out.samples[start + i] += segment[i] * ws[i];
      norm[start + i] += wa[i] * ws[i];
    }
  }
  for (std::size_t n = 0; n < length; ++n) {
    out.samples[n] = norm[n] > 1e-12 ? out.samples[n] / norm[n] : 0.0;
  }
  return out;
}

AudioBuffer Synthesize(std::span<const SpectralFrame> frames, const StftConfig& cfg) {
  const std::size_t length = frames.empty() ? 0 : (frames.size() - 1) * cfg.hop + cfg.frame_len;
  return Synthesize(frames, cfg, length);
}

double FrameEnergy(const SpectralFrame& frame, std::size_t frame_len) {
  const std::size_t half = frame_len / 2;
  double e = 0.0;
  for (std::size_t k = 0; k < frame.bins.size(); ++k) {
    const double weight = (k == 0 || k == half) ? 1.0 : 2.0;
    e += weight * std::norm(frame.bins[k]);
  }
  return e / static_cast<double>(frame_len);
}

}  // namespace echoforge
