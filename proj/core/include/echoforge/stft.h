#ifndef ECHOFORGE_STFT_H_
#define ECHOFORGE_STFT_H_

#include <cstddef>
#include <span>
#include <vector>

#include "echoforge/audio.h"
#include "echoforge/fft.h"

namespace echoforge {

// Analysis/synthesis window pairs:
//   kSqrtHann  sine window for both analysis and synthesis
//   kHann      Hann analysis, rectangular synthesis
//   kRect      rectangular for both
// Both Hann variants are sampled at half-integer offsets,
// w[n] = sin^2(pi (n + 1/2) / N), so no window sample is exactly zero and
// the first and last samples of a buffer remain reconstructible.
enum class Window { kSqrtHann, kHann, kRect };

struct StftConfig {
  std::size_t frame_len = 512;
  std::size_t hop = 256;
  Window window = Window::kSqrtHann;

  std::size_t num_bins() const { return frame_len / 2 + 1; }

  // Throws ConfigError unless frame_len is a power of two, 0 < hop <=
  // frame_len, and the window pair overlap-adds to a constant at `hop`.
  void Validate() const;
};

struct SpectralFrame {
  std::vector<Complex> bins;
  std::size_t index = 0;
};

std::vector<double> AnalysisWindow(const StftConfig& cfg);
std::vector<double> SynthesisWindow(const StftConfig& cfg);

// Number of frames Analyze produces: ceil(num_samples / hop).
std::size_t NumFrames(std::size_t num_samples, const StftConfig& cfg);

// Frame m covers samples [m*hop, m*hop + frame_len); samples past the end
// of the buffer are zero.
std::vector<SpectralFrame> Analyze(const AudioBuffer& buffer, const StftConfig& cfg);

// Weighted overlap-add normalized by the accumulated window product, which
// makes Synthesize(Analyze(x)) == x over the whole buffer. `length` is the
// number of output samples; by default (frames-1)*hop + frame_len.
AudioBuffer Synthesize(std::span<const SpectralFrame> frames, const StftConfig& cfg,
                       std::size_t length, int sample_rate = kDefaultSampleRate);
AudioBuffer Synthesize(std::span<const SpectralFrame> frames, const StftConfig& cfg);

// Sum over the full (two-sided) spectrum of |X_k|^2 / N. Equals the energy of
// the windowed time-domain frame.
double FrameEnergy(const SpectralFrame& frame, std::size_t frame_len);

}  // namespace echoforge

#endif  // ECHOFORGE_STFT_H_
