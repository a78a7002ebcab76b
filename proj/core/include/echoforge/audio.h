#ifndef ECHOFORGE_AUDIO_H_
#define ECHOFORGE_AUDIO_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace echoforge {

inline constexpr int kDefaultSampleRate = 16000;

// Mono signal, nominal full scale +-1.0.
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = kDefaultSampleRate;

  AudioBuffer() = default;
  AudioBuffer(std::vector<double> s, int rate)
      : samples(std::move(s)), sample_rate(rate) {}
  AudioBuffer(std::size_t length, int rate) : samples(length, 0.0), sample_rate(rate) {}

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
  std::span<const double> view() const { return samples; }
};

// Throws InputError on NaN/Inf samples or a non-positive sample rate.
void ValidateAudio(const AudioBuffer& buffer, const char* what = "audio");

bool AllFinite(std::span<const double> values);

double Energy(std::span<const double> x);

enum class SampleFormat { kPcm16, kFloat32 };

// RIFF/WAVE, mono. 16-bit PCM maps to [-1, 1) by division by 32768;
// 32-bit IEEE float is read as-is. Throws IoError naming the path.
AudioBuffer ReadWav(const std::filesystem::path& path);

// 16-bit output is clipped to the representable range and rounded.
void WriteWav(const std::filesystem::path& path, const AudioBuffer& buffer,
              SampleFormat format = SampleFormat::kPcm16);

}  // namespace echoforge

#endif  // ECHOFORGE_AUDIO_H_
