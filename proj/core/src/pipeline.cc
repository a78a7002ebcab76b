#include "echoforge/pipeline.h"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include "echoforge/dtp.h"
#include "echoforge/errors.h"
#include "echoforge/npe.h"
#include "echoforge/raec.h"
#include "echoforge/rpe.h"
#include "echoforge/suppressor.h"

namespace echoforge {
namespace {

#ifndef NDEBUG
template <typename Range>
void CheckFinite(const Range& values, const char* stage) {
  for (const auto& v : values) {
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Complex>) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw StateError(std::string("non-finite value after ") + stage);
      }
    } else if (!std::isfinite(v)) {
      throw StateError(std::string("non-finite value after ") + stage);
    }
  }
}
#else
template <typename Range>
void CheckFinite(const Range&, const char*) {}
#endif

void Append(std::vector<double>& dst, std::span<const double> src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

}  // namespace

std::size_t PipelineLookaheadSamples(const PipelineOptions& options) {
  return options.stft.frame_len - 1;
}

PipelineResult ProcessStream(const AudioBuffer& mic, const AudioBuffer& reference,
                             const ParamVector& params, const PipelineOptions& options) {
  ValidateAudio(mic, "microphone");
  ValidateAudio(reference, "reference");
  if (mic.sample_rate != reference.sample_rate) {
    throw InputError("sample rate mismatch: microphone " + std::to_string(mic.sample_rate) +
                     " Hz, reference " + std::to_string(reference.sample_rate) + " Hz");
  }
  options.stft.Validate();
  const std::size_t bins = options.stft.num_bins();
  params.Validate(bins);

  const int fs = mic.sample_rate;
  const std::size_t n = std::max(mic.size(), reference.size());
  AudioBuffer y(mic.samples, fs), x(reference.samples, fs);
  y.samples.resize(n, 0.0);
  x.samples.resize(n, 0.0);

  RaecCascade cascade(params.raec1, params.raec2, fs);
  if (options.freeze_aec) {
    cascade.stage1().set_adaptation_enabled(false);
    cascade.stage2().set_adaptation_enabled(false);
  }
  AudioBuffer e(n, fs), d_hat(n, fs);
  cascade.Run(x.samples, y.samples, e.samples, d_hat.samples);
  CheckFinite(e.samples, "echo cancellation");

  const auto X = Analyze(x, options.stft);
  const auto Y = Analyze(y, options.stft);
  const auto E = Analyze(e, options.stft);
  const auto D = Analyze(d_hat, options.stft);
  const std::size_t frames = X.size();

  DoubleTalkEstimator dtp(params.dtp, bins);
  ResidualEchoEstimator rpe(params.rpe, bins);
  NoisePowerEstimator npe(params.npe, bins);
  Suppressor suppressor(params.suppressor, bins);
  suppressor.set_force_unity(options.force_unity_mask);
  VoiceActivityDetector vad(params.vad);

  PipelineResult result;
  PipelineDiagnostics& diag = result.diagnostics;
  if (options.diagnostics) {
    diag.num_frames = frames;
    diag.num_bins = bins;
  }
  std::vector<SpectralFrame> out(frames);
  result.vad_frames.resize(frames);
  for (std::size_t m = 0; m < frames; ++m) {
    const double p_dt = dtp.Update(D[m].bins, Y[m].bins);
    const auto high = rpe.UpdateHigh(Y[m].bins, X[m].bins);
    const auto low = rpe.UpdateLow(E[m].bins, X[m].bins);
    const auto lambda_b = CombineResidualPower(high, low, p_dt);
    CheckFinite(lambda_b, "residual echo estimation");
    const auto lambda_v = npe.Update(E[m].bins);
    CheckFinite(lambda_v, "noise estimation");

    out[m].index = m;
    out[m].bins.resize(bins);
    suppressor.Process(E[m].bins, lambda_v, lambda_b, out[m].bins);
    CheckFinite(out[m].bins, "suppression");
    result.vad_frames[m] = vad.Update(suppressor.xi(), suppressor.gamma());

    if (options.diagnostics) {
      Append(diag.xi, suppressor.xi());
      Append(diag.gamma, suppressor.gamma());
      Append(diag.zeta, suppressor.mask());
      Append(diag.lambda_v, lambda_v);
      Append(diag.lambda_bh, high);
      Append(diag.lambda_bl, low);
      Append(diag.lambda_b, lambda_b);
      diag.p_dt.push_back(p_dt);
      diag.vad_statistic.push_back(vad.last_statistic());
    }
  }

  result.enhanced = Synthesize(out, options.stft, mic.size(), fs);
  e.samples.resize(mic.size());
  result.aec_error = std::move(e);
  result.segments =
      FramesToSegments(result.vad_frames, options.stft.hop, options.stft.frame_len, mic.size());
  return result;
}

void WriteDiagnostics(const std::filesystem::path& path, const PipelineDiagnostics& diag) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write diagnostics file " + path.string(), path.string());
  const std::size_t bins = diag.num_bins;
  std::vector<unsigned char> frame(3 * bins * 4);
  auto put = [&](std::size_t slot, double v) {
    std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    for (int b = 0; b < 4; ++b) frame[slot * 4 + b] = static_cast<unsigned char>(bits >> (8 * b));
  };
  for (std::size_t m = 0; m < diag.num_frames; ++m) {
    for (std::size_t k = 0; k < bins; ++k) {
      put(k, diag.xi[m * bins + k]);
      put(bins + k, diag.gamma[m * bins + k]);
      put(2 * bins + k, diag.zeta[m * bins + k]);
    }
    out.write(reinterpret_cast<const char*>(frame.data()),
              static_cast<std::streamsize>(frame.size()));
  }
  if (!out) throw IoError("failed writing diagnostics file " + path.string(), path.string());
}

}  // namespace echoforge
