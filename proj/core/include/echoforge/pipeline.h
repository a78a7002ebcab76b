#ifndef ECHOFORGE_PIPELINE_H_
#define ECHOFORGE_PIPELINE_H_

#include <cstddef>
#include <filesystem>
#include <vector>

#include "echoforge/audio.h"
#include "echoforge/params.h"
#include "echoforge/stft.h"
#include "echoforge/vad.h"

namespace echoforge {

struct PipelineOptions {
  StftConfig stft;
  bool force_unity_mask = false;  // zeta = 1 in every bin
  bool freeze_aec = false;        // RAEC weights stay at zero
  bool diagnostics = false;
};

// Per-frame internals, filled only when PipelineOptions::diagnostics is set.
// Per-bin arrays are frame-major: value of bin k in frame m at [m * bins + k].
struct PipelineDiagnostics {
  std::size_t num_frames = 0;
  std::size_t num_bins = 0;
  std::vector<double> xi, gamma, zeta;
  std::vector<double> lambda_v, lambda_bh, lambda_bl, lambda_b;
  std::vector<double> p_dt;
  std::vector<double> vad_statistic;
};

struct PipelineResult {
  AudioBuffer enhanced;   // same length as the microphone input
  AudioBuffer aec_error;  // RAEC cascade output e
  std::vector<Segment> segments;
  std::vector<bool> vad_frames;
  PipelineDiagnostics diagnostics;
};

// The STFT chain adds no delay: the enhanced sample n depends on input up
// to the end of the frame containing it, at most frame_len - 1 samples
// ahead.
std::size_t PipelineLookaheadSamples(const PipelineOptions& options);

// Runs cascaded RAEC, double-talk probability, dual residual echo
// estimation, noise estimation, suppression and VAD over a full stream.
// The shorter input is zero-padded. Throws InputError on a sample-rate
// mismatch or non-finite samples and ConfigError on invalid parameters.
PipelineResult ProcessStream(const AudioBuffer& mic, const AudioBuffer& reference,
                             const ParamVector& params, const PipelineOptions& options = {});

// Writes xi, gamma and zeta for every frame as little-endian float32, frame
// by frame, num_bins values each, no header. Throws IoError.
void WriteDiagnostics(const std::filesystem::path& path, const PipelineDiagnostics& diag);

}  // namespace echoforge

#endif  // ECHOFORGE_PIPELINE_H_
