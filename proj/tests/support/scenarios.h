#ifndef ECHOFORGE_TESTS_SUPPORT_SCENARIOS_H_
#define ECHOFORGE_TESTS_SUPPORT_SCENARIOS_H_

// Synthetic test material shared by the unit and acceptance suites.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "echoforge/params.h"
#include "echoforge/raec.h"

namespace echoforge::testing {

constexpr int kFs = 16000;

// Exponentially decaying random FIR, unit energy.
std::vector<double> SyntheticEchoPath(std::size_t taps, std::uint64_t seed);

struct EchoScene {
  std::vector<double> far;    // x
  std::vector<double> echo;   // path * x
  std::vector<double> near;   // near-end talker, zero outside bursts
  std::vector<double> noise;  // background
  std::vector<double> mic;    // echo + near + noise
  std::vector<double> path;
};

struct EchoSceneSpec {
  double seconds = 10.0;
  std::size_t taps = 256;
  bool music_far_end = false;  // white otherwise
  double noise_db = -60.0;     // background level relative to the echo
  // Near-end bursts [start, end) in seconds, with the speech-to-echo ratio
  // measured over the burst span.
  std::vector<std::pair<double, double>> bursts;
  double burst_ser_db = -10.0;
  std::uint64_t seed = 1;
};

EchoScene MakeEchoScene(const EchoSceneSpec& spec);

struct MisalignmentTrace {
  std::vector<double> time;  // seconds at the end of the block
  std::vector<double> misalignment_db;
  std::vector<double> error;  // final canceller output
  // Mean of the trace over [t0, t1).
  double Mean(double t0, double t1) const;
  double Max(double t0, double t1) const;
  // First time >= t0 where the trace is at or below `level`; nullopt if never.
  std::optional<double> FirstBelow(double t0, double level) const;
};

// Runs a single stage, or the two-stage cascade when `stage2` is set,
// block by block, recording the misalignment of the summed FIR.
MisalignmentTrace TraceCanceller(const EchoScene& scene, const RaecParams& stage1,
                                 const std::optional<RaecParams>& stage2,
                                 std::size_t every_blocks = 4);

// 10 log10 of mic energy over error energy within [t0, t1) seconds.
double ErleOverDb(const std::vector<double>& mic, const std::vector<double>& error, double t0,
                  double t1);

// Alternating echo-only / double-talk sequence for the DTP. Frame scores
// come from running the full cascade and the estimator on (d_hat, y). An
// echo-only lead-in lets the cascade converge; its frames are not scored.
struct DtpSequence {
  std::vector<double> p_dt;
  std::vector<bool> double_talk;  // label per frame
};
DtpSequence RunDtpSequence(double segment_seconds, std::size_t segments, double ser_db,
                           std::uint64_t seed, const ParamVector& params = {},
                           double lead_in_seconds = 4.0);

// Speech-shaped bursts in stationary white noise, scored by the NPE +
// suppressor chain (no echo). Per frame: VAD statistic and burst label.
struct VadSequence {
  std::vector<double> statistic;
  std::vector<bool> speech;
};
VadSequence RunVadSequence(double seconds, double snr_db, std::uint64_t seed);

// Threshold with the largest hit-minus-false-alarm rate on the first half
// of the frames, scored on the second half.
struct VadRates {
  double eta = 0.0;
  double hit = 0.0;
  double false_alarm = 0.0;
};
VadRates TuneAndScoreVad(const VadSequence& seq);

// White noise, plus a speech-like signal at `snr_db` when given, tracked by
// the NPE. Per bin: 10 log10 of the time-averaged estimate (after the
// first second) over the Welch periodogram of the noise alone.
std::vector<double> NpeTrackingErrorDb(double seconds, std::optional<double> snr_db,
                                       std::uint64_t seed);

// Demo sources plus a generated corpus under `root`. Returns the manifest
// path.
std::filesystem::path MakeSmokeCorpus(const std::filesystem::path& root,
                                      std::uint64_t source_seed, std::uint64_t corpus_seed,
                                      std::size_t n_items, double ser_db);

// Re-reads every item of a generated corpus and measures how far the
// written components stray from the recipe.
struct CorpusFidelity {
  std::size_t items = 0;
  double max_ser_error_db = 0.0;  // |10 log10(E_s / E_echo) - ser_db|
  double max_snr_error_db = 0.0;  // |10 log10(E_s / E_noise) - snr_db|
  double max_mix_residual = 0.0;  // max |mix - (s + echo + noise + floor)|
  double max_floor_rms_error = 0.0;  // |rms(floor) - sigma3 pink_rms| relative
};
CorpusFidelity MeasureCorpusFidelity(const std::filesystem::path& manifest);

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace echoforge::testing

#endif  // ECHOFORGE_TESTS_SUPPORT_SCENARIOS_H_
