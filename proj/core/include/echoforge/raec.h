#ifndef ECHOFORGE_RAEC_H_
#define ECHOFORGE_RAEC_H_

#include <cstddef>
#include <deque>
#include <span>
#include <string>
#include <vector>

#include "echoforge/fft.h"

namespace echoforge {

struct RaecParams {
  std::size_t frame_size = 256;     // N_AEC, block length in samples
  std::size_t num_partitions = 8;   // M_AEC
  std::size_t num_iterations = 2;   // N_iter, weight updates per block
  double step_size = 0.5;           // mu_AEC in [0, 2); 0 freezes the filter
  double robust_tuning = 1.5;       // gamma_AEC > 0
  double psd_smoothing = 0.9;       // alpha_AEC in [0, 1)
  // Window over which the robust error scale is held at its minimum.
  // Near-end bursts shorter than this do not open up adaptation.
  double scale_hold_seconds = 4.0;

  // Throws ConfigError naming `<prefix>.<field>`.
  void Validate(const std::string& prefix = "raec") const;
};

// Per-bin step factors in [0, step_size]:
//   mu_k = mu * min(1, gamma^2 * scale_k / P_k)
// with P_k the whitened error power |E_k|^2 / norm_k and scale_k its
// tracked level. Bins hit by a near-end burst get a step that falls with
// the power ratio. Throws ConfigError for scale_k <= 0, ShapeError on
// length mismatch.
std::vector<double> RobustStepSize(std::span<const double> error_power,
                                   std::span<const double> scale, const RaecParams& params);

// Huber clip of the adaptation error at +-gamma*scale. Only feeds the
// weight update; the signal path always sees the unclipped error.
std::vector<double> ErrorRecoveryNonlinearity(std::span<const double> error, double scale,
                                              const RaecParams& params);

// Multidelay (partitioned-block, overlap-save) frequency-domain adaptive
// filter with robust error handling. One instance per stream.
class Raec {
 public:
  explicit Raec(const RaecParams& params, int sample_rate = 16000);

  // x, y, e, d_hat all frame_size samples. e = y - d_hat where d_hat is the
  // echo estimate from the weights before this block's update.
  void Process(std::span<const double> x, std::span<const double> y, std::span<double> e,
               std::span<double> d_hat);

  void set_adaptation_enabled(bool enabled) { adapt_ = enabled; }
  bool adaptation_enabled() const { return adapt_; }

  // Equivalent FIR, num_partitions * frame_size taps.
  std::vector<double> TimeDomainWeights() const;
  double error_scale() const { return scale_; }
  const RaecParams& params() const { return params_; }
  std::size_t blocks_processed() const { return blocks_; }

 private:
  void Filter(std::span<double> d_hat);
  void UpdateScale(std::span<const double> e, std::span<const double> d_hat);
  double CurrentScale(std::span<const double> e, std::span<const double> d_hat) const;
  void UpdateBinScale();

  RaecParams params_;
  std::size_t n_;
  std::size_t bins_;
  RealFft fft_;
  bool adapt_ = true;
  std::size_t blocks_ = 0;

  std::vector<double> x_prev_;
  std::deque<std::vector<Complex>> far_history_;  // newest first, size M
  std::vector<std::vector<Complex>> weights_;     // M x bins
  std::vector<double> far_psd_;
  bool far_psd_init_ = false;

  // Robust scale: ratio of the error scale to the echo-estimate level,
  // smoothed, held at its minimum over a window, rescaled by the current
  // echo-estimate level.
  double ratio_smoothed_ = 0.0;
  bool ratio_init_ = false;
  std::deque<double> ratio_history_;
  std::size_t hold_blocks_;
  double scale_ = 1.0;

  // Per-bin step scale on |E_k|^2 / norm_k: follows decreases with the
  // psd smoothing, rises by at most 20 dB per hold window.
  std::vector<double> bin_scale_;
  std::vector<double> bin_error_;
  double bin_scale_rise_ = 1.0;
  bool bin_scale_init_ = false;

  // Scratch.
  std::vector<double> time_buf_;
  std::vector<Complex> spec_buf_;
  std::vector<Complex> grad_buf_;
};

// Two RAEC stages in series: stage 1 sees (x, y), stage 2 sees (x, e1).
class RaecCascade {
 public:
  RaecCascade(const RaecParams& stage1, const RaecParams& stage2, int sample_rate = 16000);

  // Arbitrary-length buffers of equal size; internally blocked. Returns the
  // final error in `e` and the total echo estimate d_hat = y - e.
  void Run(std::span<const double> x, std::span<const double> y, std::vector<double>& e,
           std::vector<double>& d_hat);

  Raec& stage1() { return stage1_; }
  Raec& stage2() { return stage2_; }
  const Raec& stage1() const { return stage1_; }
  const Raec& stage2() const { return stage2_; }

  // Sum of the stage FIRs, padded to the longer span.
  std::vector<double> TimeDomainWeights() const;

 private:
  void RunStage(Raec& stage, std::span<const double> x, std::span<const double> y,
                std::vector<double>& e, std::vector<double>& d_hat);

  Raec stage1_;
  Raec stage2_;
};

// 10*log10(||h - w||^2 / ||h||^2); w is zero-extended or truncated to h.
double NormalizedMisalignmentDb(std::span<const double> true_path,
                                std::span<const double> estimate);

}  // namespace echoforge

#endif  // ECHOFORGE_RAEC_H_
