#ifndef ECHOFORGE_DTP_H_
#define ECHOFORGE_DTP_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "echoforge/fft.h"

namespace echoforge {

struct DtpParams {
  // Markov transition probabilities between the echo-only (0) and
  // double-talk (1) states.
  double a01 = 0.01;
  double a10 = 0.01;
  // Observation confusion: b01 = P(coherence looks like double talk | echo
  // only), b10 = P(coherence looks like echo only | double talk).
  double b01 = 0.1;
  double b10 = 0.1;
  double alpha = 0.9;   // smoothing of the band-mean coherence
  double beta = 0.7;    // smoothing of the output probability
  std::size_t k_begin = 10;  // ~310 Hz at 512 / 16 kHz
  std::size_t k_end = 109;   // ~3400 Hz
  double frame_duration = 0.016;  // T_DTP, seconds between updates
  double tau = 0.1;               // PSD time constant, seconds

  void Validate(std::size_t num_bins, const std::string& prefix = "dtp") const;
  double PsdSmoothing() const;
};

// Double-talk probability from the coherence between the echo estimate
// d_hat and the microphone y.
class DoubleTalkEstimator {
 public:
  DoubleTalkEstimator(const DtpParams& params, std::size_t num_bins);

  // Returns the updated probability in [0, 1].
  double Update(std::span<const Complex> d_hat, std::span<const Complex> y);

  double probability() const { return p_out_; }
  double mean_coherence() const { return coherence_smoothed_; }
  std::span<const double> coherence() const { return coherence_; }

 private:
  DtpParams params_;
  std::size_t num_bins_;
  double psd_alpha_;
  std::vector<double> s_dd_, s_yy_;
  std::vector<Complex> s_dy_;
  std::vector<double> coherence_;
  bool psd_init_ = false;
  bool coherence_init_ = false;
  double coherence_smoothed_ = 1.0;
  double p_filter_ = 0.5;
  double p_out_ = 0.5;
};

// Magnitude-squared coherence |S_dy|^2 / (S_dd S_yy); 0 when both PSDs are 0.
double Coherence(double s_dd, double s_yy, Complex s_dy);

// One step of the two-state forward filter, exposed for testing: predicts
// with (a01, a10), then weighs by the soft emission likelihoods of the
// observation u = 1 - coherence.
double ForwardStep(double p_prev, double u, const DtpParams& params);

}  // namespace echoforge

#endif  // ECHOFORGE_DTP_H_
