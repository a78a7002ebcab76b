#ifndef ECHOFORGE_NPE_H_
#define ECHOFORGE_NPE_H_

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "echoforge/fft.h"

namespace echoforge {

struct NpeParams {
  double xi_h1 = 31.622776601683793;  // fixed a-priori SNR under speech presence (15 dB)
  double p_threshold = 0.99;          // P_TH
  double alpha_p = 0.9;               // smoothing of the presence probability
  double alpha_npe = 0.8;             // smoothing of the noise power

  void Validate(const std::string& prefix = "npe") const;
};

// Speech-presence-probability based MMSE noise power tracker.
//
// Per bin and frame, with periodogram |E|^2 and previous noise power L:
//   P    = 1 / (1 + (1 + xi_h1) exp(-|E|^2 / L * xi_h1 / (1 + xi_h1)))
//   Pbar = alpha_p Pbar + (1 - alpha_p) P;   P = min(P, P_TH) if Pbar > P_TH
//   N    = P L + (1 - P) |E|^2
//   L    = alpha_npe L + (1 - alpha_npe) N,  floored at 1e-12
//
// Until `kColdStartFrames` frames have been seen, L is the running mean of
// the periodograms.
class NoisePowerEstimator {
 public:
  static constexpr std::size_t kColdStartFrames = 10;
  static constexpr double kFloor = 1e-12;

  NoisePowerEstimator(const NpeParams& params, std::size_t num_bins);

  // Skip the cold start and begin from an explicit noise power.
  void Initialize(std::span<const double> noise_power);

  std::span<const double> Update(std::span<const Complex> e);

  std::span<const double> noise_power() const { return noise_; }
  std::span<const double> presence() const { return presence_smoothed_; }
  bool initialized() const { return frames_ >= kColdStartFrames; }

 private:
  NpeParams params_;
  std::size_t num_bins_;
  std::vector<double> noise_;
  std::vector<double> presence_smoothed_;
  std::vector<double> cold_sum_;
  std::size_t frames_ = 0;
};

// Posterior speech presence probability of the recursion above.
double SpeechPresenceProbability(double periodogram, double noise_power, double xi_h1);

}  // namespace echoforge

#endif  // ECHOFORGE_NPE_H_
