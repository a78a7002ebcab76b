#ifndef ECHOFORGE_RPE_H_
#define ECHOFORGE_RPE_H_

#include <cstddef>
#include <deque>
#include <span>
#include <string>
#include <vector>

#include "echoforge/fft.h"

namespace echoforge {

struct RpeParams {
  std::size_t partitions_high = 4;  // M_RPE_H
  std::size_t partitions_low = 2;   // M_RPE_L
  double alpha_high = 0.92;         // alpha_RPE_H
  double alpha_low = 0.92;          // alpha_RPE_L

  void Validate(const std::string& prefix = "rpe") const;
};

// Residual power from a partitioned least-squares coupling between a signal
// Z (microphone or canceller error) and the far-end reference X:
//   W_p,k = S_ZX,p / (S_XX,p + delta),  lambda_k = sum_p |W_p,k|^2 |X_{m-p},k|^2
// where X_{m-p} is the reference frame p hops back.
class CoherenceEchoEstimator {
 public:
  CoherenceEchoEstimator(std::size_t partitions, double alpha, std::size_t num_bins);

  std::span<const double> Update(std::span<const Complex> z, std::span<const Complex> x);
  std::span<const double> power() const { return power_; }

 private:
  std::size_t partitions_;
  double alpha_;
  std::size_t num_bins_;
  std::deque<std::vector<Complex>> history_;  // newest first
  std::vector<std::vector<Complex>> s_zx_;
  std::vector<std::vector<double>> s_xx_;
  std::vector<double> power_;
  bool init_ = false;
};

class ResidualEchoEstimator {
 public:
  ResidualEchoEstimator(const RpeParams& params, std::size_t num_bins);

  // lambda_BH from coherence(Y, X).
  std::span<const double> UpdateHigh(std::span<const Complex> y, std::span<const Complex> x) {
    return high_.Update(y, x);
  }
  // lambda_BL from coherence(E, X).
  std::span<const double> UpdateLow(std::span<const Complex> e, std::span<const Complex> x) {
    return low_.Update(e, x);
  }

  std::span<const double> high() const { return high_.power(); }
  std::span<const double> low() const { return low_.power(); }

 private:
  CoherenceEchoEstimator high_;
  CoherenceEchoEstimator low_;
};

// lambda_B = (1 - p_dt) lambda_BH + p_dt lambda_BL, bin-wise.
// Throws InputError if p_dt is outside [0, 1], ShapeError on length mismatch.
std::vector<double> CombineResidualPower(std::span<const double> high,
                                         std::span<const double> low, double p_dt);

}  // namespace echoforge

#endif  // ECHOFORGE_RPE_H_
