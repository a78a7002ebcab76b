#ifndef ECHOFORGE_SUPPRESSOR_H_
#define ECHOFORGE_SUPPRESSOR_H_

#include <cstddef>
#include <span>
#include <vector>

#include "echoforge/fft.h"

namespace echoforge {

struct SuppressorParams {
  double dd_smoothing = 0.98;                 // alpha_DD
  double g_min = 0.1;
  double theta1 = 0.31622776601683794;        // -5 dB, linear a-priori SNR
  double theta2 = 3.1622776601683795;         // +5 dB
  double alpha = 0.5;
  // Clamp the mask at 1. The high band (2 + alpha) / 2 amplifies otherwise.
  bool cap_unity = false;

  // Field names reported: ns.alpha_dd, mask.g_min, mask.theta1,
  // mask.theta2, mask.alpha.
  void Validate() const;
};

// gamma_k = lambda_E / max(lambda_V + lambda_B, 1e-12)
void PosteriorSnr(std::span<const double> lambda_e, std::span<const double> lambda_v,
                  std::span<const double> lambda_b, std::span<double> gamma);

// Decision-directed a-priori SNR:
//   xi = a |S_prev|^2 / (lambda_V + lambda_B) + (1 - a) max(gamma - 1, 0)
void DecisionDirectedSnr(std::span<const double> prev_clean_power, std::span<const double> gamma,
                         std::span<const double> lambda_v, std::span<const double> lambda_b,
                         double dd_smoothing, std::span<double> xi);

// Log-spectral amplitude gain xi/(1+xi) exp(E1(v)/2), v = xi gamma/(1+xi),
// v floored at 1e-10.
double LsaGain(double xi, double gamma);

// Three-band mask on the a-priori SNR:
//   xi <= theta1           (1 - G_min) G + G_min
//   theta1 < xi < theta2   alpha / 2
//   xi >= theta2           (2 + alpha) / 2
double QuasiBinaryMask(double xi, double lsa_gain, const SuppressorParams& params);

// Per-stream suppressor. Keeps |S_hat[m-1]|^2 for the decision-directed
// estimate.
class Suppressor {
 public:
  Suppressor(const SuppressorParams& params, std::size_t num_bins);

  // Computes gamma, xi, G and the mask for error frame `e` given the noise
  // and residual-echo powers; writes S_hat = zeta * E into `out`.
  void Process(std::span<const Complex> e, std::span<const double> lambda_v,
               std::span<const double> lambda_b, std::span<Complex> out);

  // S_hat = zeta * E. Updates the stored clean power. Exposed so a caller
  // can substitute its own mask.
  void ApplyMask(std::span<const double> zeta, std::span<const Complex> e,
                 std::span<Complex> out);

  std::span<const double> xi() const { return xi_; }
  std::span<const double> gamma() const { return gamma_; }
  std::span<const double> gain() const { return gain_; }
  std::span<const double> mask() const { return mask_; }
  std::span<const double> previous_clean_power() const { return prev_clean_; }

  void set_force_unity(bool v) { force_unity_ = v; }

 private:
  SuppressorParams params_;
  std::size_t num_bins_;
  std::vector<double> prev_clean_;
  std::vector<double> lambda_e_, gamma_, xi_, gain_, mask_;
  bool force_unity_ = false;
};

}  // namespace echoforge

#endif  // ECHOFORGE_SUPPRESSOR_H_
