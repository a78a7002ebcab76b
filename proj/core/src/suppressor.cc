#include "echoforge/suppressor.h"

#include <algorithm>
#include <cmath>

#include "echoforge/errors.h"
#include "echoforge/expint.h"

namespace echoforge {
namespace {

constexpr double kPowerFloor = 1e-12;
constexpr double kMinV = 1e-10;

void CheckSizes(std::size_t n, std::initializer_list<std::size_t> sizes, const char* what) {
  for (std::size_t s : sizes) {
    if (s != n) throw ShapeError(std::string(what) + ": length mismatch");
  }
}

}  // namespace

void SuppressorParams::Validate() const {
  if (!(dd_smoothing >= 0.0 && dd_smoothing < 1.0)) {
    throw ConfigError("ns.alpha_dd must lie in [0, 1)", "ns.alpha_dd");
  }
  if (!(g_min >= 0.0 && g_min <= 1.0)) {
    throw ConfigError("mask.g_min must lie in [0, 1]", "mask.g_min");
  }
  if (!(theta1 >= 0.0) || !std::isfinite(theta1)) {
    throw ConfigError("mask.theta1 must be a nonnegative linear SNR", "mask.theta1");
  }
  if (!std::isfinite(theta2)) throw ConfigError("mask.theta2 must be finite", "mask.theta2");
  if (!(theta1 < theta2)) {
    throw ConfigError("mask.theta1 must be smaller than mask.theta2", "mask.theta1");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("mask.alpha must be >= 0", "mask.alpha");
  }
}

void PosteriorSnr(std::span<const double> lambda_e, std::span<const double> lambda_v,
                  std::span<const double> lambda_b, std::span<double> gamma) {
  CheckSizes(lambda_e.size(), {lambda_v.size(), lambda_b.size(), gamma.size()}, "PosteriorSnr");
  for (std::size_t k = 0; k < lambda_e.size(); ++k) {
    gamma[k] = lambda_e[k] / std::max(lambda_v[k] + lambda_b[k], kPowerFloor);
  }
}

void DecisionDirectedSnr(std::span<const double> prev_clean_power, std::span<const double> gamma,
                         std::span<const double> lambda_v, std::span<const double> lambda_b,
                         double dd_smoothing, std::span<double> xi) {
  CheckSizes(gamma.size(),
             {prev_clean_power.size(), lambda_v.size(), lambda_b.size(), xi.size()},
             "DecisionDirectedSnr");
  const double a = dd_smoothing;
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    const double denom = std::max(lambda_v[k] + lambda_b[k], kPowerFloor);
    xi[k] = a * prev_clean_power[k] / denom + (1.0 - a) * std::max(gamma[k] - 1.0, 0.0);
  }
}

double LsaGain(double xi, double gamma) {
  const double r = xi / (1.0 + xi);
  const double v = std::max(r * gamma, kMinV);
  return r * std::exp(0.5 * ExpIntE1(v));
}

double QuasiBinaryMask(double xi, double lsa_gain, const SuppressorParams& params) {
  double z;
  if (xi <= params.theta1) {
    z = (1.0 - params.g_min) * lsa_gain + params.g_min;
  } else if (xi >= params.theta2) {
    z = (2.0 + params.alpha) / 2.0;
  } else {
    z = params.alpha / 2.0;
  }
  return params.cap_unity ? std::min(z, 1.0) : z;
}

Suppressor::Suppressor(const SuppressorParams& params, std::size_t num_bins)
    : params_((params.Validate(), params)),
      num_bins_(num_bins),
      prev_clean_(num_bins, 0.0),
      lambda_e_(num_bins),
      gamma_(num_bins),
      xi_(num_bins),
      gain_(num_bins),
      mask_(num_bins) {}

void Suppressor::Process(std::span<const Complex> e, std::span<const double> lambda_v,
                         std::span<const double> lambda_b, std::span<Complex> out) {
  CheckSizes(num_bins_, {e.size(), lambda_v.size(), lambda_b.size(), out.size()},
             "Suppressor::Process");
  for (std::size_t k = 0; k < num_bins_; ++k) lambda_e_[k] = std::norm(e[k]);
  PosteriorSnr(lambda_e_, lambda_v, lambda_b, gamma_);
  DecisionDirectedSnr(prev_clean_, gamma_, lambda_v, lambda_b, params_.dd_smoothing, xi_);
  for (std::size_t k = 0; k < num_bins_; ++k) {
    gain_[k] = LsaGain(xi_[k], gamma_[k]);
    mask_[k] = force_unity_ ? 1.0 : QuasiBinaryMask(xi_[k], gain_[k], params_);
  }
  ApplyMask(mask_, e, out);
}

void Suppressor::ApplyMask(std::span<const double> zeta, std::span<const Complex> e,
                           std::span<Complex> out) {
  CheckSizes(num_bins_, {zeta.size(), e.size(), out.size()}, "Suppressor::ApplyMask");
  for (std::size_t k = 0; k < num_bins_; ++k) {
    out[k] = zeta[k] * e[k];
    prev_clean_[k] = std::norm(out[k]);
  }
}

}  // namespace echoforge
