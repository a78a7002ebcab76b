#include "echoforge/npe.h"

#include <algorithm>

#include "echoforge/errors.h"

namespace echoforge {

void NpeParams::Validate(const std::string& prefix) const {
  const auto field = [&](const char* name) { return prefix + "." + name; };
  if (!(xi_h1 > 0.0) || !std::isfinite(xi_h1)) {
    throw ConfigError(field("xi_h1") + " must be > 0", field("xi_h1"));
  }
  if (!(p_threshold > 0.0 && p_threshold < 1.0)) {
    throw ConfigError(field("p_th") + " must lie in (0, 1)", field("p_th"));
  }
  if (!(alpha_p >= 0.0 && alpha_p < 1.0)) {
    throw ConfigError(field("alpha_p") + " must lie in [0, 1)", field("alpha_p"));
  }
  if (!(alpha_npe >= 0.0 && alpha_npe < 1.0)) {
    throw ConfigError(field("alpha_npe") + " must lie in [0, 1)", field("alpha_npe"));
  }
}

double SpeechPresenceProbability(double periodogram, double noise_power, double xi_h1) {
  const double ratio = periodogram / std::max(noise_power, NoisePowerEstimator::kFloor);
  const double exponent = -ratio * xi_h1 / (1.0 + xi_h1);
  return 1.0 / (1.0 + (1.0 + xi_h1) * std::exp(exponent));
}

NoisePowerEstimator::NoisePowerEstimator(const NpeParams& params, std::size_t num_bins)
    : params_((params.Validate(), params)),
      num_bins_(num_bins),
      noise_(num_bins, kFloor),
      presence_smoothed_(num_bins, 0.0),
      cold_sum_(num_bins, 0.0) {}

void NoisePowerEstimator::Initialize(std::span<const double> noise_power) {
  if (noise_power.size() != num_bins_) throw ShapeError("NoisePowerEstimator: length mismatch");
  for (std::size_t k = 0; k < num_bins_; ++k) noise_[k] = std::max(noise_power[k], kFloor);
  frames_ = kColdStartFrames;
}

std::span<const double> NoisePowerEstimator::Update(std::span<const Complex> e) {
  if (e.size() != num_bins_) throw ShapeError("NoisePowerEstimator::Update: length mismatch");
  if (frames_ < kColdStartFrames) {
    ++frames_;
    for (std::size_t k = 0; k < num_bins_; ++k) {
      cold_sum_[k] += std::norm(e[k]);
      noise_[k] = std::max(cold_sum_[k] / static_cast<double>(frames_), kFloor);
    }
    return noise_;
  }
  ++frames_;
  const double ap = params_.alpha_p;
  const double an = params_.alpha_npe;
  for (std::size_t k = 0; k < num_bins_; ++k) {
    const double periodogram = std::norm(e[k]);
    double p = SpeechPresenceProbability(periodogram, noise_[k], params_.xi_h1);
    presence_smoothed_[k] = ap * presence_smoothed_[k] + (1.0 - ap) * p;
    if (presence_smoothed_[k] > params_.p_threshold) p = std::min(p, params_.p_threshold);
    const double estimate = p * noise_[k] + (1.0 - p) * periodogram;
    noise_[k] = std::max(an * noise_[k] + (1.0 - an) * estimate, kFloor);
  }
  return noise_;
}

}  // namespace echoforge
