#include "echoforge/dtp.h"

#include <algorithm>
#include <cmath>

#include "echoforge/errors.h"

namespace echoforge {
namespace {

// Guards 0/0 only, so the coherence does not depend on the signal level.
constexpr double kCoherenceFloor = 1e-300;
constexpr double kSilenceFloor = 1e-12;

bool InUnit(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

void DtpParams::Validate(std::size_t num_bins, const std::string& prefix) const {
  const auto field = [&](const char* name) { return prefix + "." + name; };
  const std::pair<const char*, double> probs[] = {
      {"a01", a01}, {"a10", a10}, {"b01", b01}, {"b10", b10}};
  for (const auto& [name, v] : probs) {
    if (!InUnit(v)) throw ConfigError(field(name) + " must lie in [0, 1]", field(name));
  }
  // Otherwise low coherence would count as evidence against double talk.
  if (!(b01 + b10 < 1.0)) {
    throw ConfigError(field("b01") + " + " + field("b10") + " must be < 1", field("b01"));
  }
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw ConfigError(field("alpha") + " must lie in [0, 1)", field("alpha"));
  }
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw ConfigError(field("beta") + " must lie in [0, 1)", field("beta"));
  }
  if (!(k_begin < k_end) || k_end >= num_bins) {
    throw ConfigError(field("k_begin") + "/" + field("k_end") +
                          " must satisfy k_begin < k_end <= frame_len/2",
                      field("k_end"));
  }
  if (!(frame_duration > 0.0)) {
    throw ConfigError(field("frame_duration") + " must be > 0", field("frame_duration"));
  }
  if (!(tau > 0.0)) throw ConfigError(field("tau") + " must be > 0", field("tau"));
}

double DtpParams::PsdSmoothing() const { return std::exp(-frame_duration / tau); }

double Coherence(double s_dd, double s_yy, Complex s_dy) {
  return std::norm(s_dy) / std::max(s_dd * s_yy, kCoherenceFloor);
}

double ForwardStep(double p_prev, double u, const DtpParams& params) {
  u = std::clamp(u, 0.0, 1.0);
  const double predicted = p_prev * (1.0 - params.a10) + (1.0 - p_prev) * params.a01;
  const double like_dt = (1.0 - params.b10) * u + params.b10 * (1.0 - u);
  const double like_echo = params.b01 * u + (1.0 - params.b01) * (1.0 - u);
  const double num = predicted * like_dt;
  const double den = num + (1.0 - predicted) * like_echo;
  if (!(den > 0.0)) return predicted;
  return std::clamp(num / den, 0.0, 1.0);
}

DoubleTalkEstimator::DoubleTalkEstimator(const DtpParams& params, std::size_t num_bins)
    : params_(params),
      num_bins_(num_bins),
      psd_alpha_((params.Validate(num_bins), params.PsdSmoothing())),
      s_dd_(num_bins, 0.0),
      s_yy_(num_bins, 0.0),
      s_dy_(num_bins),
      coherence_(num_bins, 0.0) {}

double DoubleTalkEstimator::Update(std::span<const Complex> d_hat, std::span<const Complex> y) {
  if (d_hat.size() != num_bins_ || y.size() != num_bins_) {
    throw ShapeError("DoubleTalkEstimator::Update: frame length mismatch");
  }
  const double a = psd_init_ ? psd_alpha_ : 0.0;
  for (std::size_t k = 0; k < num_bins_; ++k) {
    s_dd_[k] = a * s_dd_[k] + (1.0 - a) * std::norm(d_hat[k]);
    s_yy_[k] = a * s_yy_[k] + (1.0 - a) * std::norm(y[k]);
    s_dy_[k] = a * s_dy_[k] + (1.0 - a) * d_hat[k] * std::conj(y[k]);
  }
  psd_init_ = true;

  const std::size_t k0 = params_.k_begin, k1 = params_.k_end;
  const double band = static_cast<double>(k1 - k0 + 1);
  double mean_dd = 0.0, mean_yy = 0.0, mean_c = 0.0;
  for (std::size_t k = 0; k < num_bins_; ++k) {
    coherence_[k] = std::min(1.0, Coherence(s_dd_[k], s_yy_[k], s_dy_[k]));
  }
  for (std::size_t k = k0; k <= k1; ++k) {
    mean_dd += s_dd_[k];
    mean_yy += s_yy_[k];
    mean_c += coherence_[k];
  }
  mean_dd /= band;
  mean_yy /= band;
  mean_c /= band;
  if (mean_dd < kSilenceFloor && mean_yy < kSilenceFloor) return p_out_;

  coherence_smoothed_ = coherence_init_
                            ? params_.alpha * coherence_smoothed_ + (1.0 - params_.alpha) * mean_c
                            : mean_c;
  coherence_init_ = true;

  p_filter_ = ForwardStep(p_filter_, 1.0 - coherence_smoothed_, params_);
  p_out_ = std::clamp(params_.beta * p_out_ + (1.0 - params_.beta) * p_filter_, 0.0, 1.0);
  return p_out_;
}

}  // namespace echoforge
