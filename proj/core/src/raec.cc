#include "echoforge/raec.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "echoforge/audio.h"
#include "echoforge/errors.h"

namespace echoforge {
namespace {

constexpr double kRegularizer = 1e-3;
constexpr double kScaleFloor = 1e-6;
constexpr double kLevelFloor = 1e-6;
// median(|e|) / 0.6745 estimates sigma for Gaussian e.
constexpr double kMadToSigma = 1.0 / 0.6745;
// Largest rise of the per-bin step scale over one hold window.
constexpr double kBinScaleRiseDb = 20.0;
constexpr double kBinScaleFloor = 1e-20;

double MedianAbs(std::span<const double> v) {
  std::vector<double> a(v.size());
  std::transform(v.begin(), v.end(), a.begin(), [](double x) { return std::abs(x); });
  const auto mid = a.begin() + static_cast<std::ptrdiff_t>(a.size() / 2);
  std::nth_element(a.begin(), mid, a.end());
  return *mid;
}

double Rms(std::span<const double> v) {
  return std::sqrt(Energy(v) / static_cast<double>(v.size()));
}

}  // namespace

void RaecParams::Validate(const std::string& prefix) const {
  const auto field = [&](const char* name) { return prefix + "." + name; };
  if (!IsPowerOfTwo(frame_size) || frame_size < 8) {
    throw ConfigError(field("frame_size") + " must be a power of two >= 8", field("frame_size"));
  }
  if (num_partitions < 1) {
    throw ConfigError(field("partitions") + " must be >= 1", field("partitions"));
  }
  if (num_iterations < 1) {
    throw ConfigError(field("iterations") + " must be >= 1", field("iterations"));
  }
  if (!(step_size >= 0.0 && step_size < 2.0)) {
    throw ConfigError(field("mu") + " must lie in [0, 2)", field("mu"));
  }
  if (!(robust_tuning > 0.0) || !std::isfinite(robust_tuning)) {
    throw ConfigError(field("gamma") + " must be > 0", field("gamma"));
  }
  if (!(psd_smoothing >= 0.0 && psd_smoothing < 1.0)) {
    throw ConfigError(field("alpha") + " must lie in [0, 1)", field("alpha"));
  }
  if (!(scale_hold_seconds > 0.0)) {
    throw ConfigError(field("scale_hold") + " must be > 0", field("scale_hold"));
  }
}

std::vector<double> RobustStepSize(std::span<const double> error_power,
                                   std::span<const double> scale, const RaecParams& params) {
  if (error_power.size() != scale.size()) throw ShapeError("RobustStepSize: length mismatch");
  const double g2 = params.robust_tuning * params.robust_tuning;
  std::vector<double> steps(error_power.size());
  for (std::size_t k = 0; k < error_power.size(); ++k) {
    if (!(scale[k] > 0.0)) throw ConfigError("robust step size needs a positive scale");
    const double limit = g2 * scale[k];
    steps[k] = error_power[k] <= limit ? params.step_size
                                       : params.step_size * limit / error_power[k];
  }
  return steps;
}

std::vector<double> ErrorRecoveryNonlinearity(std::span<const double> error, double scale,
                                              const RaecParams& params) {
  const double limit = params.robust_tuning * scale;
  std::vector<double> out(error.size());
  std::transform(error.begin(), error.end(), out.begin(),
                 [limit](double e) { return std::clamp(e, -limit, limit); });
  return out;
}

Raec::Raec(const RaecParams& params, int sample_rate)
    : params_(params),
      n_(params.frame_size),
      bins_(params.frame_size + 1),
      fft_((params.Validate(), 2 * params.frame_size)),
      x_prev_(n_, 0.0),
      weights_(params.num_partitions, std::vector<Complex>(bins_)),
      far_psd_(bins_, 0.0),
      bin_scale_(bins_, 0.0),
      bin_error_(bins_, 0.0),
      time_buf_(2 * n_),
      spec_buf_(bins_),
      grad_buf_(bins_) {
  for (std::size_t p = 0; p < params_.num_partitions; ++p) {
    far_history_.emplace_back(bins_, Complex{});
  }
  const double blocks_per_second = static_cast<double>(sample_rate) / static_cast<double>(n_);
  hold_blocks_ = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(params_.scale_hold_seconds * blocks_per_second)));
  bin_scale_rise_ = std::pow(10.0, kBinScaleRiseDb / 10.0 / static_cast<double>(hold_blocks_));
}

void Raec::Filter(std::span<double> d_hat) {
  std::fill(spec_buf_.begin(), spec_buf_.end(), Complex{});
  for (std::size_t p = 0; p < params_.num_partitions; ++p) {
    const auto& w = weights_[p];
    const auto& x = far_history_[p];
    for (std::size_t k = 0; k < bins_; ++k) spec_buf_[k] += w[k] * x[k];
  }
  fft_.Inverse(spec_buf_, time_buf_);
  std::copy(time_buf_.begin() + static_cast<std::ptrdiff_t>(n_), time_buf_.end(), d_hat.begin());
}

double Raec::CurrentScale(std::span<const double> e, std::span<const double> d_hat) const {
  if (ratio_history_.empty()) {
    return std::max(MedianAbs(e) * kMadToSigma, kScaleFloor);
  }
  const double held = *std::min_element(ratio_history_.begin(), ratio_history_.end());
  return std::max(held * (Rms(d_hat) + kLevelFloor), kScaleFloor);
}

void Raec::UpdateScale(std::span<const double> e, std::span<const double> d_hat) {
  const double ratio = MedianAbs(e) * kMadToSigma / (Rms(d_hat) + kLevelFloor);
  const double a = params_.psd_smoothing;
  ratio_smoothed_ = ratio_init_ ? a * ratio_smoothed_ + (1.0 - a) * ratio : ratio;
  ratio_init_ = true;
  ratio_history_.push_back(ratio_smoothed_);
  if (ratio_history_.size() > hold_blocks_) ratio_history_.pop_front();
}

void Raec::UpdateBinScale() {
  const double a = params_.psd_smoothing;
  for (std::size_t k = 0; k < bins_; ++k) {
    const double p = bin_error_[k];
    double& s = bin_scale_[k];
    if (!bin_scale_init_) {
      s = p;
    } else if (p < s) {
      s = a * s + (1.0 - a) * p;
    } else {
      s = std::min(p, s * bin_scale_rise_);
    }
  }
  bin_scale_init_ = true;
}

void Raec::Process(std::span<const double> x, std::span<const double> y, std::span<double> e,
                   std::span<double> d_hat) {
  if (x.size() != n_ || y.size() != n_ || e.size() != n_ || d_hat.size() != n_) {
    throw ShapeError("Raec::Process: blocks must be " + std::to_string(n_) + " samples");
  }
  if (!AllFinite(x) || !AllFinite(y)) throw InputError("Raec::Process: non-finite input");

  // Far-end spectrum of [previous block, current block].
  std::copy(x_prev_.begin(), x_prev_.end(), time_buf_.begin());
  std::copy(x.begin(), x.end(), time_buf_.begin() + static_cast<std::ptrdiff_t>(n_));
  std::copy(x.begin(), x.end(), x_prev_.begin());
  far_history_.pop_back();
  far_history_.emplace_front(bins_);
  fft_.Forward(time_buf_, far_history_.front());

  const double a = params_.psd_smoothing;
  const auto& x_now = far_history_.front();
  for (std::size_t k = 0; k < bins_; ++k) {
    const double p = std::norm(x_now[k]);
    far_psd_[k] = far_psd_init_ ? a * far_psd_[k] + (1.0 - a) * p : p;
  }
  far_psd_init_ = true;

  Filter(d_hat);
  for (std::size_t i = 0; i < n_; ++i) e[i] = y[i] - d_hat[i];
  ++blocks_;
  if (!adapt_) return;

  scale_ = CurrentScale(e, d_hat);

  std::vector<double> norm(bins_);
  const double m = static_cast<double>(params_.num_partitions);
  for (std::size_t k = 0; k < bins_; ++k) {
    double total = 0.0;
    for (const auto& xp : far_history_) total += std::norm(xp[k]);
    norm[k] = std::max(m * far_psd_[k], total) + kRegularizer;
  }

  std::vector<double> err(e.begin(), e.end());
  std::vector<double> est(n_);
  std::vector<Complex> err_spec(bins_);
  std::vector<Complex> clipped_spec(bins_);
  std::vector<double> error_power(bins_);
  std::vector<double> scale(bins_);
  for (std::size_t it = 0; it < params_.num_iterations; ++it) {
    if (it > 0) {
      Filter(est);
      for (std::size_t i = 0; i < n_; ++i) err[i] = y[i] - est[i];
    }
    std::fill(time_buf_.begin(), time_buf_.begin() + static_cast<std::ptrdiff_t>(n_), 0.0);
    std::copy(err.begin(), err.end(), time_buf_.begin() + static_cast<std::ptrdiff_t>(n_));
    fft_.Forward(time_buf_, err_spec);
    for (std::size_t k = 0; k < bins_; ++k) {
      error_power[k] = std::norm(err_spec[k]) / norm[k];
      if (it == 0) bin_error_[k] = error_power[k];
      scale[k] = std::max(bin_scale_init_ ? bin_scale_[k] : bin_error_[k], kBinScaleFloor);
    }
    const auto steps = RobustStepSize(error_power, scale, params_);
    const auto clipped = ErrorRecoveryNonlinearity(err, scale_, params_);
    std::copy(clipped.begin(), clipped.end(), time_buf_.begin() + static_cast<std::ptrdiff_t>(n_));
    fft_.Forward(time_buf_, clipped_spec);

    for (std::size_t p = 0; p < params_.num_partitions; ++p) {
      const auto& xp = far_history_[p];
      for (std::size_t k = 0; k < bins_; ++k) {
        grad_buf_[k] = steps[k] * std::conj(xp[k]) * clipped_spec[k] / norm[k];
      }
      // Gradient constraint: keep the causal first half only.
      fft_.Inverse(grad_buf_, time_buf_);
      std::fill(time_buf_.begin() + static_cast<std::ptrdiff_t>(n_), time_buf_.end(), 0.0);
      fft_.Forward(time_buf_, grad_buf_);
      auto& w = weights_[p];
      for (std::size_t k = 0; k < bins_; ++k) w[k] += grad_buf_[k];
    }
  }
  UpdateScale(e, d_hat);
  UpdateBinScale();
}

std::vector<double> Raec::TimeDomainWeights() const {
  std::vector<double> taps(params_.num_partitions * n_);
  std::vector<double> t(2 * n_);
  RealFft fft(2 * n_);
  for (std::size_t p = 0; p < params_.num_partitions; ++p) {
    fft.Inverse(weights_[p], t);
    std::copy(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(n_),
              taps.begin() + static_cast<std::ptrdiff_t>(p * n_));
  }
  return taps;
}

RaecCascade::RaecCascade(const RaecParams& stage1, const RaecParams& stage2, int sample_rate)
    : stage1_(stage1, sample_rate), stage2_(stage2, sample_rate) {}

void RaecCascade::RunStage(Raec& stage, std::span<const double> x, std::span<const double> y,
                           std::vector<double>& e, std::vector<double>& d_hat) {
  const std::size_t n = stage.params().frame_size;
  const std::size_t total = x.size();
  e.assign(total, 0.0);
  d_hat.assign(total, 0.0);
  std::vector<double> xb(n), yb(n), eb(n), db(n);
  for (std::size_t start = 0; start < total; start += n) {
    const std::size_t len = std::min(n, total - start);
    std::fill(xb.begin(), xb.end(), 0.0);
    std::fill(yb.begin(), yb.end(), 0.0);
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(start), len, xb.begin());
    std::copy_n(y.begin() + static_cast<std::ptrdiff_t>(start), len, yb.begin());
    stage.Process(xb, yb, eb, db);
    std::copy_n(eb.begin(), len, e.begin() + static_cast<std::ptrdiff_t>(start));
    std::copy_n(db.begin(), len, d_hat.begin() + static_cast<std::ptrdiff_t>(start));
  }
}

void RaecCascade::Run(std::span<const double> x, std::span<const double> y,
                      std::vector<double>& e, std::vector<double>& d_hat) {
  if (x.size() != y.size()) throw ShapeError("RaecCascade::Run: x and y lengths differ");
  std::vector<double> e1, d1, d2;
  RunStage(stage1_, x, y, e1, d1);
  RunStage(stage2_, x, e1, e, d2);
  d_hat.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) d_hat[i] = y[i] - e[i];
}

std::vector<double> RaecCascade::TimeDomainWeights() const {
  auto w1 = stage1_.TimeDomainWeights();
  const auto w2 = stage2_.TimeDomainWeights();
  if (w2.size() > w1.size()) w1.resize(w2.size(), 0.0);
  for (std::size_t i = 0; i < w2.size(); ++i) w1[i] += w2[i];
  return w1;
}

double NormalizedMisalignmentDb(std::span<const double> true_path,
                                std::span<const double> estimate) {
  double num = 0.0;
  for (std::size_t i = 0; i < true_path.size(); ++i) {
    const double w = i < estimate.size() ? estimate[i] : 0.0;
    num += (true_path[i] - w) * (true_path[i] - w);
  }
  for (std::size_t i = true_path.size(); i < estimate.size(); ++i) num += estimate[i] * estimate[i];
  const double den = Energy(true_path);
  if (den <= 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(std::max(num, 1e-300) / den);
}

}  // namespace echoforge
