#include "echoforge/rpe.h"

#include <algorithm>
#include <cmath>

#include "echoforge/errors.h"

namespace echoforge {
namespace {

constexpr double kCouplingRegularizer = 1e-8;

}  // namespace

void RpeParams::Validate(const std::string& prefix) const {
  const auto field = [&](const char* name) { return prefix + "." + name; };
  if (partitions_high < 1) {
    throw ConfigError(field("partitions_high") + " must be >= 1", field("partitions_high"));
  }
  if (partitions_low < 1) {
    throw ConfigError(field("partitions_low") + " must be >= 1", field("partitions_low"));
  }
  if (!(alpha_high >= 0.0 && alpha_high < 1.0)) {
    throw ConfigError(field("alpha_high") + " must lie in [0, 1)", field("alpha_high"));
  }
  if (!(alpha_low >= 0.0 && alpha_low < 1.0)) {
    throw ConfigError(field("alpha_low") + " must lie in [0, 1)", field("alpha_low"));
  }
}

CoherenceEchoEstimator::CoherenceEchoEstimator(std::size_t partitions, double alpha,
                                               std::size_t num_bins)
    : partitions_(partitions),
      alpha_(alpha),
      num_bins_(num_bins),
      s_zx_(partitions, std::vector<Complex>(num_bins)),
      s_xx_(partitions, std::vector<double>(num_bins, 0.0)),
      power_(num_bins, 0.0) {
  for (std::size_t p = 0; p < partitions_; ++p) history_.emplace_back(num_bins, Complex{});
}

std::span<const double> CoherenceEchoEstimator::Update(std::span<const Complex> z,
                                                       std::span<const Complex> x) {
  if (z.size() != num_bins_ || x.size() != num_bins_) {
    throw ShapeError("residual echo estimator: frame length mismatch");
  }
  history_.pop_back();
  history_.emplace_front(x.begin(), x.end());

  const double a = init_ ? alpha_ : 0.0;
  init_ = true;
  std::fill(power_.begin(), power_.end(), 0.0);
  for (std::size_t p = 0; p < partitions_; ++p) {
    const auto& xp = history_[p];
    auto& s_zx = s_zx_[p];
    auto& s_xx = s_xx_[p];
    for (std::size_t k = 0; k < num_bins_; ++k) {
      const double x2 = std::norm(xp[k]);
      s_zx[k] = a * s_zx[k] + (1.0 - a) * z[k] * std::conj(xp[k]);
      s_xx[k] = a * s_xx[k] + (1.0 - a) * x2;
      const double coupling = std::norm(s_zx[k]) /
                              ((s_xx[k] + kCouplingRegularizer) * (s_xx[k] + kCouplingRegularizer));
      power_[k] += coupling * x2;
    }
  }
  return power_;
}

ResidualEchoEstimator::ResidualEchoEstimator(const RpeParams& params, std::size_t num_bins)
    : high_((params.Validate(), params.partitions_high), params.alpha_high, num_bins),
      low_(params.partitions_low, params.alpha_low, num_bins) {}

std::vector<double> CombineResidualPower(std::span<const double> high,
                                         std::span<const double> low, double p_dt) {
  if (!(p_dt >= 0.0 && p_dt <= 1.0)) {
    throw InputError("double-talk probability must lie in [0, 1]");
  }
  if (high.size() != low.size()) throw ShapeError("CombineResidualPower: length mismatch");
  std::vector<double> out(high.size());
  for (std::size_t k = 0; k < high.size(); ++k) {
    out[k] = (1.0 - p_dt) * high[k] + p_dt * low[k];
  }
  return out;
}

}  // namespace echoforge
