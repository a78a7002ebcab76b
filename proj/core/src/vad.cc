#include "echoforge/vad.h"

#include <algorithm>
#include <cmath>

#include "echoforge/errors.h"

namespace echoforge {

void VadParams::Validate() const {
  if (std::isnan(eta) || std::isinf(eta)) throw ConfigError("vad.eta must be finite", "vad.eta");
}

double VadStatistic(std::span<const double> xi, std::span<const double> gamma) {
  if (xi.size() != gamma.size()) throw ShapeError("VadStatistic: length mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < xi.size(); ++k) {
    sum += gamma[k] * xi[k] / (1.0 + xi[k]) - std::log1p(xi[k]);
  }
  return sum;
}

VoiceActivityDetector::VoiceActivityDetector(const VadParams& params)
    : eta_((params.Validate(), params.eta)),
      hangover_(params.hangover_frames) {}

bool VoiceActivityDetector::Decide(double statistic) {
  last_ = statistic;
  if (statistic > eta_) {
    remaining_ = hangover_;
    return true;
  }
  if (remaining_ > 0) {
    --remaining_;
    return true;
  }
  return false;
}

std::vector<Segment> FramesToSegments(const std::vector<bool>& active, std::size_t hop,
                                      std::size_t frame_len, std::size_t num_samples) {
  std::vector<Segment> out;
  std::size_t m = 0;
  while (m < active.size()) {
    if (!active[m]) {
      ++m;
      continue;
    }
    std::size_t last = m;
    while (last + 1 < active.size() && active[last + 1]) ++last;
    Segment s;
    s.start = std::min(m * hop, num_samples);
    s.end = std::min(last * hop + frame_len, num_samples);
    if (s.end > s.start) out.push_back(s);
    m = last + 1;
  }
  return out;
}

}  // namespace echoforge
