#ifndef ECHOFORGE_VAD_H_
#define ECHOFORGE_VAD_H_

#include <cstddef>
#include <span>
#include <vector>

namespace echoforge {

struct VadParams {
  // Threshold on the summed log likelihood ratio; 0.15 per bin at 257 bins.
  double eta = 0.15 * 257;
  std::size_t hangover_frames = 8;

  void Validate() const;
};

// Lambda = sum_k [gamma_k xi_k / (1 + xi_k) - log(1 + xi_k)]
double VadStatistic(std::span<const double> xi, std::span<const double> gamma);

struct Segment {
  std::size_t start = 0;  // first sample
  std::size_t end = 0;    // one past the last sample
};

class VoiceActivityDetector {
 public:
  explicit VoiceActivityDetector(const VadParams& params);

  // Raw decision Lambda > eta, held for hangover_frames after the last raw
  // active frame.
  bool Decide(double statistic);
  bool Update(std::span<const double> xi, std::span<const double> gamma) {
    return Decide(VadStatistic(xi, gamma));
  }

  double eta() const { return eta_; }
  double last_statistic() const { return last_; }

 private:
  double eta_;
  std::size_t hangover_;
  std::size_t remaining_ = 0;
  double last_ = 0.0;
};

// Merges runs of active frames into sample ranges. Frame m covers
// [m * hop, m * hop + frame_len), clipped to `num_samples`.
std::vector<Segment> FramesToSegments(const std::vector<bool>& active, std::size_t hop,
                                      std::size_t frame_len, std::size_t num_samples);

}  // namespace echoforge

#endif  // ECHOFORGE_VAD_H_
