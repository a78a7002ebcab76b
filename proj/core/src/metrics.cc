#include "echoforge/metrics.h"

#include <algorithm>
#include <cmath>

#include "echoforge/errors.h"

namespace echoforge {
namespace {

constexpr double kActivityRangeDb = 40.0;

double RatioDb(double num, double den) {
  if (den <= 0.0) return num <= 0.0 ? 0.0 : kErleCeilingDb;
  if (num <= 0.0) return -kErleCeilingDb;
  return std::clamp(10.0 * std::log10(num / den), -kErleCeilingDb, kErleCeilingDb);
}

double SumSquares(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc;
}

}  // namespace

std::vector<double> ErleDb(std::span<const double> mic, std::span<const double> enhanced,
                           std::size_t window) {
  if (mic.size() != enhanced.size()) throw ShapeError("ErleDb: length mismatch");
  if (window == 0) throw InputError("ErleDb: window must be positive");
  std::vector<double> out;
  for (std::size_t start = 0; start < mic.size(); start += window) {
    const std::size_t len = std::min(window, mic.size() - start);
    out.push_back(RatioDb(SumSquares(mic.subspan(start, len)),
                          SumSquares(enhanced.subspan(start, len))));
  }
  return out;
}

double EnergyRatioDb(std::span<const double> num, std::span<const double> den) {
  return RatioDb(SumSquares(num), SumSquares(den));
}

double SegmentalSnrDb(std::span<const double> clean, std::span<const double> test,
                      std::size_t frame_len) {
  if (clean.size() != test.size()) throw ShapeError("SegmentalSnrDb: length mismatch");
  if (frame_len == 0) throw InputError("SegmentalSnrDb: frame length must be positive");
  const std::size_t frames = clean.size() / frame_len;
  std::vector<double> signal(frames), noise(frames);
  double loudest = 0.0;
  for (std::size_t m = 0; m < frames; ++m) {
    double s2 = 0.0, n2 = 0.0;
    for (std::size_t i = m * frame_len; i < (m + 1) * frame_len; ++i) {
      const double d = clean[i] - test[i];
      s2 += clean[i] * clean[i];
      n2 += d * d;
    }
    signal[m] = s2;
    noise[m] = n2;
    loudest = std::max(loudest, s2);
  }
  if (loudest <= 0.0) return kSegSnrCeilingDb;
  const double gate = loudest * std::pow(10.0, -kActivityRangeDb / 10.0);
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t m = 0; m < frames; ++m) {
    if (signal[m] < gate) continue;
    const double snr = noise[m] <= 0.0 ? kSegSnrCeilingDb
                                       : 10.0 * std::log10(signal[m] / noise[m]);
    sum += std::clamp(snr, kSegSnrFloorDb, kSegSnrCeilingDb);
    ++counted;
  }
  return sum / static_cast<double>(counted);
}

double SegmentalSnrImprovementDb(std::span<const double> clean, std::span<const double> mixture,
                                 std::span<const double> enhanced, std::size_t frame_len) {
  const double d =
      SegmentalSnrDb(clean, enhanced, frame_len) - SegmentalSnrDb(clean, mixture, frame_len);
  return std::clamp(d, -kSegSnrImprovementLimitDb, kSegSnrImprovementLimitDb);
}

}  // namespace echoforge
