#ifndef ECHOFORGE_METRICS_H_
#define ECHOFORGE_METRICS_H_

#include <cstddef>
#include <span>
#include <vector>

namespace echoforge {

inline constexpr double kErleCeilingDb = 80.0;
inline constexpr double kSegSnrFloorDb = -20.0;
inline constexpr double kSegSnrCeilingDb = 60.0;
inline constexpr double kSegSnrImprovementLimitDb = 40.0;

// 10 log10(sum mic^2 / sum enhanced^2) over consecutive windows of
// `window` samples (the last one may be shorter). Clamped at +80 dB; a
// window where both signals are silent reads 0 dB.
std::vector<double> ErleDb(std::span<const double> mic, std::span<const double> enhanced,
                           std::size_t window);

// Energy ratio in dB over the whole extent, same clamping as ErleDb.
double EnergyRatioDb(std::span<const double> num, std::span<const double> den);

// Mean over frames of 10 log10(sum s^2 / sum (s - t)^2), each frame
// clamped to [-20, 60] dB. Frames in which the clean reference is more
// than 40 dB below its loudest frame are skipped. Frames are `frame_len`
// samples, non-overlapping. Returns the ceiling for an all-silent
// reference.
double SegmentalSnrDb(std::span<const double> clean, std::span<const double> test,
                      std::size_t frame_len = 256);

// SegmentalSnrDb(clean, enhanced) - SegmentalSnrDb(clean, mixture), clamped
// to +-40 dB.
double SegmentalSnrImprovementDb(std::span<const double> clean, std::span<const double> mixture,
                                 std::span<const double> enhanced, std::size_t frame_len = 256);

}  // namespace echoforge

#endif  // ECHOFORGE_METRICS_H_
