#include <cmath>

#include "doctest.h"
#include "echoforge/errors.h"
#include "echoforge/metrics.h"
#include "echoforge/random.h"
#include "echoforge/synth.h"

using namespace echoforge;
using namespace echoforge::synth;

TEST_CASE("erle per window") {
  const std::vector<double> mic{1, 1, 1, 1, 2, 2};
  const std::vector<double> enh{0.1, 0.1, 0.1, 0.1, 2, 2};
  const auto erle = ErleDb(mic, enh, 4);
  REQUIRE(erle.size() == 2);
  CHECK(erle[0] == doctest::Approx(20.0));
  CHECK(erle[1] == doctest::Approx(0.0));
  CHECK(ErleDb(std::vector<double>(4, 0.0), std::vector<double>(4, 0.0), 4)[0] == 0.0);
  CHECK(ErleDb(std::vector<double>(4, 1.0), std::vector<double>(4, 0.0), 4)[0] == kErleCeilingDb);
  CHECK_THROWS_AS(ErleDb(mic, std::vector<double>(5), 4), ShapeError);
  CHECK_THROWS_AS(ErleDb(mic, enh, 0), InputError);
}

TEST_CASE("segmental snr by hand") {
  // Frame 0: 4 / 1 -> 10 log10 4. Frame 1 is 60 dB below and gated out.
  const std::vector<double> clean{1, 1, 1, 1, 1e-3, 1e-3, 1e-3, 1e-3};
  const std::vector<double> test{1, 1, 1, 0, 0, 0, 0, 0};
  CHECK(SegmentalSnrDb(clean, test, 4) == doctest::Approx(10.0 * std::log10(4.0)));
  // Exact match reads the ceiling, a silent test signal reads 0 dB.
  CHECK(SegmentalSnrDb(clean, clean, 4) == kSegSnrCeilingDb);
  CHECK(SegmentalSnrDb(clean, std::vector<double>(8, 0.0), 4) == doctest::Approx(0.0));
  // Heavy distortion bottoms out at the floor.
  std::vector<double> loud(8, -300.0);
  CHECK(SegmentalSnrDb(clean, loud, 4) == kSegSnrFloorDb);
}

TEST_CASE("improvement is zero for an untouched mixture and capped for a perfect one") {
  Rng rng(1);
  const auto clean = SpeechLike(16000, 16000, rng, 0.1);
  const auto noise = WhiteNoise(16000, rng, 0.1);
  std::vector<double> mix(clean.size());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = clean[i] + noise[i];
  CHECK(SegmentalSnrImprovementDb(clean, mix, mix) == 0.0);
  CHECK(SegmentalSnrImprovementDb(clean, mix, clean) == kSegSnrImprovementLimitDb);
  // Halving the noise helps by at most 10 log10 4 per frame.
  std::vector<double> half(mix.size());
  for (std::size_t i = 0; i < mix.size(); ++i) half[i] = clean[i] + 0.5 * noise[i];
  const double gain = SegmentalSnrImprovementDb(clean, mix, half);
  CHECK(gain > 0.0);
  CHECK(gain <= 10.0 * std::log10(4.0) + 1e-9);
}
