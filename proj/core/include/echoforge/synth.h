#ifndef ECHOFORGE_SYNTH_H_
#define ECHOFORGE_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "echoforge/random.h"

// Synthetic source material. The corpus generator only mixes files; these
// generators provide stand-ins for speech, music, noise and impulse
// responses so the whole system can be exercised without copyrighted data.
namespace echoforge::synth {

std::vector<double> WhiteNoise(std::size_t n, Rng& rng, double rms = 1.0);

// -3 dB/octave noise from a pole-zero filter bank (Kellett's refined
// approximation) driven by Gaussian white noise, scaled to `rms`.
std::vector<double> PinkNoise(std::size_t n, Rng& rng, double rms = 1.0);

// Stationary noise with a long-term speech-like spectrum (high-passed at
// 100 Hz, rolling off above ~700 Hz).
std::vector<double> SpeechShapedNoise(std::size_t n, int sample_rate, Rng& rng, double rms);

// Syllabic voiced/unvoiced signal with formant structure and pauses.
std::vector<double> SpeechLike(std::size_t n, int sample_rate, Rng& rng, double rms);

// Like SpeechLike but speech over the whole extent, no pauses.
std::vector<double> ContinuousSpeechLike(std::size_t n, int sample_rate, Rng& rng, double rms);

// Harmonic chords, bass line and percussive bursts; continuous.
std::vector<double> MusicLike(std::size_t n, int sample_rate, Rng& rng, double rms);

std::vector<double> Babble(std::size_t n, int sample_rate, Rng& rng, double rms,
                           int talkers = 6);

// Low-frequency rumble, mains hum harmonics and periodic impacts.
std::vector<double> FactoryNoise(std::size_t n, int sample_rate, Rng& rng, double rms);

// Exponentially decaying noise tail behind a direct path at `delay`
// samples. `drr_db` is the direct-to-reverberant energy ratio. Unit energy.
std::vector<double> ImpulseResponse(std::size_t taps, int sample_rate, double rt60_seconds,
                                    std::size_t delay, double drr_db, Rng& rng);

// Writes a self-contained demo source set plus `corpus.cfg` referencing it:
// speech, five music tracks, babble and factory noise, six room and six
// loudspeaker-to-microphone impulse responses (float32 WAV). Returns the
// path of the corpus spec file.
std::filesystem::path WriteDemoSources(const std::filesystem::path& dir, std::uint64_t seed,
                                       int sample_rate = 16000);

}  // namespace echoforge::synth

#endif  // ECHOFORGE_SYNTH_H_
