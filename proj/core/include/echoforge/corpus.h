#ifndef ECHOFORGE_CORPUS_H_
#define ECHOFORGE_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "echoforge/audio.h"

namespace echoforge {

class Config;

// Scales an impulse response to unit energy. Throws InputError if silent.
AudioBuffer NormalizeIr(const AudioBuffer& ir);

// Full linear convolution, length a.size() + b.size() - 1 (FFT based).
std::vector<double> Convolve(std::span<const double> a, std::span<const double> b);

// sigma with 10 log10(E_s / (sigma^2 E_d)) = ser_db, energies over the full
// extent. Throws InputError if either signal is silent.
double GainForSer(std::span<const double> s, std::span<const double> d, double ser_db);
double GainForSnr(std::span<const double> s, std::span<const double> v, double snr_db);

struct CorpusSpec {
  std::vector<std::filesystem::path> speech;
  std::vector<std::filesystem::path> music;
  // Background noise lists keyed by type ("babble", "factory", "music").
  std::map<std::string, std::vector<std::filesystem::path>> noise;
  std::vector<std::filesystem::path> irs;       // speech room responses
  std::vector<std::filesystem::path> echo_irs;  // loudspeaker paths; irs if empty
  std::pair<double, double> ser_db{-15.0, -10.0};
  std::pair<double, double> snr_db{-10.0, 10.0};
  double sigma3 = 0.1;
  double pink_rms = 0.01;  // level of v3 before sigma3
  std::uint64_t seed = 1;
  std::filesystem::path output_dir;

  // Reads corpus.* keys (speech, music, noise.<type>, irs, echo_irs,
  // ser_db, snr_db, sigma3, pink_rms, seed, output). Paths resolve
  // against the config file.
  static CorpusSpec FromConfig(Config& config);
  // Throws ConfigError naming the key.
  void Validate() const;
};

struct MixtureRecipe {
  std::string id;
  std::filesystem::path speech;
  std::filesystem::path music;
  std::size_t music_offset = 0;
  std::string noise_type;
  std::filesystem::path noise;
  std::size_t noise_offset = 0;
  std::size_t speech_ir = 0;
  std::size_t echo_ir = 0;
  std::filesystem::path speech_ir_path;
  std::filesystem::path echo_ir_path;
  double ser_db = 0.0;
  double snr_db = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double sigma3 = 0.0;
  double pink_rms = 0.01;
  std::uint64_t seed = 0;
};

struct MixedItem {
  AudioBuffer mix;        // y = s + sigma1 d + sigma2 v2 + sigma3 v3
  AudioBuffer speech;     // s, reverberant near-end speech
  AudioBuffer reference;  // x, dry far-end music
  AudioBuffer dry_speech;
  AudioBuffer echo;       // sigma1 d
  AudioBuffer noise;      // sigma2 v2
  AudioBuffer floor;      // sigma3 v3
};

// Draws n recipes (files, offsets, IRs, SER, SNR) from the master seed.
// Item i depends only on (spec, seed, i). sigma1/sigma2 are zero until
// MixItem computes them. Throws ConfigError if sources are too short.
std::vector<MixtureRecipe> PlanCorpus(const CorpusSpec& spec, std::size_t n_items);

// Builds the signals for one recipe and fills in sigma1 and sigma2.
// Throws IoError naming a missing file.
MixedItem MixItem(MixtureRecipe& recipe);

// Plans, mixes and writes <id>.{mix,speech,ref,dry,echo,noise,floor}.wav
// plus manifest.json into spec.output_dir.
std::vector<MixtureRecipe> GenerateCorpus(const CorpusSpec& spec, std::size_t n_items);

struct ManifestItem {
  MixtureRecipe recipe;
  std::filesystem::path mix, speech, reference, dry_speech, echo, noise, floor;
};

struct Manifest {
  std::filesystem::path dir;
  int sample_rate = kDefaultSampleRate;
  std::uint64_t seed = 0;
  std::vector<ManifestItem> items;
};

// Paths in the file are relative to its directory; the loaded paths are
// resolved.
void WriteManifest(const std::filesystem::path& path, const Manifest& manifest);
Manifest LoadManifest(const std::filesystem::path& path);

}  // namespace echoforge

#endif  // ECHOFORGE_CORPUS_H_
