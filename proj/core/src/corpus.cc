#include "echoforge/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "echoforge/config.h"
#include "echoforge/errors.h"
#include "echoforge/fft.h"
#include "echoforge/log.h"
#include "echoforge/random.h"
#include "echoforge/synth.h"

namespace echoforge {
namespace fs = std::filesystem;
namespace {

class SourceCache {
 public:
  const AudioBuffer& Get(const fs::path& path) {
    auto it = cache_.find(path.lexically_normal().string());
    if (it != cache_.end()) return it->second;
    if (!fs::exists(path)) throw IoError("missing source file " + path.string(), path.string());
    auto [pos, ok] = cache_.emplace(path.lexically_normal().string(), ReadWav(path));
    ValidateAudio(pos->second, path.string().c_str());
    return pos->second;
  }

 private:
  std::map<std::string, AudioBuffer> cache_;
};

const std::vector<fs::path>& EchoIrs(const CorpusSpec& spec) {
  return spec.echo_irs.empty() ? spec.irs : spec.echo_irs;
}

std::vector<double> Scaled(std::span<const double> v, double g) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = g * v[i];
  return out;
}

MixedItem Mix(MixtureRecipe& r, SourceCache& cache) {
  const AudioBuffer& speech = cache.Get(r.speech);
  const AudioBuffer& music = cache.Get(r.music);
  const AudioBuffer& noise = cache.Get(r.noise);
  const AudioBuffer speech_ir = NormalizeIr(cache.Get(r.speech_ir_path));
  const AudioBuffer echo_ir = NormalizeIr(cache.Get(r.echo_ir_path));
  const int fs_hz = speech.sample_rate;
  for (const AudioBuffer* b : {&music, &noise, &speech_ir, &echo_ir}) {
    if (b->sample_rate != fs_hz) {
      throw InputError("corpus item " + r.id + ": sources disagree on the sample rate");
    }
  }
  const std::size_t len = speech.size();
  const std::size_t taps = echo_ir.size();
  if (r.music_offset + 1 < taps || r.music_offset + len > music.size()) {
    throw ConfigError("corpus item " + r.id + ": music offset out of range", "corpus.music");
  }
  if (r.noise_offset + len > noise.size()) {
    throw ConfigError("corpus item " + r.id + ": noise offset out of range", "corpus.noise");
  }

  MixedItem item;
  item.dry_speech = speech;
  auto s = Convolve(speech.samples, speech_ir.samples);
  s.resize(len);
  item.speech = AudioBuffer(std::move(s), fs_hz);

  // The echo at the first sample already carries music played before the
  // excerpt starts.
  const auto segment =
      std::span<const double>(music.samples).subspan(r.music_offset + 1 - taps, len + taps - 1);
  auto d = Convolve(segment, echo_ir.samples);
  std::vector<double> echo(d.begin() + static_cast<std::ptrdiff_t>(taps - 1),
                           d.begin() + static_cast<std::ptrdiff_t>(taps - 1 + len));
  item.reference = AudioBuffer(
      std::vector<double>(music.samples.begin() + static_cast<std::ptrdiff_t>(r.music_offset),
                          music.samples.begin() + static_cast<std::ptrdiff_t>(r.music_offset + len)),
      fs_hz);
  const std::span<const double> v2(noise.samples.data() + r.noise_offset, len);

  r.sigma1 = GainForSer(item.speech.samples, echo, r.ser_db);
  r.sigma2 = GainForSnr(item.speech.samples, v2, r.snr_db);

  Rng pink_rng(DeriveSeed(r.seed, 1));
  const auto v3 = synth::PinkNoise(len, pink_rng, r.pink_rms);

  item.echo = AudioBuffer(Scaled(echo, r.sigma1), fs_hz);
  item.noise = AudioBuffer(Scaled(v2, r.sigma2), fs_hz);
  item.floor = AudioBuffer(Scaled(v3, r.sigma3), fs_hz);
  item.mix = AudioBuffer(len, fs_hz);
  for (std::size_t i = 0; i < len; ++i) {
    item.mix.samples[i] = item.speech.samples[i] + item.echo.samples[i] +
                          item.noise.samples[i] + item.floor.samples[i];
  }
  return item;
}

std::string Relative(const fs::path& p, const fs::path& base) {
  const fs::path abs = fs::absolute(p).lexically_normal();
  const fs::path rel = abs.lexically_relative(fs::absolute(base).lexically_normal());
  return (rel.empty() ? abs : rel).generic_string();
}

fs::path Resolve(const std::string& s, const fs::path& base) {
  fs::path p(s);
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

}  // namespace

AudioBuffer NormalizeIr(const AudioBuffer& ir) {
  const double e = Energy(ir.samples);
  if (!(e > 0.0)) throw InputError("impulse response is silent");
  const double g = 1.0 / std::sqrt(e);
  return AudioBuffer(Scaled(ir.samples, g), ir.sample_rate);
}

std::vector<double> Convolve(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  std::size_t n = 1;
  while (n < out_len) n <<= 1;
  RealFft fft(n);
  std::vector<double> ta(n, 0.0), tb(n, 0.0);
  std::copy(a.begin(), a.end(), ta.begin());
  std::copy(b.begin(), b.end(), tb.begin());
  std::vector<Complex> fa(fft.num_bins()), fb(fft.num_bins());
  fft.Forward(ta, fa);
  fft.Forward(tb, fb);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  fft.Inverse(fa, ta);
  ta.resize(out_len);
  return ta;
}

double GainForSer(std::span<const double> s, std::span<const double> d, double ser_db) {
  const double es = Energy(s);
  const double ed = Energy(d);
  if (!(es > 0.0)) throw InputError("speech signal is silent");
  if (!(ed > 0.0)) throw InputError("interference signal is silent");
  return std::sqrt(es / ed) * std::pow(10.0, -ser_db / 20.0);
}

double GainForSnr(std::span<const double> s, std::span<const double> v, double snr_db) {
  return GainForSer(s, v, snr_db);
}

CorpusSpec CorpusSpec::FromConfig(Config& config) {
  CorpusSpec spec;
  spec.speech = config.GetPathList("corpus.speech");
  spec.music = config.GetPathList("corpus.music");
  for (const auto& key : config.KeysWithPrefix("corpus.noise.")) {
    spec.noise[key.substr(std::string("corpus.noise.").size())] = config.GetPathList(key);
  }
  spec.irs = config.GetPathList("corpus.irs");
  spec.echo_irs = config.GetPathList("corpus.echo_irs");
  if (auto r = config.GetRange("corpus.ser_db")) spec.ser_db = *r;
  if (auto r = config.GetRange("corpus.snr_db")) spec.snr_db = *r;
  spec.sigma3 = config.GetDouble("corpus.sigma3", spec.sigma3);
  spec.pink_rms = config.GetDouble("corpus.pink_rms", spec.pink_rms);
  spec.seed = config.GetUint64("corpus.seed", spec.seed);
  spec.output_dir = config.GetPath("corpus.output");
  return spec;
}

void CorpusSpec::Validate() const {
  if (speech.empty()) throw ConfigError("corpus.speech lists no files", "corpus.speech");
  if (music.empty()) throw ConfigError("corpus.music lists no files", "corpus.music");
  if (irs.empty()) throw ConfigError("corpus.irs lists no files", "corpus.irs");
  bool any_noise = false;
  for (const auto& [type, files] : noise) any_noise = any_noise || !files.empty();
  if (!any_noise) throw ConfigError("no corpus.noise.<type> list has files", "corpus.noise");
  if (!(ser_db.first <= ser_db.second)) {
    throw ConfigError("corpus.ser_db must satisfy lo <= hi", "corpus.ser_db");
  }
  if (!(snr_db.first <= snr_db.second)) {
    throw ConfigError("corpus.snr_db must satisfy lo <= hi", "corpus.snr_db");
  }
  if (!(sigma3 >= 0.0)) throw ConfigError("corpus.sigma3 must be >= 0", "corpus.sigma3");
  if (!(pink_rms > 0.0)) throw ConfigError("corpus.pink_rms must be > 0", "corpus.pink_rms");
}

std::vector<MixtureRecipe> PlanCorpus(const CorpusSpec& spec, std::size_t n_items) {
  spec.Validate();
  std::vector<MixtureRecipe> recipes;
  if (n_items == 0) return recipes;
  SourceCache cache;
  std::vector<std::string> types;
  for (const auto& [type, files] : spec.noise) {
    if (!files.empty()) types.push_back(type);
  }
  const auto& echo_irs = EchoIrs(spec);

  for (std::size_t i = 0; i < n_items; ++i) {
    MixtureRecipe r;
    r.id = fmt::format("item{:05d}", i);
    r.seed = DeriveSeed(spec.seed, i);
    Rng rng(r.seed);
    r.speech = spec.speech[rng.Index(spec.speech.size())];
    r.music = spec.music[rng.Index(spec.music.size())];
    r.noise_type = types[rng.Index(types.size())];
    const auto& noise_files = spec.noise.at(r.noise_type);
    r.noise = noise_files[rng.Index(noise_files.size())];
    r.speech_ir = rng.Index(spec.irs.size());
    r.echo_ir = rng.Index(echo_irs.size());
    r.speech_ir_path = spec.irs[r.speech_ir];
    r.echo_ir_path = echo_irs[r.echo_ir];
    r.ser_db = rng.Uniform(spec.ser_db.first, spec.ser_db.second);
    r.snr_db = rng.Uniform(spec.snr_db.first, spec.snr_db.second);
    r.sigma3 = spec.sigma3;
    r.pink_rms = spec.pink_rms;

    const std::size_t len = cache.Get(r.speech).size();
    const std::size_t taps = cache.Get(r.echo_ir_path).size();
    const std::size_t music_len = cache.Get(r.music).size();
    const std::size_t noise_len = cache.Get(r.noise).size();
    if (music_len + 1 < len + taps) {
      throw ConfigError(fmt::format("music file {} is shorter than speech plus echo path ({} < {})",
                                    r.music.string(), music_len, len + taps - 1),
                        "corpus.music");
    }
    if (noise_len < len) {
      throw ConfigError(fmt::format("noise file {} is shorter than speech file {}",
                                    r.noise.string(), r.speech.string()),
                        "corpus.noise." + r.noise_type);
    }
    r.music_offset = taps - 1 + rng.Index(music_len + 2 - len - taps);
    r.noise_offset = rng.Index(noise_len - len + 1);
    recipes.push_back(std::move(r));
  }
  return recipes;
}

MixedItem MixItem(MixtureRecipe& recipe) {
  SourceCache cache;
  return Mix(recipe, cache);
}

std::vector<MixtureRecipe> GenerateCorpus(const CorpusSpec& spec, std::size_t n_items) {
  auto recipes = PlanCorpus(spec, n_items);
  const fs::path dir = spec.output_dir.empty() ? fs::path(".") : spec.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string(), dir.string());

  Manifest manifest;
  manifest.dir = dir;
  manifest.seed = spec.seed;
  SourceCache cache;
  for (auto& r : recipes) {
    MixedItem item = Mix(r, cache);
    manifest.sample_rate = item.mix.sample_rate;
    ManifestItem m;
    m.mix = dir / (r.id + ".mix.wav");
    m.speech = dir / (r.id + ".speech.wav");
    m.reference = dir / (r.id + ".ref.wav");
    m.dry_speech = dir / (r.id + ".dry.wav");
    m.echo = dir / (r.id + ".echo.wav");
    m.noise = dir / (r.id + ".noise.wav");
    m.floor = dir / (r.id + ".floor.wav");
    WriteWav(m.mix, item.mix, SampleFormat::kFloat32);
    WriteWav(m.speech, item.speech, SampleFormat::kFloat32);
    WriteWav(m.reference, item.reference, SampleFormat::kFloat32);
    WriteWav(m.dry_speech, item.dry_speech, SampleFormat::kFloat32);
    WriteWav(m.echo, item.echo, SampleFormat::kFloat32);
    WriteWav(m.noise, item.noise, SampleFormat::kFloat32);
    WriteWav(m.floor, item.floor, SampleFormat::kFloat32);
    m.recipe = r;
    manifest.items.push_back(std::move(m));
    log::Debug("corpus: wrote {} (SER {:.2f} dB, SNR {:.2f} dB, {})", r.id, r.ser_db, r.snr_db,
               r.noise_type);
  }
  WriteManifest(dir / "manifest.json", manifest);
  return recipes;
}

void WriteManifest(const fs::path& path, const Manifest& manifest) {
  const fs::path base = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  nlohmann::json items = nlohmann::json::array();
  for (const auto& m : manifest.items) {
    const auto& r = m.recipe;
    items.push_back({
        {"id", r.id},
        {"files",
         {{"mix", Relative(m.mix, base)},
          {"speech", Relative(m.speech, base)},
          {"ref", Relative(m.reference, base)},
          {"dry", Relative(m.dry_speech, base)},
          {"echo", Relative(m.echo, base)},
          {"noise", Relative(m.noise, base)},
          {"floor", Relative(m.floor, base)}}},
        {"recipe",
         {{"speech", Relative(r.speech, base)},
          {"music", Relative(r.music, base)},
          {"music_offset", r.music_offset},
          {"noise_type", r.noise_type},
          {"noise", Relative(r.noise, base)},
          {"noise_offset", r.noise_offset},
          {"speech_ir", r.speech_ir},
          {"speech_ir_path", Relative(r.speech_ir_path, base)},
          {"echo_ir", r.echo_ir},
          {"echo_ir_path", Relative(r.echo_ir_path, base)},
          {"ser_db", r.ser_db},
          {"snr_db", r.snr_db},
          {"sigma1", r.sigma1},
          {"sigma2", r.sigma2},
          {"sigma3", r.sigma3},
          {"pink_rms", r.pink_rms},
          {"seed", r.seed}}},
    });
  }
  nlohmann::json doc = {{"format", "echoforge-corpus"},
                        {"version", 1},
                        {"sample_rate", manifest.sample_rate},
                        {"seed", manifest.seed},
                        {"items", items}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest " + path.string(), path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing manifest " + path.string(), path.string());
}

Manifest LoadManifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest " + path.string(), path.string());
  Manifest manifest;
  manifest.dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  try {
    const auto doc = nlohmann::json::parse(in);
    manifest.sample_rate = doc.value("sample_rate", kDefaultSampleRate);
    manifest.seed = doc.value("seed", std::uint64_t{0});
    const fs::path& base = manifest.dir;
    for (const auto& j : doc.at("items")) {
      ManifestItem m;
      const auto& f = j.at("files");
      m.mix = Resolve(f.at("mix").get<std::string>(), base);
      m.speech = Resolve(f.at("speech").get<std::string>(), base);
      m.reference = Resolve(f.at("ref").get<std::string>(), base);
      if (f.contains("dry")) m.dry_speech = Resolve(f.at("dry").get<std::string>(), base);
      if (f.contains("echo")) m.echo = Resolve(f.at("echo").get<std::string>(), base);
      if (f.contains("noise")) m.noise = Resolve(f.at("noise").get<std::string>(), base);
      if (f.contains("floor")) m.floor = Resolve(f.at("floor").get<std::string>(), base);
      auto& r = m.recipe;
      r.id = j.at("id").get<std::string>();
      if (j.contains("recipe")) {
        const auto& rj = j.at("recipe");
        r.speech = Resolve(rj.value("speech", ""), base);
        r.music = Resolve(rj.value("music", ""), base);
        r.music_offset = rj.value("music_offset", std::size_t{0});
        r.noise_type = rj.value("noise_type", "");
        r.noise = Resolve(rj.value("noise", ""), base);
        r.noise_offset = rj.value("noise_offset", std::size_t{0});
        r.speech_ir = rj.value("speech_ir", std::size_t{0});
        r.speech_ir_path = Resolve(rj.value("speech_ir_path", ""), base);
        r.echo_ir = rj.value("echo_ir", std::size_t{0});
        r.echo_ir_path = Resolve(rj.value("echo_ir_path", ""), base);
        r.ser_db = rj.value("ser_db", 0.0);
        r.snr_db = rj.value("snr_db", 0.0);
        r.sigma1 = rj.value("sigma1", 0.0);
        r.sigma2 = rj.value("sigma2", 0.0);
        r.sigma3 = rj.value("sigma3", 0.0);
        r.pink_rms = rj.value("pink_rms", 0.01);
        r.seed = rj.value("seed", std::uint64_t{0});
      }
      manifest.items.push_back(std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed manifest " + path.string() + ": " + e.what(), path.string());
  }
  return manifest;
}

}  // namespace echoforge
