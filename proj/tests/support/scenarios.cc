#include "scenarios.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <tuple>

#include "echoforge/audio.h"
#include "echoforge/config.h"
#include "echoforge/corpus.h"
#include "echoforge/dtp.h"
#include "echoforge/npe.h"
#include "echoforge/random.h"
#include "echoforge/stft.h"
#include "echoforge/suppressor.h"
#include "echoforge/synth.h"
#include "echoforge/vad.h"
#include "oracles.h"

namespace echoforge::testing {

using namespace synth;

namespace {

std::size_t Samples(double seconds) { return static_cast<std::size_t>(seconds * kFs); }

std::vector<double> Filter(std::span<const double> h, std::span<const double> x) {
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t n = 0; n < x.size(); ++n) {
    const std::size_t kmax = std::min(h.size(), n + 1);
    double acc = 0.0;
    for (std::size_t k = 0; k < kmax; ++k) acc += h[k] * x[n - k];
    y[n] = acc;
  }
  return y;
}

double SpanEnergy(const std::vector<double>& x, std::size_t a, std::size_t b) {
  double e = 0.0;
  for (std::size_t i = a; i < std::min(b, x.size()); ++i) e += x[i] * x[i];
  return e;
}

}  // namespace

std::vector<double> SyntheticEchoPath(std::size_t taps, std::uint64_t seed) {
  Rng rng(DeriveSeed(seed, 0xEC80));
  std::vector<double> h(taps);
  const double decay = 6.0 / static_cast<double>(taps);
  for (std::size_t n = 0; n < taps; ++n) {
    h[n] = rng.Normal() * std::exp(-decay * static_cast<double>(n));
  }
  const double norm = std::sqrt(EnergyOf(h));
  for (double& v : h) v /= norm;
  return h;
}

EchoScene MakeEchoScene(const EchoSceneSpec& spec) {
  const std::size_t n = Samples(spec.seconds);
  EchoScene s;
  s.path = SyntheticEchoPath(spec.taps, spec.seed);
  Rng far_rng(DeriveSeed(spec.seed, 1));
  s.far = spec.music_far_end ? MusicLike(n, kFs, far_rng, 0.1) : WhiteNoise(n, far_rng, 0.1);
  s.echo = Filter(s.path, s.far);

  s.near.assign(n, 0.0);
  Rng near_rng(DeriveSeed(spec.seed, 2));
  for (const auto& [t0, t1] : spec.bursts) {
    const std::size_t a = std::min(n, Samples(t0));
    const std::size_t b = std::min(n, Samples(t1));
    if (b <= a) continue;
    auto talk = ContinuousSpeechLike(b - a, kFs, near_rng, 0.1);
    const double es = EnergyOf(talk);
    const double ed = SpanEnergy(s.echo, a, b);
    const double g = std::sqrt(ed / es * std::pow(10.0, spec.burst_ser_db / 10.0));
    for (std::size_t i = 0; i < talk.size(); ++i) s.near[a + i] = g * talk[i];
  }

  Rng noise_rng(DeriveSeed(spec.seed, 3));
  s.noise = WhiteNoise(n, noise_rng, 1.0);
  const double g = std::sqrt(EnergyOf(s.echo) / EnergyOf(s.noise) *
                             std::pow(10.0, spec.noise_db / 10.0));
  for (double& v : s.noise) v *= g;

  s.mic.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.mic[i] = s.echo[i] + s.near[i] + s.noise[i];
  return s;
}

double MisalignmentTrace::Mean(double t0, double t1) const {
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < time.size(); ++i) {
    if (time[i] >= t0 && time[i] < t1) {
      acc += misalignment_db[i];
      ++count;
    }
  }
  return count ? acc / static_cast<double>(count) : NAN;
}

double MisalignmentTrace::Max(double t0, double t1) const {
  double m = -INFINITY;
  for (std::size_t i = 0; i < time.size(); ++i) {
    if (time[i] >= t0 && time[i] < t1) m = std::max(m, misalignment_db[i]);
  }
  return m;
}

std::optional<double> MisalignmentTrace::FirstBelow(double t0, double level) const {
  for (std::size_t i = 0; i < time.size(); ++i) {
    if (time[i] >= t0 && misalignment_db[i] <= level) return time[i];
  }
  return std::nullopt;
}

MisalignmentTrace TraceCanceller(const EchoScene& scene, const RaecParams& stage1,
                                 const std::optional<RaecParams>& stage2,
                                 std::size_t every_blocks) {
  Raec first(stage1, kFs);
  std::optional<Raec> second;
  if (stage2) second.emplace(*stage2, kFs);
  const std::size_t n = stage1.frame_size;
  if (second && stage2->frame_size != n) {
    throw std::invalid_argument("TraceCanceller: stages need equal block sizes");
  }
  MisalignmentTrace trace;
  trace.error.assign(scene.mic.size(), 0.0);
  std::vector<double> xb(n), yb(n), e1(n), d1(n), e2(n), d2(n);
  std::size_t block = 0;
  for (std::size_t start = 0; start + n <= scene.mic.size(); start += n, ++block) {
    std::copy_n(scene.far.begin() + static_cast<std::ptrdiff_t>(start), n, xb.begin());
    std::copy_n(scene.mic.begin() + static_cast<std::ptrdiff_t>(start), n, yb.begin());
    first.Process(xb, yb, e1, d1);
    const std::vector<double>* out = &e1;
    if (second) {
      second->Process(xb, e1, e2, d2);
      out = &e2;
    }
    std::copy(out->begin(), out->end(), trace.error.begin() + static_cast<std::ptrdiff_t>(start));
    if ((block + 1) % every_blocks == 0) {
      auto w = first.TimeDomainWeights();
      if (second) {
        const auto w2 = second->TimeDomainWeights();
        if (w2.size() > w.size()) w.resize(w2.size(), 0.0);
        for (std::size_t i = 0; i < w2.size(); ++i) w[i] += w2[i];
      }
      trace.time.push_back(static_cast<double>(start + n) / kFs);
      trace.misalignment_db.push_back(NormalizedMisalignmentDb(scene.path, w));
    }
  }
  return trace;
}

double ErleOverDb(const std::vector<double>& mic, const std::vector<double>& error, double t0,
                  double t1) {
  const std::size_t a = Samples(t0);
  const std::size_t b = std::min(Samples(t1), mic.size());
  return Db(SpanEnergy(mic, a, b) / std::max(SpanEnergy(error, a, b), 1e-300));
}

DtpSequence RunDtpSequence(double segment_seconds, std::size_t segments, double ser_db,
                           std::uint64_t seed, const ParamVector& params,
                           double lead_in_seconds) {
  EchoSceneSpec spec;
  spec.seconds = lead_in_seconds + segment_seconds * static_cast<double>(segments);
  spec.music_far_end = true;
  spec.noise_db = -40.0;
  spec.burst_ser_db = ser_db;
  spec.seed = seed;
  for (std::size_t s = 1; s < segments; s += 2) {
    spec.bursts.emplace_back(lead_in_seconds + segment_seconds * static_cast<double>(s),
                             lead_in_seconds + segment_seconds * static_cast<double>(s + 1));
  }
  const EchoScene scene = MakeEchoScene(spec);

  RaecCascade cascade(params.raec1, params.raec2, kFs);
  std::vector<double> e, d_hat;
  cascade.Run(scene.far, scene.mic, e, d_hat);

  const StftConfig cfg;
  const auto D = Analyze(AudioBuffer(d_hat, kFs), cfg);
  const auto Y = Analyze(AudioBuffer(scene.mic, kFs), cfg);
  DoubleTalkEstimator dtp(params.dtp, cfg.num_bins());
  DtpSequence out;
  for (std::size_t m = 0; m < D.size(); ++m) {
    const double p = dtp.Update(D[m].bins, Y[m].bins);
    const double centre =
        static_cast<double>(m * cfg.hop + cfg.frame_len / 2) / static_cast<double>(kFs) -
        lead_in_seconds;
    if (centre < 0.0 || centre >= segment_seconds * static_cast<double>(segments)) continue;
    out.p_dt.push_back(p);
    out.double_talk.push_back(static_cast<std::size_t>(centre / segment_seconds) % 2 == 1);
  }
  return out;
}

VadSequence RunVadSequence(double seconds, double snr_db, std::uint64_t seed) {
  const std::size_t n = Samples(seconds);
  Rng rng(DeriveSeed(seed, 0x7AD));
  std::vector<double> speech(n, 0.0);
  std::vector<bool> active(n, false);
  std::size_t pos = Samples(1.0);
  while (pos < n) {
    const std::size_t len = Samples(rng.Uniform(0.3, 0.9));
    const std::size_t end = std::min(n, pos + len);
    auto burst = SpeechShapedNoise(end - pos, kFs, rng, 1.0);
    for (std::size_t i = pos; i < end; ++i) {
      speech[i] = burst[i - pos];
      active[i] = true;
    }
    pos = end + Samples(rng.Uniform(0.5, 1.5));
  }
  std::vector<double> noise = WhiteNoise(n, rng, 0.01);
  double es = 0.0, en = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (active[i]) {
      es += speech[i] * speech[i];
      en += noise[i] * noise[i];
    }
  }
  const double g = std::sqrt(en / es * std::pow(10.0, snr_db / 10.0));
  std::vector<double> mix(n);
  for (std::size_t i = 0; i < n; ++i) mix[i] = g * speech[i] + noise[i];

  const StftConfig cfg;
  const auto E = Analyze(AudioBuffer(mix, kFs), cfg);
  const std::size_t bins = cfg.num_bins();
  NoisePowerEstimator npe(NpeParams{}, bins);
  Suppressor suppressor(SuppressorParams{}, bins);
  const std::vector<double> no_echo(bins, 0.0);
  std::vector<Complex> out(bins);
  VadSequence seq;
  for (std::size_t m = 0; m < E.size(); ++m) {
    const auto lambda_v = npe.Update(E[m].bins);
    suppressor.Process(E[m].bins, lambda_v, no_echo, out);
    seq.statistic.push_back(VadStatistic(suppressor.xi(), suppressor.gamma()));
    std::size_t covered = 0;
    const std::size_t start = m * cfg.hop;
    for (std::size_t i = start; i < std::min(n, start + cfg.frame_len); ++i) covered += active[i];
    seq.speech.push_back(2 * covered >= cfg.frame_len);
  }
  return seq;
}

namespace {

std::pair<double, double> Rates(const VadSequence& seq, std::size_t a, std::size_t b,
                                double eta) {
  std::size_t hit = 0, pos = 0, fa = 0, neg = 0;
  for (std::size_t m = a; m < b; ++m) {
    const bool d = seq.statistic[m] > eta;
    if (seq.speech[m]) {
      ++pos;
      hit += d;
    } else {
      ++neg;
      fa += d;
    }
  }
  return {pos ? double(hit) / double(pos) : 0.0, neg ? double(fa) / double(neg) : 0.0};
}

}  // namespace

VadRates TuneAndScoreVad(const VadSequence& seq) {
  const std::size_t half = seq.statistic.size() / 2;
  VadRates best;
  double best_j = -2.0;
  for (std::size_t c = 0; c < half; ++c) {
    const double eta = seq.statistic[c];
    const auto [hit, fa] = Rates(seq, 0, half, eta);
    if (hit - fa > best_j) {
      best_j = hit - fa;
      best.eta = eta;
    }
  }
  std::tie(best.hit, best.false_alarm) = Rates(seq, half, seq.statistic.size(), best.eta);
  return best;
}

std::vector<double> NpeTrackingErrorDb(double seconds, std::optional<double> snr_db,
                                       std::uint64_t seed) {
  const std::size_t n = Samples(seconds);
  Rng rng(DeriveSeed(seed, 0x9E));
  auto noise = WhiteNoise(n, rng, 0.05);
  std::vector<double> y = noise;
  if (snr_db) {
    const auto speech = SpeechLike(n, kFs, rng, 0.1);
    const double g =
        std::sqrt(EnergyOf(speech) / EnergyOf(noise) * std::pow(10.0, -*snr_db / 10.0));
    for (double& v : noise) v *= g;
    for (std::size_t i = 0; i < n; ++i) y[i] = speech[i] + noise[i];
  }

  const StftConfig cfg;
  const auto frames = Analyze(AudioBuffer(y, kFs), cfg);
  NoisePowerEstimator npe(NpeParams{}, cfg.num_bins());
  std::vector<double> mean(cfg.num_bins(), 0.0);
  std::size_t counted = 0;
  const std::size_t skip = Samples(1.0) / cfg.hop;
  // Frames running past the end are partly zero; leave them out.
  const std::size_t full = (n - cfg.frame_len) / cfg.hop + 1;
  for (std::size_t m = 0; m < std::min(full, frames.size()); ++m) {
    const auto v = npe.Update(frames[m].bins);
    if (m < skip) continue;
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += v[k];
    ++counted;
  }
  const auto truth = WelchPeriodogram(noise, cfg.frame_len, cfg.hop);
  std::vector<double> out(mean.size());
  for (std::size_t k = 0; k < mean.size(); ++k) {
    out[k] = Db(mean[k] / static_cast<double>(counted) / truth[k]);
  }
  return out;
}

CorpusFidelity MeasureCorpusFidelity(const std::filesystem::path& manifest_path) {
  const Manifest manifest = LoadManifest(manifest_path);
  CorpusFidelity f;
  for (const auto& item : manifest.items) {
    const auto mix = ReadWav(item.mix).samples;
    const auto s = ReadWav(item.speech).samples;
    const auto echo = ReadWav(item.echo).samples;
    const auto noise = ReadWav(item.noise).samples;
    const auto floor = ReadWav(item.floor).samples;
    const auto& r = item.recipe;
    f.max_ser_error_db =
        std::max(f.max_ser_error_db, std::abs(Db(EnergyOf(s) / EnergyOf(echo)) - r.ser_db));
    f.max_snr_error_db =
        std::max(f.max_snr_error_db, std::abs(Db(EnergyOf(s) / EnergyOf(noise)) - r.snr_db));
    for (std::size_t i = 0; i < mix.size(); ++i) {
      f.max_mix_residual =
          std::max(f.max_mix_residual, std::abs(mix[i] - (s[i] + echo[i] + noise[i] + floor[i])));
    }
    const double rms = std::sqrt(EnergyOf(floor) / static_cast<double>(floor.size()));
    const double want = r.sigma3 * r.pink_rms;
    if (want > 0.0) {
      f.max_floor_rms_error = std::max(f.max_floor_rms_error, std::abs(rms - want) / want);
    }
    ++f.items;
  }
  return f;
}

std::filesystem::path MakeSmokeCorpus(const std::filesystem::path& root,
                                      std::uint64_t source_seed, std::uint64_t corpus_seed,
                                      std::size_t n_items, double ser_db) {
  const auto spec_path = WriteDemoSources(root / "sources", source_seed, kFs);
  Config config = Config::Load(spec_path);
  CorpusSpec spec = CorpusSpec::FromConfig(config);
  spec.ser_db = {ser_db, ser_db};
  spec.seed = corpus_seed;
  spec.output_dir = root / "corpus";
  GenerateCorpus(spec, n_items);
  return spec.output_dir / "manifest.json";
}

TempDir::TempDir(const std::string& tag) {
  std::random_device rd;
  const auto base = std::filesystem::temp_directory_path();
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto candidate = base / ("echoforge-" + tag + "-" + std::to_string(rd()));
    if (std::filesystem::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("cannot create a temporary directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace echoforge::testing
