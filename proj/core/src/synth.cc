#include "echoforge/synth.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "echoforge/audio.h"
#include "echoforge/errors.h"

namespace echoforge::synth {
namespace {

constexpr double kPi = std::numbers::pi;

void ScaleToRms(std::vector<double>& x, double rms) {
  if (x.empty()) return;
  const double current = std::sqrt(Energy(x) / static_cast<double>(x.size()));
  if (current <= 0.0) return;
  const double g = rms / current;
  for (double& v : x) v *= g;
}

// Two-pole resonator, cascaded to build formants.
class Resonator {
 public:
  void Set(double freq, double bandwidth, int fs) {
    const double r = std::exp(-kPi * bandwidth / fs);
    a1_ = 2.0 * r * std::cos(2.0 * kPi * freq / fs);
    a2_ = -r * r;
    gain_ = 1.0 - r;
  }
  double Step(double x) {
    const double y = gain_ * x + a1_ * y1_ + a2_ * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double a1_ = 0.0, a2_ = 0.0, gain_ = 1.0;
  double y1_ = 0.0, y2_ = 0.0;
};

class OnePoleLowpass {
 public:
  OnePoleLowpass(double cutoff, int fs) : a_(std::exp(-2.0 * kPi * cutoff / fs)) {}
  double Step(double x) {
    y_ = (1.0 - a_) * x + a_ * y_;
    return y_;
  }

 private:
  double a_;
  double y_ = 0.0;
};

class OnePoleHighpass {
 public:
  OnePoleHighpass(double cutoff, int fs) : a_(std::exp(-2.0 * kPi * cutoff / fs)) {}
  double Step(double x) {
    const double y = a_ * (y_ + x - x_);
    x_ = x;
    y_ = y;
    return y;
  }

 private:
  double a_;
  double x_ = 0.0, y_ = 0.0;
};

double RaisedCosineEnvelope(std::size_t i, std::size_t len, std::size_t ramp) {
  if (len == 0) return 0.0;
  ramp = std::min(ramp, len / 2);
  if (ramp == 0) return 1.0;
  if (i < ramp) return 0.5 - 0.5 * std::cos(kPi * static_cast<double>(i) / ramp);
  if (i >= len - ramp) {
    return 0.5 - 0.5 * std::cos(kPi * static_cast<double>(len - 1 - i) / ramp);
  }
  return 1.0;
}

// Adds `part` at `pos` scaled to the given RMS, truncated at the end.
void AddAtRms(std::vector<double>& out, std::size_t pos, std::vector<double>& part, double rms) {
  if (part.empty() || pos >= out.size()) return;
  ScaleToRms(part, rms);
  const std::size_t m = std::min(part.size(), out.size() - pos);
  for (std::size_t i = 0; i < m; ++i) out[pos + i] += part[i];
}

std::vector<double> Syllables(std::size_t n, int fs, Rng& rng, double rms, bool pauses) {
  std::vector<double> out(n, 0.0);
  const double speaker_f0 = rng.Uniform(95.0, 220.0);
  std::size_t pos = 0;
  double phase = 0.0;
  Resonator f1, f2, f3;
  OnePoleHighpass fric_hp1(2500.0, fs), fric_hp2(2500.0, fs);
  while (pos < n) {
    if (pauses && pos > 0 && rng.Bernoulli(0.45)) {
      pos += static_cast<std::size_t>(rng.Uniform(0.05, 0.35) * fs);
      continue;
    }
    const auto len = static_cast<std::size_t>(rng.Uniform(0.12, 0.30) * fs);
    const double f0_start = speaker_f0 * rng.Uniform(0.85, 1.15);
    const double f0_end = f0_start * rng.Uniform(0.85, 1.15);
    f1.Set(rng.Uniform(300.0, 800.0), 80.0, fs);
    f2.Set(rng.Uniform(900.0, 2300.0), 120.0, fs);
    f3.Set(rng.Uniform(2300.0, 3300.0), 160.0, fs);
    const bool fricative = rng.Bernoulli(0.3);
    const auto fric_len = fricative ? static_cast<std::size_t>(rng.Uniform(0.04, 0.08) * fs) : 0;
    const double level = rng.Uniform(0.6, 1.0);
    const std::size_t ramp = static_cast<std::size_t>(0.02 * fs);

    // The formant cascade gain depends strongly on where the harmonics
    // fall, so each part is rendered first and scaled to its level.
    std::vector<double> part(fric_len);
    for (std::size_t i = 0; i < fric_len; ++i) {
      part[i] = RaisedCosineEnvelope(i, fric_len, ramp / 2) * fric_hp2.Step(fric_hp1.Step(rng.Normal()));
    }
    AddAtRms(out, pos, part, 0.3 * level);
    pos += fric_len;
    part.resize(len);
    for (std::size_t i = 0; i < len; ++i) {
      const double t = static_cast<double>(i) / len;
      const double f0 = f0_start + (f0_end - f0_start) * t;
      phase += f0 / fs;
      double excitation = 0.02 * rng.Normal();
      if (phase >= 1.0) {
        phase -= 1.0;
        excitation += 1.0;
      }
      part[i] = RaisedCosineEnvelope(i, len, ramp) * f3.Step(f2.Step(f1.Step(excitation)));
    }
    AddAtRms(out, pos, part, level);
    pos += len;
  }
  ScaleToRms(out, rms);
  return out;
}

}  // namespace

std::vector<double> WhiteNoise(std::size_t n, Rng& rng, double rms) {
  std::vector<double> out(n);
  for (double& v : out) v = rms * rng.Normal();
  return out;
}

std::vector<double> PinkNoise(std::size_t n, Rng& rng, double rms) {
  std::vector<double> out(n);
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
  for (double& v : out) {
    const double w = rng.Normal();
    b0 = 0.99886 * b0 + w * 0.0555179;
    b1 = 0.99332 * b1 + w * 0.0750759;
    b2 = 0.96900 * b2 + w * 0.1538520;
    b3 = 0.86650 * b3 + w * 0.3104856;
    b4 = 0.55000 * b4 + w * 0.5329522;
    b5 = -0.7616 * b5 - w * 0.0168980;
    v = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
    b6 = w * 0.115926;
  }
  ScaleToRms(out, rms);
  return out;
}

std::vector<double> SpeechShapedNoise(std::size_t n, int sample_rate, Rng& rng, double rms) {
  std::vector<double> out(n);
  OnePoleHighpass hp(100.0, sample_rate);
  OnePoleLowpass lp(700.0, sample_rate);
  for (double& v : out) v = lp.Step(hp.Step(rng.Normal()));
  ScaleToRms(out, rms);
  return out;
}

std::vector<double> SpeechLike(std::size_t n, int sample_rate, Rng& rng, double rms) {
  return Syllables(n, sample_rate, rng, rms, true);
}

std::vector<double> ContinuousSpeechLike(std::size_t n, int sample_rate, Rng& rng, double rms) {
  return Syllables(n, sample_rate, rng, rms, false);
}

std::vector<double> MusicLike(std::size_t n, int fs, Rng& rng, double rms) {
  std::vector<double> out(n, 0.0);
  static constexpr int kScale[] = {0, 2, 4, 5, 7, 9, 11};
  const int root = 45 + static_cast<int>(rng.Index(12));
  const double beat = rng.Uniform(0.25, 0.5);
  const auto midi_hz = [](double midi) { return 440.0 * std::pow(2.0, (midi - 69.0) / 12.0); };

  std::size_t pos = 0;
  while (pos < n) {
    const auto len = static_cast<std::size_t>(beat * fs * static_cast<double>(1 + rng.Index(2)));
    const int degree = static_cast<int>(rng.Index(7));
    const int chord[3] = {
        root + 12 + kScale[degree],
        root + 12 + kScale[(degree + 2) % 7] + ((degree + 2) >= 7 ? 12 : 0),
        root + 12 + kScale[(degree + 4) % 7] + ((degree + 4) >= 7 ? 12 : 0),
    };
    const double decay = rng.Uniform(2.0, 6.0);
    for (int note = 0; note < 4; ++note) {
      const double f = note < 3 ? midi_hz(chord[note]) : midi_hz(root - 12 + kScale[degree]);
      const double amp = note < 3 ? 0.3 : 0.5;
      const double phase0 = rng.Uniform(0.0, 2.0 * kPi);
      for (int h = 1; h <= 8; ++h) {
        const double fh = f * h;
        if (fh >= 0.45 * fs) break;
        const double w = 2.0 * kPi * fh / fs;
        const double ah = amp / h;
        for (std::size_t i = 0; i < len && pos + i < n; ++i) {
          const double t = static_cast<double>(i) / fs;
          out[pos + i] += ah * std::exp(-decay * t) * std::sin(w * i + phase0 * h);
        }
      }
    }
    // Percussive hit at the beat.
    const auto hit = static_cast<std::size_t>(0.03 * fs);
    OnePoleHighpass hp(3000.0, fs);
    for (std::size_t i = 0; i < hit && pos + i < n; ++i) {
      out[pos + i] += 0.4 * std::exp(-static_cast<double>(i) / (0.006 * fs)) * hp.Step(rng.Normal());
    }
    pos += len;
  }
  // Sustained pad so the far end never goes silent between notes.
  OnePoleLowpass lp(1500.0, fs);
  for (double& v : out) v += 0.05 * lp.Step(rng.Normal());
  ScaleToRms(out, rms);
  return out;
}

std::vector<double> Babble(std::size_t n, int sample_rate, Rng& rng, double rms, int talkers) {
  std::vector<double> out(n, 0.0);
  for (int t = 0; t < talkers; ++t) {
    const auto talker = SpeechLike(n, sample_rate, rng, 1.0);
    for (std::size_t i = 0; i < n; ++i) out[i] += talker[i];
  }
  ScaleToRms(out, rms);
  return out;
}

std::vector<double> FactoryNoise(std::size_t n, int fs, Rng& rng, double rms) {
  std::vector<double> out(n, 0.0);
  OnePoleLowpass rumble(300.0, fs);
  const double hum = rng.Uniform(48.0, 62.0);
  for (std::size_t i = 0; i < n; ++i) {
    double v = rumble.Step(rng.Normal());
    for (int h = 1; h <= 5; ++h) {
      v += 0.05 / h * std::sin(2.0 * kPi * hum * h * static_cast<double>(i) / fs);
    }
    out[i] = v;
  }
  const double period = rng.Uniform(0.3, 0.7);
  for (double t = rng.Uniform(0.0, period); t < static_cast<double>(n) / fs; t += period) {
    const auto start = static_cast<std::size_t>(t * fs);
    const auto len = static_cast<std::size_t>(0.08 * fs);
    Resonator ring;
    ring.Set(rng.Uniform(800.0, 3000.0), 200.0, fs);
    for (std::size_t i = 0; i < len && start + i < n; ++i) {
      const double env = std::exp(-static_cast<double>(i) / (0.015 * fs));
      out[start + i] += 3.0 * env * ring.Step(rng.Normal());
    }
  }
  ScaleToRms(out, rms);
  return out;
}

std::vector<double> ImpulseResponse(std::size_t taps, int sample_rate, double rt60_seconds,
                                    std::size_t delay, double drr_db, Rng& rng) {
  if (delay >= taps) throw ConfigError("impulse response delay must be shorter than its length");
  std::vector<double> h(taps, 0.0);
  const double decay = 6.907755278982137 / (rt60_seconds * sample_rate);  // ln(1000)
  double tail_energy = 0.0;
  for (std::size_t n = delay + 1; n < taps; ++n) {
    h[n] = rng.Normal() * std::exp(-decay * static_cast<double>(n - delay));
    tail_energy += h[n] * h[n];
  }
  const double target_tail = std::pow(10.0, -drr_db / 10.0);
  const double g = tail_energy > 0.0 ? std::sqrt(target_tail / tail_energy) : 0.0;
  for (std::size_t n = delay + 1; n < taps; ++n) h[n] *= g;
  h[delay] = 1.0;
  const double norm = std::sqrt(Energy(h));
  for (double& v : h) v /= norm;
  return h;
}

std::filesystem::path WriteDemoSources(const std::filesystem::path& dir, std::uint64_t seed,
                                       int fs) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string(), dir.string());

  std::uint64_t stream = 0;
  const auto next_rng = [&] { return Rng(DeriveSeed(seed, stream++)); };
  const auto write = [&](const std::string& name, std::vector<double> samples) {
    WriteWav(dir / name, AudioBuffer(std::move(samples), fs), SampleFormat::kFloat32);
    return name;
  };
  const auto seconds = [fs](double s) { return static_cast<std::size_t>(s * fs); };
  const auto join = [](const std::vector<std::string>& names) {
    std::string s;
    for (std::size_t i = 0; i < names.size(); ++i) s += (i ? ", " : "") + names[i];
    return s;
  };

  std::vector<std::string> speech, music, babble, factory, irs, echo_irs;
  for (int i = 0; i < 8; ++i) {
    auto rng = next_rng();
    speech.push_back(write("speech_" + std::to_string(i) + ".wav",
                           SpeechLike(seconds(4.0), fs, rng, 0.05)));
  }
  for (int i = 0; i < 5; ++i) {
    auto rng = next_rng();
    music.push_back(write("music_" + std::to_string(i) + ".wav",
                          MusicLike(seconds(20.0), fs, rng, 0.1)));
  }
  for (int i = 0; i < 2; ++i) {
    auto rng = next_rng();
    babble.push_back(write("babble_" + std::to_string(i) + ".wav",
                           Babble(seconds(20.0), fs, rng, 0.05)));
    auto rng2 = next_rng();
    factory.push_back(write("factory_" + std::to_string(i) + ".wav",
                            FactoryNoise(seconds(20.0), fs, rng2, 0.05)));
  }
  for (int i = 0; i < 6; ++i) {
    auto rng = next_rng();
    // Talker about a metre away in a furnished room.
    irs.push_back(write("room_ir_" + std::to_string(i) + ".wav",
                        ImpulseResponse(seconds(0.4), fs, rng.Uniform(0.25, 0.5),
                                        40 + rng.Index(20), rng.Uniform(-2.0, 4.0), rng)));
    auto rng2 = next_rng();
    // Loudspeaker a centimetre from the microphone: dominant direct path.
    echo_irs.push_back(write("echo_ir_" + std::to_string(i) + ".wav",
                             ImpulseResponse(1536, fs, rng2.Uniform(0.1, 0.2), 8 + rng2.Index(16),
                                             rng2.Uniform(6.0, 12.0), rng2)));
  }

  const auto spec_path = dir / "corpus.cfg";
  std::ofstream out(spec_path);
  if (!out) throw IoError("cannot write " + spec_path.string(), spec_path.string());
  out << "# Demo corpus spec; paths are relative to this file.\n"
      << "corpus.speech = " << join(speech) << "\n"
      << "corpus.music = " << join(music) << "\n"
      << "corpus.noise.babble = " << join(babble) << "\n"
      << "corpus.noise.factory = " << join(factory) << "\n"
      << "corpus.noise.music = " << join(music) << "\n"
      << "corpus.irs = " << join(irs) << "\n"
      << "corpus.echo_irs = " << join(echo_irs) << "\n"
      << "corpus.ser_db = -15, -10\n"
      << "corpus.snr_db = -10, 10\n"
      << "corpus.sigma3 = 0.1\n"
      << "corpus.seed = " << seed << "\n";
  return spec_path;
}

}  // namespace echoforge::synth
