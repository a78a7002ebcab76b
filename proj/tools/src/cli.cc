#include "echoforge_cli/cli.h"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "echoforge/audio.h"
#include "echoforge/config.h"
#include "echoforge/corpus.h"
#include "echoforge/errors.h"
#include "echoforge/log.h"
#include "echoforge/metrics.h"
#include "echoforge/params.h"
#include "echoforge/pipeline.h"
#include "echoforge/synth.h"
#include "echoforge/tuner.h"

namespace echoforge::cli {
namespace fs = std::filesystem;
namespace {

struct EnhanceArgs {
  std::string mic, ref, out;
  std::string config;
  std::string diagnostics;
  std::string segments;
  bool float_output = false;
};

struct CorpusArgs {
  std::string spec;
  std::size_t n = 10;
  std::string out;
  std::optional<std::uint64_t> seed;
};

struct TuneArgs {
  std::string manifest;
  std::string config;
  std::string out = "best.cfg";
  std::string history;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::size_t max_items = 0;
  std::string command;
  std::string exchange;
  double timeout = 600.0;
  bool no_incumbent = false;
};

struct MetricsArgs {
  std::string a, b;
  std::string clean;
  double window = 1.0;
};

struct SynthArgs {
  std::string dir;
  std::uint64_t seed = 1;
};

struct ShowArgs {
  std::string config;
};

Config LoadOptionalConfig(const std::string& path) {
  return path.empty() ? Config() : Config::Load(path);
}

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  out << text;
  if (!out) throw IoError("cannot write " + path.string(), path.string());
}

int Enhance(const EnhanceArgs& a, std::ostream& out) {
  Config cfg = LoadOptionalConfig(a.config);
  ParamVector params;
  ApplyParams(cfg, params);
  cfg.RequireAllConsumed();

  const AudioBuffer mic = ReadWav(a.mic);
  const AudioBuffer ref = ReadWav(a.ref);
  PipelineOptions options;
  options.diagnostics = !a.diagnostics.empty();
  const auto result = ProcessStream(mic, ref, params, options);
  WriteWav(a.out, result.enhanced, a.float_output ? SampleFormat::kFloat32 : SampleFormat::kPcm16);
  if (options.diagnostics) WriteDiagnostics(a.diagnostics, result.diagnostics);

  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : result.segments) segs.push_back({{"start", s.start}, {"end", s.end}});
  const nlohmann::json doc = {{"input", a.mic},
                              {"output", a.out},
                              {"sample_rate", result.enhanced.sample_rate},
                              {"num_samples", result.enhanced.size()},
                              {"segments", segs}};
  const std::string seg_path = a.segments.empty() ? a.out + ".segments.json" : a.segments;
  WriteText(seg_path, doc.dump(2) + "\n");
  out << fmt::format("wrote {} ({} samples, {} speech segments)\n", a.out, result.enhanced.size(),
                     result.segments.size());
  return kExitOk;
}

int Corpus(const CorpusArgs& a, std::ostream& out) {
  Config cfg = Config::Load(a.spec);
  CorpusSpec spec = CorpusSpec::FromConfig(cfg);
  cfg.RequireAllConsumed();
  if (a.seed) spec.seed = *a.seed;
  if (!a.out.empty()) spec.output_dir = a.out;
  if (spec.output_dir.empty()) spec.output_dir = "corpus";
  const auto recipes = GenerateCorpus(spec, a.n);
  out << fmt::format("wrote {} items and {}\n", recipes.size(),
                     (spec.output_dir / "manifest.json").string());
  return kExitOk;
}

int Tune(const TuneArgs& a, std::ostream& out) {
  Config cfg = LoadOptionalConfig(a.config);
  GaConfig ga = GaConfig::FromConfig(cfg, GaConfig{});
  if (a.seed) ga.seed = *a.seed;
  if (a.jobs) ga.jobs = *a.jobs;

  ParamSpace space;
  const std::string bounds_prefix = "tune.bounds.";
  for (const auto& key : cfg.KeysWithPrefix(bounds_prefix)) {
    const auto range = cfg.GetRange(key);
    space.SetBounds(key.substr(bounds_prefix.size()), range->first, range->second);
  }
  std::string command = cfg.GetString("tune.command").value_or("");
  fs::path exchange = cfg.GetPath("tune.exchange");
  double timeout = cfg.GetDouble("tune.timeout", a.timeout);
  std::size_t max_items = static_cast<std::size_t>(cfg.GetUint64("tune.items", a.max_items));
  ParamVector incumbent;
  ApplyParams(cfg, incumbent);
  cfg.RequireAllConsumed();
  if (!a.command.empty()) command = a.command;
  if (!a.exchange.empty()) exchange = a.exchange;
  if (a.timeout != 600.0) timeout = a.timeout;
  if (a.max_items) max_items = a.max_items;
  ga.Validate();

  Manifest manifest = LoadManifest(a.manifest);
  if (max_items && manifest.items.size() > max_items) manifest.items.resize(max_items);
  auto items = LoadItems(manifest);
  if (items.empty()) throw IoError("no readable items in " + a.manifest, a.manifest);

  Objective objective;
  if (command.empty()) {
    objective = BuiltinObjective(std::move(items), space, incumbent);
  } else {
    if (exchange.empty()) exchange = fs::path(a.out).parent_path() / "exchange";
    objective = ExternalObjective(std::move(items), space, command, exchange,
                                  std::chrono::milliseconds(static_cast<long long>(timeout * 1000)),
                                  incumbent);
  }
  std::optional<Genes> seed_genes;
  if (!a.no_incumbent) seed_genes = space.Encode(incumbent);
  const GaResult result = RunGa(ga, space.GeneBounds(), objective, seed_genes);
  const ParamVector best = space.Decode(result.best, incumbent);

  const std::string header =
      fmt::format("# echoforge tune: best score {:.6f} after {} evaluations, seed {}\n\n",
                  result.best_score, result.evaluations, ga.seed);
  WriteText(a.out, header + FormatParams(best));
  const std::string table = FormatHistory(result.history);
  const std::string history = a.history.empty() ? a.out + ".history.tsv" : a.history;
  WriteText(history, table);
  out << table;
  out << fmt::format("best score {:.6f}; wrote {}\n", result.best_score, a.out);
  return kExitOk;
}

int Metrics(const MetricsArgs& a, std::ostream& out) {
  const AudioBuffer x = ReadWav(a.a);
  const AudioBuffer y = ReadWav(a.b);
  if (x.sample_rate != y.sample_rate) throw InputError("sample rates differ");
  if (x.size() != y.size()) {
    throw InputError(fmt::format("lengths differ: {} vs {} samples", x.size(), y.size()));
  }
  if (!(a.window > 0.0)) throw ConfigError("--window must be > 0", "window");
  const auto window = static_cast<std::size_t>(a.window * x.sample_rate);
  const auto erle = ErleDb(x.samples, y.samples, std::max<std::size_t>(window, 1));
  double mean = 0.0;
  for (double v : erle) mean += v;
  if (!erle.empty()) mean /= static_cast<double>(erle.size());
  out << fmt::format("erle_db_overall\t{:.4f}\n", EnergyRatioDb(x.samples, y.samples));
  out << fmt::format("erle_db_mean\t{:.4f}\n", mean);
  for (std::size_t i = 0; i < erle.size(); ++i) {
    out << fmt::format("erle_db[{}]\t{:.4f}\n", i, erle[i]);
  }
  if (!a.clean.empty()) {
    const AudioBuffer s = ReadWav(a.clean);
    if (s.size() != x.size()) throw InputError("clean reference length differs");
    out << fmt::format("segsnr_db_a\t{:.4f}\n", SegmentalSnrDb(s.samples, x.samples));
    out << fmt::format("segsnr_db_b\t{:.4f}\n", SegmentalSnrDb(s.samples, y.samples));
    out << fmt::format("segsnr_improvement_db\t{:.4f}\n",
                       SegmentalSnrImprovementDb(s.samples, x.samples, y.samples));
  }
  return kExitOk;
}

int SynthSources(const SynthArgs& a, std::ostream& out) {
  const fs::path spec = synth::WriteDemoSources(a.dir, a.seed);
  out << fmt::format("wrote demo sources and {}\n", spec.string());
  return kExitOk;
}

int ShowConfig(const ShowArgs& a, std::ostream& out) {
  Config cfg = LoadOptionalConfig(a.config);
  ParamVector params;
  ApplyParams(cfg, params);
  cfg.RequireAllConsumed();
  out << FormatParams(params);
  return kExitOk;
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"echoforge: echo cancellation and speech enhancement for music playback devices"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "0.1.0");
  std::string log_level;
  app.add_option("--log", log_level, "log level (overrides ECHOFORGE_LOG)");

  EnhanceArgs enhance;
  auto* enh = app.add_subcommand("enhance", "enhance a microphone recording");
  enh->add_option("mic", enhance.mic, "microphone WAV")->required();
  enh->add_option("ref", enhance.ref, "far-end reference WAV")->required();
  enh->add_option("out", enhance.out, "output WAV")->required();
  enh->add_option("--config", enhance.config, "parameter file");
  enh->add_option("--diagnostics", enhance.diagnostics, "write per-frame xi/gamma/zeta here");
  enh->add_option("--segments", enhance.segments, "segment JSON (default <out>.segments.json)");
  enh->add_flag("--float", enhance.float_output, "write 32-bit float instead of 16-bit PCM");

  CorpusArgs corpus;
  auto* cor = app.add_subcommand("corpus", "generate a synthetic noisy corpus");
  cor->add_option("spec", corpus.spec, "corpus spec file")->required();
  cor->add_option("-n,--items", corpus.n, "number of items");
  cor->add_option("--out", corpus.out, "output directory (overrides corpus.output)");
  cor->add_option("--seed", corpus.seed, "master seed (overrides corpus.seed)");

  TuneArgs tune;
  auto* tun = app.add_subcommand("tune", "tune parameters with the genetic algorithm");
  tun->add_option("manifest", tune.manifest, "corpus manifest.json")->required();
  tun->add_option("--config", tune.config, "GA settings, bounds and incumbent parameters");
  tun->add_option("--out", tune.out, "best-parameters file");
  tun->add_option("--history", tune.history, "history table (default <out>.history.tsv)");
  tun->add_option("--seed", tune.seed, "GA seed (overrides ga.seed)");
  tun->add_option("--jobs", tune.jobs, "concurrent candidate evaluations");
  tun->add_option("--items", tune.max_items, "use only the first N corpus items");
  tun->add_option("--command", tune.command, "external objective command template");
  tun->add_option("--exchange", tune.exchange, "exchange directory for the external objective");
  tun->add_option("--timeout", tune.timeout, "external objective timeout, seconds");
  tun->add_flag("--no-incumbent", tune.no_incumbent, "draw the whole initial population");

  MetricsArgs metrics;
  auto* met = app.add_subcommand("metrics", "ERLE and segmental SNR between two recordings");
  met->add_option("a", metrics.a, "input (e.g. microphone) WAV")->required();
  met->add_option("b", metrics.b, "processed WAV")->required();
  met->add_option("--clean", metrics.clean, "clean reference for segmental SNR");
  met->add_option("--window", metrics.window, "ERLE window, seconds");

  SynthArgs synth_args;
  auto* syn = app.add_subcommand("synth-sources", "write synthetic speech/music/noise/IR sources");
  syn->add_option("dir", synth_args.dir, "output directory")->required();
  syn->add_option("--seed", synth_args.seed, "seed");

  ShowArgs show;
  auto* shw = app.add_subcommand("show-config", "print the effective parameter file");
  shw->add_option("--config", show.config, "parameter file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitFailure;
  }

  try {
    log::Init();
    if (!log_level.empty()) log::SetLevel(log_level);
    if (*enh) return Enhance(enhance, out);
    if (*cor) return Corpus(corpus, out);
    if (*tun) return Tune(tune, out);
    if (*met) return Metrics(metrics, out);
    if (*syn) return SynthSources(synth_args, out);
    if (*shw) return ShowConfig(show, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace echoforge::cli
