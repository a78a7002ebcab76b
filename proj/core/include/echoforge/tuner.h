#ifndef ECHOFORGE_TUNER_H_
#define ECHOFORGE_TUNER_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "echoforge/audio.h"
#include "echoforge/corpus.h"
#include "echoforge/params.h"
#include "echoforge/pipeline.h"
#include "echoforge/random.h"

namespace echoforge {

class Config;

struct GaConfig {
  std::size_t population = 40;  // M
  std::size_t elite = 10;       // N, copied unchanged
  std::size_t generations = 3;  // K
  double mutation_rate = 0.15;  // per gene
  double mutation_scale = 0.2;  // perturbation width, fraction of the bound width
  double crossover_rate = 0.8;
  std::size_t tournament = 3;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;  // concurrent evaluations

  // Reads ga.* keys.
  static GaConfig FromConfig(Config& config, const GaConfig& defaults);
  void Validate() const;
};

using Genes = std::vector<double>;

// Score to maximize. `eval_index` is unique per evaluation and assigned in
// a fixed order, so implementations can derive work directories from it.
// Exceptions count as a failed candidate. Must be safe to call
// concurrently when GaConfig::jobs > 1.
using Objective = std::function<double(const Genes& genes, std::size_t eval_index)>;

struct GenerationStats {
  std::size_t generation = 0;
  double best = 0.0;
  double mean = 0.0;   // over finite scores
  double worst = 0.0;
  std::size_t failures = 0;
  Genes best_genes;
};

struct GaResult {
  Genes best;
  double best_score = 0.0;
  std::vector<GenerationStats> history;  // initial population first
  std::size_t evaluations = 0;
};

// Initial population drawn uniformly within the bounds (optionally seeded
// with `incumbent` as member 0), then K generations of elitism, tournament
// selection, uniform crossover and mutation. Returns the best member of
// the final population.
GaResult RunGa(const GaConfig& cfg, const std::vector<GeneBound>& bounds,
               const Objective& objective, const std::optional<Genes>& incumbent = std::nullopt);

// Each gene with probability `rate` moves by U(-w/2, w/2), w = scale (U - L),
// then is clamped; integer genes are rounded and clamped.
Genes Mutate(const Genes& p, const std::vector<GeneBound>& bounds, double rate, double scale,
             Rng& rng);

// Uniform crossover: each gene from either parent with probability 1/2.
Genes Crossover(const Genes& a, const Genes& b, Rng& rng);

Genes ClampGenes(Genes g, const std::vector<GeneBound>& bounds);

// "generation best mean worst" table, one row per history entry.
std::string FormatHistory(const std::vector<GenerationStats>& history);

// One corpus item with its audio in memory.
struct LoadedItem {
  std::string id;
  AudioBuffer mix, reference, clean;
  std::filesystem::path mix_path, reference_path, clean_path;
};

// Loads mix, reference and clean speech for every item; unreadable items
// are skipped with a warning.
std::vector<LoadedItem> LoadItems(const Manifest& manifest);

// Mean segmental SNR improvement of the enhanced output over the mixture,
// against the stored clean speech.
class BuiltinObjective {
 public:
  BuiltinObjective(std::vector<LoadedItem> items, ParamSpace space, ParamVector base = {},
                   PipelineOptions options = {});

  double Score(const ParamVector& params) const;
  double operator()(const Genes& genes, std::size_t) const {
    return Score(space_.Decode(genes, base_));
  }
  std::size_t num_items() const { return items_.size(); }

 private:
  std::vector<LoadedItem> items_;
  ParamSpace space_;
  ParamVector base_;
  PipelineOptions options_;
};

// Hands each candidate to an external scorer (e.g. a recognizer). For
// evaluation i it writes into <exchange>/cand<i>/: params.cfg, one
// <id>.enh.wav per item and candidate.json listing them, then runs the
// command template with {dir}, {manifest} and {params} substituted. The
// command must print a single decimal number on stdout.
class ExternalObjective {
 public:
  ExternalObjective(std::vector<LoadedItem> items, ParamSpace space, std::string command,
                    std::filesystem::path exchange_dir, std::chrono::milliseconds timeout,
                    ParamVector base = {}, PipelineOptions options = {});

  double operator()(const Genes& genes, std::size_t eval_index) const;

 private:
  std::vector<LoadedItem> items_;
  ParamSpace space_;
  std::string command_;
  std::filesystem::path exchange_dir_;
  std::chrono::milliseconds timeout_;
  ParamVector base_;
  PipelineOptions options_;
};

struct CommandResult {
  int exit_status = -1;
  bool timed_out = false;
  std::string stdout_text;
};

// Runs `command` through /bin/sh, capturing stdout. The process group is
// killed once `timeout` elapses.
CommandResult RunCommand(const std::string& command, std::chrono::milliseconds timeout);

// Parses stdout holding exactly one decimal number (surrounding whitespace
// allowed). Throws InputError otherwise.
double ParseScore(const std::string& text);

}  // namespace echoforge

#endif  // ECHOFORGE_TUNER_H_
