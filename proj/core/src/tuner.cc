#include "echoforge/tuner.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "echoforge/config.h"
#include "echoforge/errors.h"
#include "echoforge/log.h"
#include "echoforge/metrics.h"

namespace echoforge {
namespace {

constexpr double kFailed = -std::numeric_limits<double>::infinity();

struct Member {
  Genes genes;
  double score = kFailed;
  bool evaluated = false;
};

double ClampGene(double v, const GeneBound& b) {
  if (b.integer) v = std::round(v);
  return std::clamp(v, b.lower, b.upper);
}

// Evaluates every member without a score. Scores land by index, so the
// outcome does not depend on thread scheduling.
void Evaluate(std::vector<Member>& pop, const Objective& objective, std::size_t jobs,
              std::size_t& eval_counter) {
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (!pop[i].evaluated) todo.push_back(i);
  }
  const std::size_t base = eval_counter;
  eval_counter += todo.size();
  auto run = [&](std::size_t t) {
    Member& m = pop[todo[t]];
    double s;
    try {
      s = objective(m.genes, base + t);
      if (std::isnan(s)) s = kFailed;
    } catch (const std::exception& e) {
      log::Warn("candidate {} failed: {}", base + t, e.what());
      s = kFailed;
    }
    if (s == kFailed) log::Warn("candidate {} scored -inf", base + t);
    m.score = s;
    m.evaluated = true;
  };
  if (jobs <= 1 || todo.size() <= 1) {
    for (std::size_t t = 0; t < todo.size(); ++t) run(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  const std::size_t n = std::min(jobs, todo.size());
  for (std::size_t w = 0; w < n; ++w) {
    workers.emplace_back([&] {
      for (std::size_t t = next++; t < todo.size(); t = next++) run(t);
    });
  }
  for (auto& w : workers) w.join();
}

// Best first; ties keep the earlier index.
std::vector<std::size_t> Ranking(const std::vector<Member>& pop) {
  std::vector<std::size_t> order(pop.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pop[a].score > pop[b].score; });
  return order;
}

GenerationStats Stats(const std::vector<Member>& pop, std::size_t generation) {
  GenerationStats s;
  s.generation = generation;
  const auto order = Ranking(pop);
  s.best = pop[order.front()].score;
  s.worst = pop[order.back()].score;
  s.best_genes = pop[order.front()].genes;
  double sum = 0.0;
  std::size_t finite = 0;
  for (const auto& m : pop) {
    if (std::isfinite(m.score)) {
      sum += m.score;
      ++finite;
    } else {
      ++s.failures;
    }
  }
  s.mean = finite ? sum / static_cast<double>(finite) : kFailed;
  return s;
}

const Member& Tournament(const std::vector<Member>& pop, std::size_t size, Rng& rng) {
  std::size_t best = rng.Index(pop.size());
  for (std::size_t i = 1; i < size; ++i) {
    const std::size_t c = rng.Index(pop.size());
    if (pop[c].score > pop[best].score) best = c;
  }
  return pop[best];
}

}  // namespace

GaConfig GaConfig::FromConfig(Config& config, const GaConfig& defaults) {
  GaConfig d = defaults;
  d.population = static_cast<std::size_t>(config.GetUint64("ga.population", d.population));
  d.elite = static_cast<std::size_t>(config.GetUint64("ga.elite", d.elite));
  d.generations = static_cast<std::size_t>(config.GetUint64("ga.generations", d.generations));
  d.mutation_rate = config.GetDouble("ga.mutation_rate", d.mutation_rate);
  d.mutation_scale = config.GetDouble("ga.mutation_scale", d.mutation_scale);
  d.crossover_rate = config.GetDouble("ga.crossover_rate", d.crossover_rate);
  d.tournament = static_cast<std::size_t>(config.GetUint64("ga.tournament", d.tournament));
  d.seed = config.GetUint64("ga.seed", d.seed);
  d.jobs = static_cast<std::size_t>(config.GetUint64("ga.jobs", d.jobs));
  return d;
}

void GaConfig::Validate() const {
  if (population < 2) throw ConfigError("ga.population must be >= 2", "ga.population");
  if (!(elite >= 1 && elite < population)) {
    throw ConfigError("ga.elite must satisfy 1 <= elite < population", "ga.elite");
  }
  if (generations < 1) throw ConfigError("ga.generations must be >= 1", "ga.generations");
  const std::pair<const char*, double> rates[] = {{"ga.mutation_rate", mutation_rate},
                                                  {"ga.crossover_rate", crossover_rate}};
  for (const auto& [name, v] : rates) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]", name);
  }
  if (!(mutation_scale >= 0.0) || !std::isfinite(mutation_scale)) {
    throw ConfigError("ga.mutation_scale must be >= 0", "ga.mutation_scale");
  }
  if (tournament < 1) throw ConfigError("ga.tournament must be >= 1", "ga.tournament");
  if (jobs < 1) throw ConfigError("ga.jobs must be >= 1", "ga.jobs");
}

Genes ClampGenes(Genes g, const std::vector<GeneBound>& bounds) {
  if (g.size() != bounds.size()) throw ShapeError("gene count does not match the bounds");
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = ClampGene(g[i], bounds[i]);
  return g;
}

Genes Mutate(const Genes& p, const std::vector<GeneBound>& bounds, double rate, double scale,
             Rng& rng) {
  if (p.size() != bounds.size()) throw ShapeError("gene count does not match the bounds");
  Genes out = p;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!rng.Bernoulli(rate)) continue;
    const double width = scale * (bounds[i].upper - bounds[i].lower);
    out[i] = ClampGene(out[i] + width * (rng.Uniform() - 0.5), bounds[i]);
  }
  return out;
}

Genes Crossover(const Genes& a, const Genes& b, Rng& rng) {
  if (a.size() != b.size()) throw ShapeError("parents differ in gene count");
  Genes out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = rng.Bernoulli(0.5) ? a[i] : b[i];
  return out;
}

GaResult RunGa(const GaConfig& cfg, const std::vector<GeneBound>& bounds,
               const Objective& objective, const std::optional<Genes>& incumbent) {
  cfg.Validate();
  for (const auto& b : bounds) {
    if (!(b.lower <= b.upper)) throw ConfigError("GA bounds must satisfy lower <= upper");
  }
  Rng rng(cfg.seed);
  std::vector<Member> pop(cfg.population);
  for (auto& m : pop) {
    m.genes.resize(bounds.size());
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      m.genes[i] = ClampGene(rng.Uniform(bounds[i].lower, bounds[i].upper), bounds[i]);
    }
  }
  if (incumbent) pop[0].genes = ClampGenes(*incumbent, bounds);

  GaResult result;
  std::size_t evals = 0;
  Evaluate(pop, objective, cfg.jobs, evals);
  result.history.push_back(Stats(pop, 0));
  log::Info("generation 0: best {:.4f}", result.history.back().best);

  for (std::size_t g = 1; g <= cfg.generations; ++g) {
    const auto order = Ranking(pop);
    std::vector<Member> next;
    next.reserve(cfg.population);
    for (std::size_t i = 0; i < cfg.elite; ++i) next.push_back(pop[order[i]]);
    while (next.size() < cfg.population) {
      const Member& a = Tournament(pop, cfg.tournament, rng);
      const Member& b = Tournament(pop, cfg.tournament, rng);
      Member child;
      child.genes = rng.Bernoulli(cfg.crossover_rate) ? Crossover(a.genes, b.genes, rng) : a.genes;
      child.genes = Mutate(child.genes, bounds, cfg.mutation_rate, cfg.mutation_scale, rng);
      // An exact copy of a parent inherits its score.
      for (const Member* parent : {&a, &b}) {
        if (!child.evaluated && child.genes == parent->genes) {
          child.score = parent->score;
          child.evaluated = true;
        }
      }
      next.push_back(std::move(child));
    }
    pop = std::move(next);
    Evaluate(pop, objective, cfg.jobs, evals);
    result.history.push_back(Stats(pop, g));
    log::Info("generation {}: best {:.4f}", g, result.history.back().best);
  }

  const auto order = Ranking(pop);
  result.best = pop[order.front()].genes;
  result.best_score = pop[order.front()].score;
  result.evaluations = evals;
  return result;
}

std::string FormatHistory(const std::vector<GenerationStats>& history) {
  std::string out = "generation\tbest\tmean\tworst\tfailures\n";
  for (const auto& s : history) {
    out += fmt::format("{}\t{:.6f}\t{:.6f}\t{:.6f}\t{}\n", s.generation, s.best, s.mean, s.worst,
                       s.failures);
  }
  return out;
}

std::vector<LoadedItem> LoadItems(const Manifest& manifest) {
  std::vector<LoadedItem> items;
  for (const auto& m : manifest.items) {
    try {
      LoadedItem item;
      item.id = m.recipe.id;
      item.mix = ReadWav(m.mix);
      item.reference = ReadWav(m.reference);
      item.clean = ReadWav(m.speech);
      item.mix_path = m.mix;
      item.reference_path = m.reference;
      item.clean_path = m.speech;
      if (item.clean.size() != item.mix.size()) {
        throw InputError("clean reference and mixture differ in length");
      }
      items.push_back(std::move(item));
    } catch (const Error& e) {
      log::Warn("skipping corpus item {}: {}", m.recipe.id, e.what());
    }
  }
  return items;
}

BuiltinObjective::BuiltinObjective(std::vector<LoadedItem> items, ParamSpace space,
                                   ParamVector base, PipelineOptions options)
    : items_(std::move(items)),
      space_(std::move(space)),
      base_(std::move(base)),
      options_(std::move(options)) {
  if (items_.empty()) throw InputError("objective needs at least one readable corpus item");
}

double BuiltinObjective::Score(const ParamVector& params) const {
  double sum = 0.0;
  for (const auto& item : items_) {
    const auto result = ProcessStream(item.mix, item.reference, params, options_);
    sum += SegmentalSnrImprovementDb(item.clean.samples, item.mix.samples,
                                     result.enhanced.samples);
  }
  return sum / static_cast<double>(items_.size());
}

}  // namespace echoforge
