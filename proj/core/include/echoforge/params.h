#ifndef ECHOFORGE_PARAMS_H_
#define ECHOFORGE_PARAMS_H_

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "echoforge/dtp.h"
#include "echoforge/npe.h"
#include "echoforge/raec.h"
#include "echoforge/rpe.h"
#include "echoforge/suppressor.h"
#include "echoforge/vad.h"

namespace echoforge {

// Every tunable and configurable setting of the enhancement chain.
struct ParamVector {
  RaecParams raec1;
  RaecParams raec2 = [] {
    RaecParams p;
    p.num_partitions = 4;
    return p;
  }();
  DtpParams dtp;
  RpeParams rpe;
  NpeParams npe;
  SuppressorParams suppressor;
  VadParams vad;

  // Validates every block; ConfigError names the config key.
  void Validate(std::size_t num_bins = 257) const;
};

// How a parameter is represented as a GA gene.
enum class ParamKind {
  kReal,        // gene = value
  kInteger,     // gene = value, rounded
  kLog,         // gene = log2(value)
  kPowerOfTwo,  // gene = log2(value), rounded
  kBool,        // configurable only
};

struct ParamInfo {
  std::string name;  // config key, e.g. "raec1.mu"
  ParamKind kind;
  double lower;      // value-domain limits, inclusive
  double upper;
  bool tunable;
  std::function<double(const ParamVector&)> get;
  std::function<void(ParamVector&, double)> set;
};

// All parameters in a fixed order.
const std::vector<ParamInfo>& ParamRegistry();
const ParamInfo* FindParam(std::string_view name);

struct GeneBound {
  double lower;
  double upper;
  bool integer;
};

// Maps the tunable subset of ParamVector to a flat gene vector.
class ParamSpace {
 public:
  // All tunable registry entries with their default limits.
  ParamSpace();

  // Narrow the limits of one parameter (value domain). Throws ConfigError if
  // the name is unknown, not tunable, or the range leaves the limits.
  void SetBounds(std::string_view name, double lower, double upper);

  std::size_t size() const { return entries_.size(); }
  const ParamInfo& info(std::size_t i) const { return *entries_[i].info; }
  double lower(std::size_t i) const { return entries_[i].lower; }
  double upper(std::size_t i) const { return entries_[i].upper; }

  std::vector<GeneBound> GeneBounds() const;
  std::vector<double> Encode(const ParamVector& p) const;
  // Writes decoded genes over `base`; genes are clamped into their bounds.
  ParamVector Decode(const std::vector<double>& genes, const ParamVector& base = {}) const;

 private:
  struct Entry {
    const ParamInfo* info;
    double lower;
    double upper;
  };
  std::vector<Entry> entries_;
};

double ToGene(ParamKind kind, double value);
double FromGene(ParamKind kind, double gene);

}  // namespace echoforge

#endif  // ECHOFORGE_PARAMS_H_
