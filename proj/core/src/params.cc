#include "echoforge/params.h"

#include <algorithm>
#include <cmath>
#include <type_traits>
#include <utility>

#include "echoforge/errors.h"

namespace echoforge {
namespace {

using K = ParamKind;

template <typename T>
ParamInfo Make(std::string name, K kind, double lo, double hi, bool tunable,
               T ParamVector::*block, auto field) {
  using F = std::remove_reference_t<decltype(std::declval<T&>().*field)>;
  ParamInfo info;
  info.name = std::move(name);
  info.kind = kind;
  info.lower = lo;
  info.upper = hi;
  info.tunable = tunable;
  info.get = [block, field](const ParamVector& p) { return static_cast<double>(p.*block.*field); };
  info.set = [block, field](ParamVector& p, double v) {
    if constexpr (std::is_same_v<F, bool>) {
      p.*block.*field = v != 0.0;
    } else if constexpr (std::is_integral_v<F>) {
      p.*block.*field = static_cast<F>(std::llround(v));
    } else {
      p.*block.*field = v;
    }
  };
  return info;
}

void AddRaec(std::vector<ParamInfo>& r, const std::string& s, RaecParams ParamVector::*b) {
  r.push_back(Make(s + ".frame_size", K::kPowerOfTwo, 64, 1024, true, b, &RaecParams::frame_size));
  r.push_back(Make(s + ".partitions", K::kInteger, 1, 16, true, b, &RaecParams::num_partitions));
  r.push_back(Make(s + ".iterations", K::kInteger, 1, 4, true, b, &RaecParams::num_iterations));
  r.push_back(Make(s + ".mu", K::kReal, 0.0, 1.5, true, b, &RaecParams::step_size));
  r.push_back(Make(s + ".gamma", K::kReal, 0.25, 6.0, true, b, &RaecParams::robust_tuning));
  r.push_back(Make(s + ".alpha", K::kReal, 0.5, 0.995, true, b, &RaecParams::psd_smoothing));
  r.push_back(
      Make(s + ".scale_hold", K::kReal, 0.1, 60.0, false, b, &RaecParams::scale_hold_seconds));
}

std::vector<ParamInfo> BuildRegistry() {
  std::vector<ParamInfo> r;
  AddRaec(r, "raec1", &ParamVector::raec1);
  AddRaec(r, "raec2", &ParamVector::raec2);

  const auto d = &ParamVector::dtp;
  r.push_back(Make("dtp.a01", K::kLog, 1e-4, 0.3, true, d, &DtpParams::a01));
  r.push_back(Make("dtp.a10", K::kLog, 1e-4, 0.3, true, d, &DtpParams::a10));
  r.push_back(Make("dtp.b01", K::kReal, 0.0, 0.45, true, d, &DtpParams::b01));
  r.push_back(Make("dtp.b10", K::kReal, 0.0, 0.45, true, d, &DtpParams::b10));
  r.push_back(Make("dtp.alpha", K::kReal, 0.0, 0.99, true, d, &DtpParams::alpha));
  r.push_back(Make("dtp.beta", K::kReal, 0.0, 0.95, true, d, &DtpParams::beta));
  r.push_back(Make("dtp.k_begin", K::kInteger, 2, 30, true, d, &DtpParams::k_begin));
  r.push_back(Make("dtp.k_end", K::kInteger, 60, 200, true, d, &DtpParams::k_end));
  r.push_back(Make("dtp.frame_duration", K::kReal, 0.004, 0.064, true, d,
                   &DtpParams::frame_duration));
  r.push_back(Make("dtp.tau", K::kLog, 0.01, 1.0, true, d, &DtpParams::tau));

  const auto p = &ParamVector::rpe;
  r.push_back(Make("rpe.partitions_high", K::kInteger, 1, 8, true, p, &RpeParams::partitions_high));
  r.push_back(Make("rpe.partitions_low", K::kInteger, 1, 8, true, p, &RpeParams::partitions_low));
  r.push_back(Make("rpe.alpha_high", K::kReal, 0.5, 0.995, true, p, &RpeParams::alpha_high));
  r.push_back(Make("rpe.alpha_low", K::kReal, 0.5, 0.995, true, p, &RpeParams::alpha_low));

  const auto n = &ParamVector::npe;
  r.push_back(Make("npe.xi_h1", K::kLog, 1.0, 1000.0, true, n, &NpeParams::xi_h1));
  r.push_back(Make("npe.p_th", K::kReal, 0.5, 0.999, true, n, &NpeParams::p_threshold));
  r.push_back(Make("npe.alpha_p", K::kReal, 0.0, 0.99, true, n, &NpeParams::alpha_p));
  r.push_back(Make("npe.alpha_npe", K::kReal, 0.0, 0.99, true, n, &NpeParams::alpha_npe));

  const auto s = &ParamVector::suppressor;
  r.push_back(Make("ns.alpha_dd", K::kReal, 0.5, 0.999, true, s, &SuppressorParams::dd_smoothing));
  r.push_back(Make("mask.g_min", K::kReal, 0.0, 1.0, true, s, &SuppressorParams::g_min));
  // theta1 stays below 0 dB and theta2 above it, so any draw keeps
  // theta1 < theta2.
  r.push_back(Make("mask.theta1", K::kLog, std::pow(10.0, -1.5), std::pow(10.0, -0.05), true, s,
                   &SuppressorParams::theta1));
  r.push_back(Make("mask.theta2", K::kLog, std::pow(10.0, 0.05), std::pow(10.0, 1.5), true, s,
                   &SuppressorParams::theta2));
  r.push_back(Make("mask.alpha", K::kReal, 0.0, 2.0, true, s, &SuppressorParams::alpha));
  r.push_back(Make("mask.cap_unity", K::kBool, 0, 1, false, s, &SuppressorParams::cap_unity));

  const auto v = &ParamVector::vad;
  r.push_back(Make("vad.eta", K::kReal, 0.0, 500.0, true, v, &VadParams::eta));
  r.push_back(Make("vad.hangover", K::kInteger, 0, 50, true, v, &VadParams::hangover_frames));
  return r;
}

}  // namespace

void ParamVector::Validate(std::size_t num_bins) const {
  raec1.Validate("raec1");
  raec2.Validate("raec2");
  dtp.Validate(num_bins, "dtp");
  rpe.Validate("rpe");
  npe.Validate("npe");
  suppressor.Validate();
  vad.Validate();
}

const std::vector<ParamInfo>& ParamRegistry() {
  static const std::vector<ParamInfo> registry = BuildRegistry();
  return registry;
}

const ParamInfo* FindParam(std::string_view name) {
  for (const auto& info : ParamRegistry()) {
    if (info.name == name) return &info;
  }
  return nullptr;
}

double ToGene(ParamKind kind, double value) {
  switch (kind) {
    case K::kLog:
    case K::kPowerOfTwo:
      return std::log2(value);
    default:
      return value;
  }
}

double FromGene(ParamKind kind, double gene) {
  switch (kind) {
    case K::kLog:
      return std::exp2(gene);
    case K::kPowerOfTwo:
      return std::exp2(std::round(gene));
    case K::kInteger:
    case K::kBool:
      return std::round(gene);
    default:
      return gene;
  }
}

ParamSpace::ParamSpace() {
  for (const auto& info : ParamRegistry()) {
    if (info.tunable) entries_.push_back({&info, info.lower, info.upper});
  }
}

void ParamSpace::SetBounds(std::string_view name, double lower, double upper) {
  for (auto& e : entries_) {
    if (e.info->name != name) continue;
    if (!(lower <= upper) || lower < e.info->lower || upper > e.info->upper) {
      throw ConfigError("bounds for " + e.info->name + " must satisfy " +
                            std::to_string(e.info->lower) + " <= lower <= upper <= " +
                            std::to_string(e.info->upper),
                        e.info->name);
    }
    e.lower = lower;
    e.upper = upper;
    return;
  }
  throw ConfigError("no tunable parameter named " + std::string(name), std::string(name));
}

std::vector<GeneBound> ParamSpace::GeneBounds() const {
  std::vector<GeneBound> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) {
    const bool integer = e.info->kind == K::kInteger || e.info->kind == K::kPowerOfTwo;
    out.push_back({ToGene(e.info->kind, e.lower), ToGene(e.info->kind, e.upper), integer});
  }
  return out;
}

std::vector<double> ParamSpace::Encode(const ParamVector& p) const {
  std::vector<double> genes;
  genes.reserve(entries_.size());
  for (const auto& e : entries_) {
    const double v = std::clamp(e.info->get(p), e.lower, e.upper);
    genes.push_back(ToGene(e.info->kind, v));
  }
  return genes;
}

ParamVector ParamSpace::Decode(const std::vector<double>& genes, const ParamVector& base) const {
  if (genes.size() != entries_.size()) throw ShapeError("ParamSpace::Decode: gene count mismatch");
  ParamVector p = base;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    const double v = std::clamp(FromGene(e.info->kind, genes[i]), e.lower, e.upper);
    e.info->set(p, v);
  }
  return p;
}

}  // namespace echoforge
