#include "echoforge/config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "echoforge/errors.h"

namespace echoforge {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool ValidKey(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-')) {
      return false;
    }
  }
  return true;
}

std::vector<std::string> SplitList(std::string_view s) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = s.find(',');
    const auto item = Trim(s.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

double ParseDouble(std::string_view text, const std::string& what) {
  text = Trim(text);
  std::string s(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    throw ConfigError(what + ": expected a number, got '" + s + "'", what);
  }
  return v;
}

Config Config::Parse(std::string_view text, std::string source) {
  Config cfg;
  cfg.source_ = std::move(source);
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = fmt::format("{}:{}", cfg.source_, line_no);
    if (eq == std::string_view::npos) {
      throw ConfigError(where + ": expected 'key = value'");
    }
    const std::string key(Trim(line.substr(0, eq)));
    const std::string value(Trim(line.substr(eq + 1)));
    if (!ValidKey(key)) throw ConfigError(where + ": invalid key '" + key + "'", key);
    if (cfg.entries_.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'", key);
    cfg.entries_[key] = {value, line_no};
  }
  return cfg;
}

Config Config::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path.string(), path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  Config cfg = Parse(ss.str(), path.string());
  cfg.base_dir_ = path.parent_path();
  return cfg;
}

void Config::Set(const std::string& key, std::string value) {
  if (!ValidKey(key)) throw ConfigError("invalid key '" + key + "'", key);
  entries_[key] = {std::move(value), 0};
}

const Config::Entry* Config::Find(const std::string& key) {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  consumed_.insert(key);
  return &it->second;
}

void Config::Fail(const std::string& key, const std::string& what) const {
  const auto it = entries_.find(key);
  const std::string where =
      it != entries_.end() && it->second.line > 0
          ? fmt::format("{}:{}: ", source_, it->second.line)
          : std::string();
  throw ConfigError(where + key + ": " + what, key);
}

std::optional<std::string> Config::GetString(const std::string& key) {
  const Entry* e = Find(key);
  if (!e) return std::nullopt;
  return e->value;
}

double Config::GetDouble(const std::string& key, double fallback) {
  const Entry* e = Find(key);
  if (!e) return fallback;
  try {
    return ParseDouble(e->value, key);
  } catch (const ConfigError&) {
    Fail(key, "expected a number, got '" + e->value + "'");
  }
}

std::int64_t Config::GetInt(const std::string& key, std::int64_t fallback) {
  const Entry* e = Find(key);
  if (!e) return fallback;
  std::int64_t v = 0;
  const char* b = e->value.data();
  const char* end = b + e->value.size();
  const auto [ptr, ec] = std::from_chars(b, end, v);
  if (ec != std::errc() || ptr != end) Fail(key, "expected an integer, got '" + e->value + "'");
  return v;
}

std::uint64_t Config::GetUint64(const std::string& key, std::uint64_t fallback) {
  const Entry* e = Find(key);
  if (!e) return fallback;
  std::uint64_t v = 0;
  const char* b = e->value.data();
  const char* end = b + e->value.size();
  const auto [ptr, ec] = std::from_chars(b, end, v);
  if (ec != std::errc() || ptr != end) {
    Fail(key, "expected a nonnegative integer, got '" + e->value + "'");
  }
  return v;
}

bool Config::GetBool(const std::string& key, bool fallback) {
  const Entry* e = Find(key);
  if (!e) return fallback;
  if (e->value == "true" || e->value == "1" || e->value == "yes" || e->value == "on") return true;
  if (e->value == "false" || e->value == "0" || e->value == "no" || e->value == "off") return false;
  Fail(key, "expected true or false, got '" + e->value + "'");
}

std::vector<std::string> Config::GetList(const std::string& key) {
  const Entry* e = Find(key);
  if (!e) return {};
  return SplitList(e->value);
}

std::optional<std::pair<double, double>> Config::GetRange(const std::string& key) {
  const Entry* e = Find(key);
  if (!e) return std::nullopt;
  const auto items = SplitList(e->value);
  if (items.size() != 2) Fail(key, "expected 'lo, hi'");
  double lo, hi;
  try {
    lo = ParseDouble(items[0], key);
    hi = ParseDouble(items[1], key);
  } catch (const ConfigError&) {
    Fail(key, "expected 'lo, hi' numbers, got '" + e->value + "'");
  }
  if (!(lo <= hi)) Fail(key, "range must satisfy lo <= hi");
  return std::make_pair(lo, hi);
}

std::filesystem::path Config::GetPath(const std::string& key) {
  const auto s = GetString(key);
  if (!s || s->empty()) return {};
  std::filesystem::path p(*s);
  return p.is_absolute() || base_dir_.empty() ? p : base_dir_ / p;
}

std::vector<std::filesystem::path> Config::GetPathList(const std::string& key) {
  std::vector<std::filesystem::path> out;
  for (const auto& s : GetList(key)) {
    std::filesystem::path p(s);
    out.push_back(p.is_absolute() || base_dir_.empty() ? p : base_dir_ / p);
  }
  return out;
}

std::vector<std::string> Config::KeysWithPrefix(std::string_view prefix) const {
  std::vector<std::string> out;
  for (const auto& [key, entry] : entries_) {
    if (key.compare(0, prefix.size(), prefix) == 0) out.push_back(key);
  }
  return out;
}

void Config::RequireAllConsumed() const {
  for (const auto& [key, entry] : entries_) {
    if (!consumed_.count(key)) Fail(key, "unknown key");
  }
}

void ApplyParams(Config& config, ParamVector& params) {
  // An inverted mask pair reads as an ordering mistake, not as two values
  // out of range.
  if (config.Has("mask.theta1") && config.Has("mask.theta2")) {
    const double t1 = config.GetDouble("mask.theta1", 0.0);
    const double t2 = config.GetDouble("mask.theta2", 0.0);
    if (!(t1 < t2)) {
      throw ConfigError(fmt::format("mask.theta1 = {} must be below mask.theta2 = {}", t1, t2),
                        "mask.theta1");
    }
  }
  for (const auto& info : ParamRegistry()) {
    if (!config.Has(info.name)) continue;
    double v;
    switch (info.kind) {
      case ParamKind::kBool:
        v = config.GetBool(info.name, false) ? 1.0 : 0.0;
        break;
      case ParamKind::kInteger:
      case ParamKind::kPowerOfTwo:
        v = static_cast<double>(config.GetInt(info.name, 0));
        break;
      default:
        v = config.GetDouble(info.name, 0.0);
        break;
    }
    if (v < info.lower || v > info.upper) {
      throw ConfigError(fmt::format("{} = {} is outside [{}, {}]", info.name, v, info.lower,
                                    info.upper),
                        info.name);
    }
    if (info.kind == ParamKind::kPowerOfTwo && !IsPowerOfTwo(static_cast<std::size_t>(v))) {
      throw ConfigError(info.name + " must be a power of two", info.name);
    }
    info.set(params, v);
  }
  params.Validate();
}

std::string FormatParams(const ParamVector& params) {
  std::string out;
  std::string section;
  for (const auto& info : ParamRegistry()) {
    const std::string prefix = info.name.substr(0, info.name.find('.'));
    if (prefix != section) {
      if (!section.empty()) out += '\n';
      section = prefix;
    }
    const double v = info.get(params);
    switch (info.kind) {
      case ParamKind::kBool:
        out += fmt::format("{} = {}\n", info.name, v != 0.0 ? "true" : "false");
        break;
      case ParamKind::kInteger:
      case ParamKind::kPowerOfTwo:
        out += fmt::format("{} = {}\n", info.name, static_cast<long long>(v));
        break;
      default:
        out += fmt::format("{} = {:.17g}\n", info.name, v);
        break;
    }
  }
  return out;
}

}  // namespace echoforge
