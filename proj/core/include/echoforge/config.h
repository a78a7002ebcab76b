#ifndef ECHOFORGE_CONFIG_H_
#define ECHOFORGE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "echoforge/params.h"

namespace echoforge {

// Plain-text settings: one `key = value` per line, `#` starts a comment,
// keys are dotted (`raec1.mu`). Lists are comma separated. Every key must
// be read by someone; RequireAllConsumed() reports the rest.
class Config {
 public:
  Config() = default;

  // Throws ConfigError naming the line on syntax errors or duplicate keys.
  static Config Parse(std::string_view text, std::string source = "<config>");
  // Throws IoError naming the path if the file cannot be read. Relative
  // paths inside the file resolve against its directory.
  static Config Load(const std::filesystem::path& path);

  bool Has(const std::string& key) const { return entries_.count(key) != 0; }
  void Set(const std::string& key, std::string value);

  // Getters mark the key as consumed. Missing keys return the fallback.
  std::optional<std::string> GetString(const std::string& key);
  double GetDouble(const std::string& key, double fallback);
  std::int64_t GetInt(const std::string& key, std::int64_t fallback);
  std::uint64_t GetUint64(const std::string& key, std::uint64_t fallback);
  bool GetBool(const std::string& key, bool fallback);
  std::vector<std::string> GetList(const std::string& key);
  // "lo, hi" with lo <= hi.
  std::optional<std::pair<double, double>> GetRange(const std::string& key);
  std::filesystem::path GetPath(const std::string& key);
  std::vector<std::filesystem::path> GetPathList(const std::string& key);

  std::vector<std::string> KeysWithPrefix(std::string_view prefix) const;
  void RequireAllConsumed() const;

  const std::filesystem::path& base_dir() const { return base_dir_; }
  void set_base_dir(std::filesystem::path dir) { base_dir_ = std::move(dir); }
  const std::string& source() const { return source_; }

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  const Entry* Find(const std::string& key);
  [[noreturn]] void Fail(const std::string& key, const std::string& what) const;

  std::map<std::string, Entry> entries_;
  std::set<std::string> consumed_;
  std::string source_;
  std::filesystem::path base_dir_;
};

// Reads every ParamRegistry key present in `config` into `params`. Values
// outside the registry limits or failing validation raise ConfigError
// naming the key.
void ApplyParams(Config& config, ParamVector& params);

// All registry keys with full precision, ready for Config::Parse.
std::string FormatParams(const ParamVector& params);

double ParseDouble(std::string_view text, const std::string& what);

}  // namespace echoforge

#endif  // ECHOFORGE_CONFIG_H_
