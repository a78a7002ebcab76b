#include "echoforge/log.h"

#include <cstdlib>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>

#include "echoforge/errors.h"

namespace echoforge::log {

void SetLevel(std::string_view level) {
  const std::string name(level);
  const auto parsed = spdlog::level::from_str(name);
  // from_str maps anything unknown to "off".
  if (parsed == spdlog::level::off && name != "off") {
    throw ConfigError("unknown log level '" + name + "'", "ECHOFORGE_LOG");
  }
  spdlog::set_level(parsed);
}

void Init(std::string_view fallback) {
  static bool sink_installed = false;
  if (!sink_installed) {
    auto logger = spdlog::stderr_color_mt("echoforge");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    sink_installed = true;
  }
  const char* env = std::getenv("ECHOFORGE_LOG");
  SetLevel(env && *env ? std::string_view(env) : fallback);
}

}  // namespace echoforge::log
