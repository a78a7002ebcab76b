#ifndef ECHOFORGE_LOG_H_
#define ECHOFORGE_LOG_H_

#include <string_view>
#include <utility>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace echoforge::log {

// Sets the level from ECHOFORGE_LOG (trace, debug, info, warn, error, off),
// falling back to `fallback`. Logging goes to stderr.
void Init(std::string_view fallback = "warn");

// Throws ConfigError for an unknown level name.
void SetLevel(std::string_view level);

template <typename... Args>
void Debug(fmt::format_string<Args...> f, Args&&... args) {
  if (spdlog::should_log(spdlog::level::debug)) {
    spdlog::log(spdlog::level::debug, fmt::format(f, std::forward<Args>(args)...));
  }
}
template <typename... Args>
void Info(fmt::format_string<Args...> f, Args&&... args) {
  if (spdlog::should_log(spdlog::level::info)) {
    spdlog::log(spdlog::level::info, fmt::format(f, std::forward<Args>(args)...));
  }
}
template <typename... Args>
void Warn(fmt::format_string<Args...> f, Args&&... args) {
  if (spdlog::should_log(spdlog::level::warn)) {
    spdlog::log(spdlog::level::warn, fmt::format(f, std::forward<Args>(args)...));
  }
}
template <typename... Args>
void Error(fmt::format_string<Args...> f, Args&&... args) {
  if (spdlog::should_log(spdlog::level::err)) {
    spdlog::log(spdlog::level::err, fmt::format(f, std::forward<Args>(args)...));
  }
}

}  // namespace echoforge::log

#endif  // ECHOFORGE_LOG_H_
