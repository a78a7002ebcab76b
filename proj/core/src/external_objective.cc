#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "echoforge/config.h"
#include "echoforge/errors.h"
#include "echoforge/log.h"
#include "echoforge/tuner.h"

namespace echoforge {
namespace fs = std::filesystem;
namespace {

std::string ReplaceAll(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

std::string ShellQuote(const std::string& s) { return "'" + ReplaceAll(s, "'", "'\\''") + "'"; }

}  // namespace

CommandResult RunCommand(const std::string& command, std::chrono::milliseconds timeout) {
  int pipe_fd[2];
  if (pipe(pipe_fd) != 0) throw Error("pipe() failed");
  const pid_t pid = fork();
  if (pid < 0) {
    close(pipe_fd[0]);
    close(pipe_fd[1]);
    throw Error("fork() failed");
  }
  if (pid == 0) {
    setpgid(0, 0);
    dup2(pipe_fd[1], STDOUT_FILENO);
    close(pipe_fd[0]);
    close(pipe_fd[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);
  close(pipe_fd[1]);

  CommandResult result;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  char buf[4096];
  bool open = true;
  while (open) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      result.timed_out = true;
      break;
    }
    pollfd pfd{pipe_fd[0], POLLIN, 0};
    const int r = poll(&pfd, 1, static_cast<int>(left.count()));
    if (r < 0 && errno == EINTR) continue;
    if (r == 0) {
      result.timed_out = true;
      break;
    }
    const ssize_t n = read(pipe_fd[0], buf, sizeof buf);
    if (n > 0) {
      result.stdout_text.append(buf, static_cast<std::size_t>(n));
    } else if (n == 0 || errno != EINTR) {
      open = false;
    }
  }
  close(pipe_fd[0]);
  if (result.timed_out) kill(-pid, SIGKILL);
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (!result.timed_out && WIFEXITED(status)) result.exit_status = WEXITSTATUS(status);
  return result;
}

double ParseScore(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw InputError("objective command printed nothing");
  const auto last = text.find_last_not_of(" \t\r\n");
  const std::string s = text.substr(first, last - first + 1);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || std::isnan(v)) {
    throw InputError("objective command output is not a single number: '" + s + "'");
  }
  return v;
}

ExternalObjective::ExternalObjective(std::vector<LoadedItem> items, ParamSpace space,
                                     std::string command, fs::path exchange_dir,
                                     std::chrono::milliseconds timeout, ParamVector base,
                                     PipelineOptions options)
    : items_(std::move(items)),
      space_(std::move(space)),
      command_(std::move(command)),
      exchange_dir_(std::move(exchange_dir)),
      timeout_(timeout),
      base_(std::move(base)),
      options_(std::move(options)) {
  if (command_.empty()) throw ConfigError("objective command is empty", "tune.command");
  if (timeout_.count() <= 0) throw ConfigError("objective timeout must be > 0", "tune.timeout");
  if (items_.empty()) throw InputError("objective needs at least one readable corpus item");
}

double ExternalObjective::operator()(const Genes& genes, std::size_t eval_index) const {
  const ParamVector params = space_.Decode(genes, base_);
  const fs::path dir = exchange_dir_ / fmt::format("cand{:05d}", eval_index);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string(), dir.string());

  const fs::path params_path = dir / "params.cfg";
  {
    std::ofstream out(params_path);
    out << FormatParams(params);
    if (!out) throw IoError("cannot write " + params_path.string(), params_path.string());
  }
  nlohmann::json list = nlohmann::json::array();
  for (const auto& item : items_) {
    const auto result = ProcessStream(item.mix, item.reference, params, options_);
    const std::string name = item.id + ".enh.wav";
    WriteWav(dir / name, result.enhanced, SampleFormat::kFloat32);
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& s : result.segments) segs.push_back({s.start, s.end});
    list.push_back({{"id", item.id},
                    {"enhanced", name},
                    {"mix", fs::absolute(item.mix_path).string()},
                    {"clean", fs::absolute(item.clean_path).string()},
                    {"segments", segs}});
  }
  const fs::path manifest = dir / "candidate.json";
  {
    std::ofstream out(manifest);
    out << nlohmann::json{{"candidate", eval_index}, {"params", "params.cfg"}, {"items", list}}
               .dump(2)
        << '\n';
    if (!out) throw IoError("cannot write " + manifest.string(), manifest.string());
  }

  std::string cmd = ReplaceAll(command_, "{dir}", ShellQuote(dir.string()));
  cmd = ReplaceAll(cmd, "{manifest}", ShellQuote(manifest.string()));
  cmd = ReplaceAll(cmd, "{params}", ShellQuote(params_path.string()));
  const auto r = RunCommand(cmd, timeout_);
  if (r.timed_out) throw Error(fmt::format("objective command timed out after {} ms", timeout_.count()));
  if (r.exit_status != 0) {
    throw Error(fmt::format("objective command exited with status {}", r.exit_status));
  }
  return ParseScore(r.stdout_text);
}

}  // namespace echoforge
