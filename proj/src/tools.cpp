// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#include "examflow/tools.hpp"

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>

#include "examflow/error.hpp"
#include "examflow/image_io.hpp"
#include "json.hpp"

namespace examflow {

const ToolEntry* ToolConfig::find(std::string_view name) const {
  auto it = tools.find(std::string(name));
  return it == tools.end() ? nullptr : &it->second;
}

ToolConfig parse_tool_config(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("tool config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(Errc::InvalidConfig, "tool config must be a JSON object");
  const nlohmann::json& entries = doc.contains("tools") && doc["tools"].is_object() ? doc["tools"] : doc;
  ToolConfig cfg;
  for (const auto& [name, value] : entries.items()) {
    if (!value.is_object()) continue;  // comments, version fields and similar
    ToolEntry e;
    try {
      e.path = value.at("path").get<std::string>();
      if (value.contains("args")) e.args = value["args"].get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& ex) {
      throw Error(Errc::InvalidConfig, "tool '" + name + "': " + ex.what());
    }
    cfg.tools.emplace(name, std::move(e));
  }
  return cfg;
}

ToolConfig load_tool_config(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_tool_config(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::filesystem::path resolve_executable(std::string_view path) {
  if (path.empty()) return {};
  auto usable = [](const std::filesystem::path& p) {
    std::error_code ec;
    return std::filesystem::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
  };
  if (path.find('/') != std::string_view::npos) {
    std::filesystem::path p(path);
    return usable(p) ? std::filesystem::absolute(p) : std::filesystem::path{};
  }
  const char* env = std::getenv("PATH");
  std::string_view dirs = env ? env : "/usr/local/bin:/usr/bin:/bin";
  while (!dirs.empty()) {
    const std::size_t colon = dirs.find(':');
    std::string_view dir = dirs.substr(0, colon);
    dirs = colon == std::string_view::npos ? std::string_view{} : dirs.substr(colon + 1);
    std::filesystem::path candidate = std::filesystem::path(dir.empty() ? "." : dir) / path;
    if (usable(candidate)) return candidate;
  }
  return {};
}

std::vector<std::string> expand_args(const ToolEntry& entry, const ToolVars& vars) {
  std::vector<std::string> out;
  for (const std::string& arg : entry.args) {
    if (arg == "{inputs}") {
      out.insert(out.end(), vars.inputs.begin(), vars.inputs.end());
      continue;
    }
    std::string s;
    std::size_t i = 0;
    while (i < arg.size()) {
      if (arg[i] == '{') {
        const std::size_t close = arg.find('}', i);
        if (close != std::string::npos) {
          auto it = vars.scalars.find(arg.substr(i + 1, close - i - 1));
          if (it != vars.scalars.end()) {
            s += it->second;
            i = close + 1;
            continue;
          }
        }
      }
      s.push_back(arg[i++]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

ProcessResult run_process(const std::filesystem::path& exe, const std::vector<std::string>& args,
                          const std::filesystem::path& cwd) {
  std::vector<std::string> argv_store;
  argv_store.push_back(exe.string());
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  argv.push_back(nullptr);

  int pipefd[2];
  if (::pipe(pipefd) != 0) throw Error(Errc::Io, std::string("pipe: ") + std::strerror(errno));
  // Reports exec failure from the child: closed on success thanks to CLOEXEC.
  int errpipe[2];
  if (::pipe2(errpipe, O_CLOEXEC) != 0) {
    ::close(pipefd[0]);
    ::close(pipefd[1]);
    throw Error(Errc::Io, std::string("pipe: ") + std::strerror(errno));
  }

  const std::string dir = cwd.string();
  const pid_t pid = ::fork();
  if (pid < 0) throw Error(Errc::Io, std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::close(pipefd[0]);
    ::close(errpipe[0]);
    ::dup2(pipefd[1], STDOUT_FILENO);
    ::dup2(pipefd[1], STDERR_FILENO);
    ::close(pipefd[1]);
    const int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
    if (!dir.empty() && ::chdir(dir.c_str()) != 0) {
      const int e = errno;
      [[maybe_unused]] auto n = ::write(errpipe[1], &e, sizeof e);
      ::_exit(127);
    }
    ::execv(argv[0], argv.data());
    const int e = errno;
    [[maybe_unused]] auto n = ::write(errpipe[1], &e, sizeof e);
    ::_exit(127);
  }
  ::close(pipefd[1]);
  ::close(errpipe[1]);

  ProcessResult result;
  char buf[4096];
  for (;;) {
    const ssize_t n = ::read(pipefd[0], buf, sizeof buf);
    if (n > 0) {
      result.output.append(buf, static_cast<std::size_t>(n));
    } else if (n == 0 || errno != EINTR) {
      break;
    }
  }
  ::close(pipefd[0]);
  int child_errno = 0;
  const ssize_t got = ::read(errpipe[0], &child_errno, sizeof child_errno);
  ::close(errpipe[0]);

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (got == static_cast<ssize_t>(sizeof child_errno))
    throw Error(Errc::ToolNotFound, "cannot execute " + exe.string() + ": " + std::strerror(child_errno));
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  return result;
}

ProcessResult run_tool(const ToolConfig& config, std::string_view name, const ToolVars& vars,
                       const std::filesystem::path& cwd) {
  const ToolEntry* entry = config.find(name);
  if (!entry) throw Error(Errc::ToolNotFound, "no '" + std::string(name) + "' entry in the tool config");
  const auto exe = resolve_executable(entry->path);
  if (exe.empty())
    throw Error(Errc::ToolNotFound, std::string(name) + ": executable '" + entry->path + "' not found");
  auto result = run_process(exe, expand_args(*entry, vars), cwd);
  if (result.exit_code != 0)
    throw Error(Errc::ToolFailed, std::string(name) + " exited with status " + std::to_string(result.exit_code) +
                                      "\n" + result.output);
  return result;
}

}  // namespace examflow
