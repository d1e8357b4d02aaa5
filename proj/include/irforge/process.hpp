//===-- process.hpp - Subprocess execution helpers --------------*- C++ -*-===//
//
// Part of ir-forge, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#pragma once

#include "irforge/errors.hpp"

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

namespace irforge {

struct RunResult {
  int exit_code = -1;       // -1 when the process died on a signal
  std::string output;       // stdout and stderr interleaved
  bool spawn_failed = false;
};

/// Runs argv[0] with the given arguments, working directory, and extra
/// environment entries ("NAME=value"), capturing stdout+stderr combined.
/// Spawn failure (missing binary) is reported in the result, not thrown.
inline RunResult run_command(const std::vector<std::string> &argv,
                             const std::string &workdir = {},
                             const std::vector<std::string> &extra_env = {}) {
  RunResult result;
  if (argv.empty())
    throw Error(ErrorKind::Validation, "empty command");

  int pipe_fd[2];
  if (pipe(pipe_fd) != 0)
    throw Error(ErrorKind::Io, std::string("pipe: ") + std::strerror(errno));

  pid_t pid = fork();
  if (pid < 0) {
    close(pipe_fd[0]);
    close(pipe_fd[1]);
    throw Error(ErrorKind::Io, std::string("fork: ") + std::strerror(errno));
  }

  if (pid == 0) {
    close(pipe_fd[0]);
    dup2(pipe_fd[1], STDOUT_FILENO);
    dup2(pipe_fd[1], STDERR_FILENO);
    close(pipe_fd[1]);
    if (!workdir.empty() && chdir(workdir.c_str()) != 0)
      _exit(127);
    for (const std::string &kv : extra_env) {
      std::size_t eq = kv.find('=');
      if (eq != std::string::npos) {
        std::string name = kv.substr(0, eq);
        setenv(name.c_str(), kv.c_str() + eq + 1, 1);
      }
    }
    std::vector<char *> args;
    args.reserve(argv.size() + 1);
    for (const std::string &a : argv)
      args.push_back(const_cast<char *>(a.c_str()));
    args.push_back(nullptr);
    execvp(args[0], args.data());
    _exit(127);
  }

  close(pipe_fd[1]);
  char buf[4096];
  for (;;) {
    ssize_t n = read(pipe_fd[0], buf, sizeof buf);
    if (n > 0)
      result.output.append(buf, static_cast<std::size_t>(n));
    else if (n == 0)
      break;
    else if (errno != EINTR)
      break;
  }
  close(pipe_fd[0]);

  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
    // 127 with no output is the exec-failure convention above
    if (result.exit_code == 127 && result.output.empty())
      result.spawn_failed = true;
  }
  return result;
}

/// True when `path` names an executable file, or a bare command found on
/// PATH.
inline bool command_available(const std::string &path) {
  if (path.empty())
    return false;
  if (path.find('/') != std::string::npos)
    return access(path.c_str(), X_OK) == 0;
  const char *env_path = std::getenv("PATH");
  if (!env_path)
    return false;
  std::string paths = env_path;
  std::size_t pos = 0;
  while (pos <= paths.size()) {
    std::size_t colon = paths.find(':', pos);
    if (colon == std::string::npos)
      colon = paths.size();
    std::string dir = paths.substr(pos, colon - pos);
    if (!dir.empty() && access((dir + "/" + path).c_str(), X_OK) == 0)
      return true;
    pos = colon + 1;
  }
  return false;
}

} // namespace irforge
