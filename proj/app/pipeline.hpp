#pragma once

#include "config.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ogc::app {

const std::vector<std::string>& command_names();

struct RunOptions {
  std::string command;
  int threads = 1;
  std::uint64_t seed = 0;
};

struct Artifact {
  std::string name;
  std::string content;
};

/// Canonical results, extra files and log lines of one command. Nothing here
/// depends on the thread count or the clock.
struct RunOutput {
  json results;
  std::vector<Artifact> files;
  std::vector<std::string> log;
};

RunOutput run_command(const RunConfig& cfg, const RunOptions& opt);

/// {"schema", "command", "status", "error": {"code", "message", "pointer"?}}.
json error_document(const std::string& command, const Error& e);

/// 2 for config errors, 1 for every other failure.
int exit_code(const Error& e);

}  // namespace ogc::app
