#include "certctl/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace certctl {

namespace {
LogLevel g_level = LogLevel::Warn;

const char* level_name(LogLevel l) {
  switch (l) {
    case LogLevel::Debug: return "debug";
    case LogLevel::Info: return "info";
    case LogLevel::Warn: return "warn";
    case LogLevel::Error: return "error";
  }
  return "?";
}
}  // namespace

void set_log_level(LogLevel level) { g_level = level; }

void init_logging_from_env() {
  const char* env = std::getenv("CERTCTL_LOG");
  if (!env) return;
  if (std::strcmp(env, "debug") == 0) g_level = LogLevel::Debug;
  else if (std::strcmp(env, "info") == 0) g_level = LogLevel::Info;
  else if (std::strcmp(env, "warn") == 0) g_level = LogLevel::Warn;
  else if (std::strcmp(env, "error") == 0) g_level = LogLevel::Error;
}

void log_message(LogLevel level, const std::string& msg) {
  if (level < g_level) return;
  std::fprintf(stderr, "[certctl %s] %s\n", level_name(level), msg.c_str());
}

}  // namespace certctl
