#pragma once

#include <string>

namespace certctl {

enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Error = 3 };

/// Reads CERTCTL_LOG (debug|info|warn|error); default warn.
void init_logging_from_env();
void set_log_level(LogLevel level);
void log_message(LogLevel level, const std::string& msg);

inline void log_debug(const std::string& msg) { log_message(LogLevel::Debug, msg); }
inline void log_info(const std::string& msg) { log_message(LogLevel::Info, msg); }
inline void log_warn(const std::string& msg) { log_message(LogLevel::Warn, msg); }
inline void log_error(const std::string& msg) { log_message(LogLevel::Error, msg); }

}  // namespace certctl
