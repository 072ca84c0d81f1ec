#pragma once

#include <functional>
#include <string_view>

namespace gplmk {

enum class LogLevel { Debug, Info, Warning };

using LogSink = std::function<void(LogLevel, std::string_view)>;

// Replaces the process-wide sink. Passing an empty function restores the
// default, which writes warnings to stderr and drops everything else.
void set_log_sink(LogSink sink);
void set_log_level(LogLevel min_level);

void log_message(LogLevel level, std::string_view message);

inline void log_debug(std::string_view m) { log_message(LogLevel::Debug, m); }
inline void log_info(std::string_view m) { log_message(LogLevel::Info, m); }
inline void log_warn(std::string_view m) { log_message(LogLevel::Warning, m); }

}  // namespace gplmk
