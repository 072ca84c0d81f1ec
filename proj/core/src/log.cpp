#include "gplmk/log.hpp"

#include <iostream>
#include <mutex>

namespace gplmk {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

LogSink& current_sink() {
  static LogSink sink;
  return sink;
}

LogLevel& current_level() {
  static LogLevel level = LogLevel::Warning;
  return level;
}

const char* level_tag(LogLevel level) {
  switch (level) {
    case LogLevel::Debug: return "debug";
    case LogLevel::Info: return "info";
    case LogLevel::Warning: return "warning";
  }
  return "?";
}

}  // namespace

void set_log_sink(LogSink sink) {
  std::lock_guard lock(sink_mutex());
  current_sink() = std::move(sink);
}

void set_log_level(LogLevel min_level) {
  std::lock_guard lock(sink_mutex());
  current_level() = min_level;
}

void log_message(LogLevel level, std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (level < current_level()) return;
  if (current_sink()) {
    current_sink()(level, message);
    return;
  }
  std::cerr << "[gplmk " << level_tag(level) << "] " << message << '\n';
}

}  // namespace gplmk
