#include "corenet/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string_view>

namespace corenet {

namespace {

LogLevel from_env() {
  const char* raw = std::getenv("CORENET_LOG");
  if (raw == nullptr) return LogLevel::kWarning;
  const std::string_view v(raw);
  if (v == "quiet" || v == "0") return LogLevel::kQuiet;
  if (v == "error") return LogLevel::kError;
  if (v == "info") return LogLevel::kInfo;
  if (v == "debug") return LogLevel::kDebug;
  return LogLevel::kWarning;
}

std::atomic<LogLevel>& level_ref() {
  static std::atomic<LogLevel> level{from_env()};
  return level;
}

void emit(LogLevel level, const char* tag, const std::string& message) {
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  static std::mutex mu;
  const std::lock_guard lock(mu);
  std::cerr << "corenet: " << tag << ": " << message << '\n';
}

}  // namespace

LogLevel log_level() { return level_ref().load(); }
void set_log_level(LogLevel level) { level_ref().store(level); }

void log_error(const std::string& message) { emit(LogLevel::kError, "error", message); }
void log_warning(const std::string& message) { emit(LogLevel::kWarning, "warning", message); }
void log_info(const std::string& message) { emit(LogLevel::kInfo, "info", message); }
void log_debug(const std::string& message) { emit(LogLevel::kDebug, "debug", message); }

}  // namespace corenet
