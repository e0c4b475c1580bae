#pragma once

#include <string>

namespace corenet {

enum class LogLevel { kQuiet, kError, kWarning, kInfo, kDebug };

// Read once from CORENET_LOG (quiet|error|warn|info|debug); default warn.
LogLevel log_level();
void set_log_level(LogLevel level);

// Lines go to standard error as "corenet: <level>: <message>".
void log_error(const std::string& message);
void log_warning(const std::string& message);
void log_info(const std::string& message);
void log_debug(const std::string& message);

}  // namespace corenet
