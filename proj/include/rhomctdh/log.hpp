#pragma once

#include <string_view>

namespace rhomctdh {

enum class LogLevel { debug = 0, info = 1, warning = 2, error = 3, off = 4 };

// Messages below the threshold are dropped. Default: info.
void set_log_level(LogLevel level);
LogLevel log_level();

void log(LogLevel level, std::string_view message);

inline void log_info(std::string_view m) { log(LogLevel::info, m); }
inline void log_warning(std::string_view m) { log(LogLevel::warning, m); }

}  // namespace rhomctdh
