#pragma once

#include <string>

namespace laban {

// Shortest decimal string that round-trips the double exactly (std::to_chars).
// Locale independent, so CSV output is stable across environments.
std::string fmt_double(double value);

// Log verbosity, read once from LABAN_GUIDE_LOG (0 = warnings only, 1 = info,
// 2 = debug). Messages go to stderr.
int log_level();
void log_info(const std::string& msg);
void log_debug(const std::string& msg);
void log_warn(const std::string& msg);

}  // namespace laban
