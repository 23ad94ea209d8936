#include "laban/util.hpp"

#include <charconv>
#include <cstdlib>
#include <iostream>

namespace laban {

std::string fmt_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("LABAN_GUIDE_LOG");
        if (!env) return 0;
        return std::atoi(env);
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[info] " << msg << "\n";
}

void log_debug(const std::string& msg) {
    if (log_level() >= 2) std::cerr << "[debug] " << msg << "\n";
}

void log_warn(const std::string& msg) {
    std::cerr << "[warn] " << msg << "\n";
}

}  // namespace laban
