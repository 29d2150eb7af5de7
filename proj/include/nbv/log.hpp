#pragma once

#include <iostream>
#include <sstream>
#include <string>

namespace nbv::log {

enum class Level { Quiet = 0, Info = 1, Debug = 2 };

/// Verbosity from NBV_LOG ("quiet"/"0", "info"/"1", "debug"/"2"); default info.
Level level();
void set_level(Level l);

template <typename... Args>
void write(Level at, const Args&... args) {
    if (static_cast<int>(level()) < static_cast<int>(at)) return;
    std::ostringstream os;
    (os << ... << args);
    std::clog << "[nbv] " << os.str() << '\n';
}

template <typename... Args>
void info(const Args&... args) { write(Level::Info, args...); }
template <typename... Args>
void debug(const Args&... args) { write(Level::Debug, args...); }

}  // namespace nbv::log
