#include "nbv/log.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace nbv::log {

namespace {

Level from_env() {
    const char* v = std::getenv("NBV_LOG");
    if (!v) return Level::Info;
    const std::string s(v);
    if (s == "quiet" || s == "0") return Level::Quiet;
    if (s == "debug" || s == "2") return Level::Debug;
    return Level::Info;
}

std::atomic<int>& current() {
    static std::atomic<int> l{static_cast<int>(from_env())};
    return l;
}

}  // namespace

Level level() { return static_cast<Level>(current().load()); }
void set_level(Level l) { current().store(static_cast<int>(l)); }

}  // namespace nbv::log
