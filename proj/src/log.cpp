#include "pcsf/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace pcsf::log {

Level threshold() {
  static const Level level = [] {
    const char* env = std::getenv("PCSF_LOG");
    const std::string v = env ? env : "";
    if (v == "debug") return Level::debug;
    if (v == "info") return Level::info;
    return Level::warn;
  }();
  return level;
}

void write(Level level, std::string_view message) {
  if (level < threshold()) return;
  static std::mutex mu;
  static constexpr const char* names[] = {"debug", "info", "warn"};
  std::lock_guard lock(mu);
  std::cerr << "[pcsf " << names[static_cast<int>(level)] << "] " << message << '\n';
}

}  // namespace pcsf::log
