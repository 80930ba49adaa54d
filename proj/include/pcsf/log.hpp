#pragma once

#include <string_view>

// Diagnostics on stderr, filtered by the PCSF_LOG environment variable
// (debug | info | warn; default warn).
namespace pcsf::log {

enum class Level { debug = 0, info = 1, warn = 2 };

Level threshold();
void write(Level level, std::string_view message);

inline void debug(std::string_view m) { write(Level::debug, m); }
inline void info(std::string_view m) { write(Level::info, m); }
inline void warn(std::string_view m) { write(Level::warn, m); }

}  // namespace pcsf::log
