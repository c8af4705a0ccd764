#include "causalmamba/logging.hpp"

#include <atomic>
#include <iostream>

namespace causalmamba {

namespace {
std::atomic<std::size_t> g_warnings{0};
std::atomic<bool> g_silenced{false};
}  // namespace

void warn(std::string_view message) {
  ++g_warnings;
  if (!g_silenced) std::cerr << "[warn] " << message << '\n';
}

std::size_t warning_count() { return g_warnings; }

void set_warnings_silenced(bool silenced) { g_silenced = silenced; }

}  // namespace causalmamba
