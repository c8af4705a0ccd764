#pragma once

#include <cstddef>
#include <string_view>

namespace causalmamba {

// Warnings go to stderr unless silenced; the counter lets tests observe them.
void warn(std::string_view message);
std::size_t warning_count();
void set_warnings_silenced(bool silenced);

}  // namespace causalmamba
