#pragma once

#include <string_view>

namespace ihmm {

// Writes a warning to std::clog. Repeats beyond a fixed budget are counted
// but not printed.
void log_warning(std::string_view message);

}  // namespace ihmm
