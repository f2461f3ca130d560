#pragma once

#include <string>

namespace tlsdd::cli {

/// Self-contained matplotlib script that renders the CSV written for `protocol`.
std::string plot_script(const std::string& protocol);

}  // namespace tlsdd::cli
