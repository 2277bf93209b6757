#pragma once

#include <string>

namespace dtrack {

// shortest decimal that round-trips the exact double; stable across platforms
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

}  // namespace dtrack
