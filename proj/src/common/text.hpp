#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tafs::detail {

std::vector<std::string> split(std::string_view line, char delimiter);
std::string_view trim(std::string_view text);
std::string lower(std::string_view text);

/// Strict full-string double parse; false on any trailing garbage.
bool parse_double(std::string_view text, double& out);

/// Reads one line and strips a trailing '\r'. False at end of stream.
bool read_line(std::istream& in, std::string& line);

}  // namespace tafs::detail
