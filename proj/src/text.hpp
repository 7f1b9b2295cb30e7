#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gradphon {

/// Splits UTF-8 text into code points, each returned as its own byte string.
/// Malformed sequences are passed through one byte at a time.
std::vector<std::string> utf8_symbols(std::string_view text);

std::string_view trim(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);

}  // namespace gradphon
