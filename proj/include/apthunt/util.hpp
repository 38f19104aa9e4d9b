#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace apthunt::util {

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// Lowercases and splits on anything that is not [a-z0-9]. Used for every
// natural-language phrase that reaches the embedding layer.
std::vector<std::string> phrase_tokens(std::string_view text);
std::string join(const std::vector<std::string>& parts, std::string_view sep = " ");

std::string sha256_hex(std::string_view data);
std::string read_file(const std::filesystem::path& path);

}  // namespace apthunt::util
