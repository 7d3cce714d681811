#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sagents::text {

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_lines(std::string_view s);
bool starts_with_ci(std::string_view s, std::string_view prefix) noexcept;
std::string replace_all(std::string s, std::string_view from, std::string_view to);

/// Zero-padded "HH:MM:SS" for a tick count (one tick is one simulated second).
std::string clock_string(unsigned long long ticks);

/// 64-bit FNV-1a.
unsigned long long fnv1a(std::string_view data, unsigned long long seed = 0xcbf29ce484222325ULL) noexcept;

}  // namespace sagents::text
