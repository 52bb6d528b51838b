#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace catsforge {

// Decodes the codepoint starting at byte i and advances i past it.
// Malformed bytes decode as U+FFFD and advance by one byte.
char32_t utf8_next(std::string_view s, std::size_t& i);

void utf8_append(std::string& out, char32_t cp);

// CJK ideographs, kana, fullwidth forms and CJK punctuation.
bool is_cjk(char32_t cp);

bool is_space_cp(char32_t cp);

std::string to_lower_ascii(std::string_view s);

// Trims ASCII whitespace from both ends.
std::string strip(std::string_view s);

// Removes every whitespace codepoint (ASCII + U+00A0 + U+3000).
std::string remove_whitespace(std::string_view s);

bool contains(std::string_view hay, std::string_view needle);

// Non-overlapping occurrence count; 0 for an empty needle.
std::size_t count_occurrences(std::string_view hay, std::string_view needle);

std::vector<std::string> split(std::string_view s, char sep);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Codepoints that are not whitespace; one CJK character counts as one.
std::size_t count_non_whitespace_chars(std::string_view s);

}  // namespace catsforge
