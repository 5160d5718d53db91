#pragma once

// Byte-level text helpers shared by the rule verifier and the featurizer.
//
// All helpers operate on UTF-8 bytes. Only ASCII bytes are ever classified as
// whitespace, punctuation or letters, so multi-byte sequences pass through
// untouched and arbitrary (even invalid) input is safe.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ifrl::text {

bool is_valid_utf8(std::string_view s);

/// Number of code points, assuming valid UTF-8.
std::size_t codepoint_count(std::string_view s);

constexpr bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}
constexpr bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
constexpr bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
constexpr bool is_alpha(char c) { return is_upper(c) || is_lower(c); }
constexpr bool is_digit(char c) { return c >= '0' && c <= '9'; }
constexpr bool is_alnum(char c) { return is_alpha(c) || is_digit(c); }
constexpr char to_lower(char c) { return is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c; }
constexpr char to_upper(char c) { return is_lower(c) ? static_cast<char>(c - 'a' + 'A') : c; }

std::string lower(std::string_view s);
std::string upper(std::string_view s);
std::string_view trim(std::string_view s);

/// Maximal runs of non-whitespace.
std::vector<std::string_view> words(std::string_view s);

/// Lines split on '\n'; a trailing '\r' is dropped from each line.
std::vector<std::string_view> lines(std::string_view s);

/// Sentences are segments terminated by '.', '!' or '?' followed by
/// whitespace or end of text. Runs of terminators ("?!", "...") end one
/// sentence. A trailing unterminated segment with visible content counts too.
std::size_t sentence_count(std::string_view s);

/// Paragraphs are non-blank blocks separated by one or more blank lines.
std::size_t paragraph_count(std::string_view s);

/// Non-overlapping occurrences of `needle` in `haystack`, ASCII
/// case-insensitive, requiring non-alphanumeric ASCII (or text edge) on
/// both sides. Empty needle yields 0.
std::size_t count_whole_word(std::string_view haystack, std::string_view needle);

/// Replace each whole-word occurrence (same rule as count_whole_word).
std::string remove_whole_word(std::string_view haystack, std::string_view needle);

}  // namespace ifrl::text
