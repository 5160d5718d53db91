#include "ifrl/text.hpp"

#include <algorithm>

namespace ifrl::text {

bool is_valid_utf8(std::string_view s) {
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range code points.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += len;
  }
  return true;
}

std::size_t codepoint_count(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(
      s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), to_lower);
  return out;
}

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), to_upper);
  return out;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::vector<std::string_view> lines(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t nl = s.find('\n', start);
    std::string_view line =
        s.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return out;
}

namespace {

constexpr bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

}  // namespace

std::size_t sentence_count(std::string_view s) {
  std::size_t count = 0;
  bool has_content = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (is_terminator(c)) {
      has_content = true;
      const bool at_boundary = i + 1 == s.size() || is_space(s[i + 1]);
      if (at_boundary) {
        ++count;
        has_content = false;
      }
    } else if (!is_space(c)) {
      has_content = true;
    }
  }
  if (has_content) ++count;
  return count;
}

std::size_t paragraph_count(std::string_view s) {
  std::size_t count = 0;
  bool in_block = false;
  for (std::string_view line : lines(s)) {
    if (trim(line).empty()) {
      in_block = false;
    } else if (!in_block) {
      in_block = true;
      ++count;
    }
  }
  return count;
}

namespace {

bool matches_ci_at(std::string_view hay, std::size_t pos, std::string_view needle) {
  if (pos + needle.size() > hay.size()) return false;
  for (std::size_t k = 0; k < needle.size(); ++k) {
    if (to_lower(hay[pos + k]) != to_lower(needle[k])) return false;
  }
  return true;
}

bool boundary_before(std::string_view hay, std::size_t pos) {
  return pos == 0 || !is_alnum(hay[pos - 1]);
}

bool boundary_after(std::string_view hay, std::size_t end) {
  return end >= hay.size() || !is_alnum(hay[end]);
}

template <typename OnMatch>
void scan_whole_word(std::string_view hay, std::string_view needle, OnMatch&& on_match) {
  if (needle.empty()) return;
  std::size_t i = 0;
  while (i + needle.size() <= hay.size()) {
    if (matches_ci_at(hay, i, needle) && boundary_before(hay, i) &&
        boundary_after(hay, i + needle.size())) {
      on_match(i);
      i += needle.size();
    } else {
      ++i;
    }
  }
}

}  // namespace

std::size_t count_whole_word(std::string_view haystack, std::string_view needle) {
  std::size_t n = 0;
  scan_whole_word(haystack, needle, [&](std::size_t) { ++n; });
  return n;
}

std::string remove_whole_word(std::string_view haystack, std::string_view needle) {
  std::string out;
  std::size_t copied = 0;
  scan_whole_word(haystack, needle, [&](std::size_t pos) {
    out.append(haystack.substr(copied, pos - copied));
    copied = pos + needle.size();
    // Swallow one following space so removal does not leave double spaces.
    if (copied < haystack.size() && haystack[copied] == ' ') ++copied;
  });
  out.append(haystack.substr(copied));
  return out;
}

}  // namespace ifrl::text
