#include "ifrl/hard_verifier.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "ifrl/error.hpp"
#include "ifrl/text.hpp"

namespace ifrl {

namespace {

std::string required(Relation relation, std::int64_t bound) {
  return "required " + std::string(to_string(relation)) + " " + std::to_string(bound);
}

VerificationResult counted(const char* what, std::size_t observed, const CountParams& p) {
  const auto n = static_cast<std::int64_t>(observed);
  return {{}, holds(p.relation, n, p.count),
          std::string(what) + "=" + std::to_string(n) + ", " + required(p.relation, p.count)};
}

std::size_t count_highlights(std::string_view s) {
  const auto span_end = [&](std::size_t from) {
    std::size_t k = from;
    while (k < s.size() && s[k] != '*' && s[k] != '\n') ++k;
    return k;
  };
  std::size_t count = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '*') {
      ++i;
      continue;
    }
    if (i + 1 < s.size() && s[i + 1] == '*') {
      const std::size_t k = span_end(i + 2);
      if (k + 1 < s.size() && s[k] == '*' && s[k + 1] == '*' &&
          !text::trim(s.substr(i + 2, k - i - 2)).empty()) {
        ++count;
        i = k + 2;
        continue;
      }
    }
    const std::size_t k = span_end(i + 1);
    if (k < s.size() && s[k] == '*' && !text::trim(s.substr(i + 1, k - i - 1)).empty()) {
      ++count;
      i = k + 1;
      continue;
    }
    ++i;
  }
  return count;
}

std::size_t count_titles(std::string_view s) {
  std::size_t count = 0;
  std::size_t i = 0;
  while ((i = s.find("<<", i)) != std::string_view::npos) {
    std::size_t k = i + 2;
    while (k + 1 < s.size() && s[k] != '\n' && !(s[k] == '>' && s[k + 1] == '>')) ++k;
    if (k + 1 < s.size() && s[k] == '>' && s[k + 1] == '>' &&
        !text::trim(s.substr(i + 2, k - i - 2)).empty()) {
      ++count;
      i = k + 2;
    } else {
      i += 2;
    }
  }
  return count;
}

std::string_view left_trim(std::string_view s) {
  std::size_t b = 0;
  while (b < s.size() && text::is_space(s[b])) ++b;
  return s.substr(b);
}

std::size_t count_bullets(std::string_view s) {
  std::size_t count = 0;
  for (auto line : text::lines(s)) {
    line = left_trim(line);
    if (line.size() >= 2 && (line[0] == '*' || line[0] == '-') &&
        (line[1] == ' ' || line[1] == '\t') && !text::trim(line.substr(2)).empty()) {
      ++count;
    }
  }
  return count;
}

std::size_t count_numbered(std::string_view s) {
  std::size_t count = 0;
  for (auto line : text::lines(s)) {
    line = left_trim(line);
    std::size_t d = 0;
    while (d < line.size() && text::is_digit(line[d])) ++d;
    if (d == 0 || d + 1 >= line.size()) continue;
    if ((line[d] == '.' || line[d] == ')') && (line[d + 1] == ' ' || line[d + 1] == '\t') &&
        !text::trim(line.substr(d + 2)).empty()) {
      ++count;
    }
  }
  return count;
}

bool is_ascii_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && !text::is_alnum(c) && !text::is_space(c);
}

std::size_t count_all_caps_words(std::string_view s) {
  std::size_t count = 0;
  for (auto w : text::words(s)) {
    while (!w.empty() && is_ascii_punct(w.front())) w.remove_prefix(1);
    while (!w.empty() && is_ascii_punct(w.back())) w.remove_suffix(1);
    if (w.size() < 2) continue;
    bool all_upper = true;
    for (char c : w) all_upper = all_upper && text::is_upper(c);
    if (all_upper) ++count;
  }
  return count;
}

std::size_t count_letter(std::string_view s, std::string_view letter) {
  if (letter.size() == 1 && text::is_alpha(letter[0])) {
    const char want = text::to_lower(letter[0]);
    std::size_t n = 0;
    for (char c : s) n += text::to_lower(c) == want ? 1 : 0;
    return n;
  }
  std::size_t n = 0;
  for (std::size_t i = s.find(letter); i != std::string_view::npos; i = s.find(letter, i + letter.size())) {
    ++n;
  }
  return n;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

VerificationResult check_rule(std::string_view s, const HardRule& rule) {
  switch (rule.type) {
    case RuleType::kWordCount:
      return counted("words", text::words(s).size(), std::get<CountParams>(rule.params));
    case RuleType::kSentenceCount:
      return counted("sentences", text::sentence_count(s), std::get<CountParams>(rule.params));
    case RuleType::kParagraphCount:
      return counted("paragraphs", text::paragraph_count(s), std::get<CountParams>(rule.params));
    case RuleType::kBulletPointCount:
      return counted("bullets", count_bullets(s), std::get<CountParams>(rule.params));
    case RuleType::kNumberedListCount:
      return counted("numbered_items", count_numbered(s), std::get<CountParams>(rule.params));
    case RuleType::kMarkdownHighlightSections:
      return counted("highlights", count_highlights(s), std::get<CountParams>(rule.params));
    case RuleType::kAllCapsWordFrequency:
      return counted("all_caps_words", count_all_caps_words(s), std::get<CountParams>(rule.params));
    case RuleType::kJsonFormat: {
      const bool ok = nlohmann::json::accept(text::trim(s));
      return {{}, ok, ok ? "json=valid" : "json=invalid"};
    }
    case RuleType::kAllCapitalLetters:
    case RuleType::kAllLowercase: {
      std::size_t upper = 0;
      std::size_t lower = 0;
      for (char c : s) {
        upper += text::is_upper(c) ? 1 : 0;
        lower += text::is_lower(c) ? 1 : 0;
      }
      const bool want_upper = rule.type == RuleType::kAllCapitalLetters;
      const std::size_t wrong = want_upper ? lower : upper;
      return {{}, wrong == 0 && upper + lower > 0,
              std::string(want_upper ? "lowercase_letters=" : "uppercase_letters=") +
                  std::to_string(wrong) + ", cased_letters=" + std::to_string(upper + lower)};
    }
    case RuleType::kLetterFrequency: {
      const auto& p = std::get<LetterParams>(rule.params);
      const auto n = static_cast<std::int64_t>(count_letter(s, p.letter));
      return {{}, holds(p.relation, n, p.count),
              "letter '" + p.letter + "' count=" + std::to_string(n) + ", " +
                  required(p.relation, p.count)};
    }
    case RuleType::kKeywordInclusion:
    case RuleType::kKeywordExclusion: {
      const auto& kw = std::get<KeywordParams>(rule.params).keyword;
      const std::size_t n = text::count_whole_word(s, text::trim(kw));
      const bool ok = rule.type == RuleType::kKeywordInclusion ? n > 0 : n == 0;
      return {{}, ok, "keyword '" + kw + "' occurrences=" + std::to_string(n)};
    }
    case RuleType::kWrappedInDoubleQuotes: {
      const auto t = text::trim(s);
      const bool lead = !t.empty() && t.front() == '"';
      const bool trail = t.size() >= 2 && t.back() == '"';
      return {{}, lead && trail,
              "leading_quote=" + bool_str(lead) + ", trailing_quote=" + bool_str(trail)};
    }
    case RuleType::kStartsWithPhrase: {
      const auto phrase = text::trim(std::get<PhraseParams>(rule.params).phrase);
      const bool ok = text::trim(s).starts_with(phrase);
      return {{}, ok, "prefix_match=" + bool_str(ok)};
    }
    case RuleType::kEndsWithPhrase: {
      const auto phrase = text::trim(std::get<PhraseParams>(rule.params).phrase);
      const bool ok = text::trim(s).ends_with(phrase);
      return {{}, ok, "suffix_match=" + bool_str(ok)};
    }
    case RuleType::kTitleInDoubleAngularBrackets: {
      const std::size_t n = count_titles(s);
      return {{}, n > 0, "titles=" + std::to_string(n)};
    }
    case RuleType::kNoCommas: {
      const std::size_t n = static_cast<std::size_t>(std::count(s.begin(), s.end(), ','));
      return {{}, n == 0, "commas=" + std::to_string(n)};
    }
  }
  fail(ErrorKind::kUnsupported,
       "unsupported rule_type id " + std::to_string(static_cast<int>(rule.type)));
}

std::string schema_text(ParamShape shape) {
  switch (shape) {
    case ParamShape::kNone:
      return "{}";
    case ParamShape::kCount:
      return "{relation: at_least|at_most|exactly, count: integer >= 0}";
    case ParamShape::kLetter:
      return "{letter: one character, relation: at_least|at_most|exactly, count: integer >= 0}";
    case ParamShape::kKeyword:
      return "{keyword: non-empty string}";
    case ParamShape::kPhrase:
      return "{phrase: non-empty string}";
  }
  return "{}";
}

std::string catalog_description(RuleType type) {
  switch (type) {
    case RuleType::kAllCapitalLetters:
      return "No lowercase ASCII letters and at least one uppercase letter.";
    case RuleType::kAllCapsWordFrequency:
      return "Count of words (length >= 2, edge punctuation stripped) made only of uppercase letters.";
    case RuleType::kAllLowercase:
      return "No uppercase ASCII letters and at least one lowercase letter.";
    case RuleType::kBulletPointCount:
      return "Lines starting with '* ' or '- ' after indentation.";
    case RuleType::kEndsWithPhrase:
      return "Trimmed response ends with the exact phrase.";
    case RuleType::kJsonFormat:
      return "Entire trimmed response parses as a single JSON value.";
    case RuleType::kKeywordExclusion:
      return "Keyword absent (case-insensitive, whole word).";
    case RuleType::kKeywordInclusion:
      return "Keyword present (case-insensitive, whole word).";
    case RuleType::kLetterFrequency:
      return "Occurrences of one letter, case-insensitive for ASCII letters.";
    case RuleType::kMarkdownHighlightSections:
      return "Non-overlapping *...* or **...** spans with non-empty interior on one line.";
    case RuleType::kNoCommas:
      return "No ASCII comma anywhere in the response.";
    case RuleType::kNumberedListCount:
      return "Lines starting with digits followed by '.' or ')' and a space.";
    case RuleType::kParagraphCount:
      return "Non-blank blocks separated by one or more blank lines.";
    case RuleType::kSentenceCount:
      return "Segments ended by '.', '!' or '?' followed by whitespace or end of text.";
    case RuleType::kStartsWithPhrase:
      return "Trimmed response starts with the exact phrase.";
    case RuleType::kTitleInDoubleAngularBrackets:
      return "At least one <<title>> with non-empty interior on one line.";
    case RuleType::kWordCount:
      return "Maximal runs of non-whitespace.";
    case RuleType::kWrappedInDoubleQuotes:
      return "Trimmed response starts and ends with a double quotation mark.";
  }
  return {};
}

}  // namespace

VerificationResult verify(std::string_view response_text, const HardRule& rule) {
  validate(rule);
  return check_rule(response_text, rule);
}

VerificationResult verify(std::string_view response_text, const Constraint& constraint) {
  if (!constraint.rule) {
    fail(ErrorKind::kValidation, "constraint(" + constraint.id + "): not a hard constraint");
  }
  auto result = verify(response_text, *constraint.rule);
  result.constraint_id = constraint.id;
  return result;
}

std::vector<VerificationResult> verify_all(std::string_view response_text,
                                           std::span<const HardRule> rules) {
  std::vector<VerificationResult> out;
  out.reserve(rules.size());
  for (std::size_t i = 0; i < rules.size(); ++i) {
    try {
      out.push_back(verify(response_text, rules[i]));
    } catch (const Error& e) {
      fail(e.kind(), "rules[" + std::to_string(i) + "]: " + e.what());
    }
  }
  return out;
}

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = [] {
    std::vector<CatalogEntry> out;
    for (RuleType t : all_rule_types()) {
      out.push_back({t, std::string(to_string(t)), schema_text(param_shape(t)),
                     catalog_description(t)});
    }
    return out;
  }();
  return entries;
}

VerificationResult RuleVerifier::check(std::string_view response_text,
                                       const Constraint& constraint) const {
  return verify(response_text, constraint);
}

const RuleVerifier& default_verifier() {
  static const RuleVerifier instance;
  return instance;
}

}  // namespace ifrl
