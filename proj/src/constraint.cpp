#include "ifrl/constraint.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "ifrl/error.hpp"
#include "ifrl/text.hpp"

namespace ifrl {

namespace {

struct RuleInfo {
  RuleType type;
  std::string_view name;
  ParamShape shape;
  std::string_view category;
};

// Sorted by name.
constexpr std::array<RuleInfo, 18> kRules = {{
    {RuleType::kAllCapitalLetters, "all_capital_letters", ParamShape::kNone,
     "Morphological constraint"},
    {RuleType::kAllCapsWordFrequency, "all_caps_word_frequency", ParamShape::kCount,
     "Lexical content constraint"},
    {RuleType::kAllLowercase, "all_lowercase", ParamShape::kNone, "Morphological constraint"},
    {RuleType::kBulletPointCount, "bullet_point_count", ParamShape::kCount, "Bespoke format"},
    {RuleType::kEndsWithPhrase, "ends_with_phrase", ParamShape::kPhrase,
     "Lexical content constraint"},
    {RuleType::kJsonFormat, "json_format", ParamShape::kNone, "Fundamental format"},
    {RuleType::kKeywordExclusion, "keyword_exclusion", ParamShape::kKeyword,
     "Inverse constraint"},
    {RuleType::kKeywordInclusion, "keyword_inclusion", ParamShape::kKeyword,
     "Lexical content constraint"},
    {RuleType::kLetterFrequency, "letter_frequency", ParamShape::kLetter,
     "Lexical content constraint"},
    {RuleType::kMarkdownHighlightSections, "markdown_highlight_sections", ParamShape::kCount,
     "Bespoke format"},
    {RuleType::kNoCommas, "no_commas", ParamShape::kNone, "Inverse constraint"},
    {RuleType::kNumberedListCount, "numbered_list_count", ParamShape::kCount, "Bespoke format"},
    {RuleType::kParagraphCount, "paragraph_count", ParamShape::kCount, "Paragraph Count"},
    {RuleType::kSentenceCount, "sentence_count", ParamShape::kCount, "Sentence Count"},
    {RuleType::kStartsWithPhrase, "starts_with_phrase", ParamShape::kPhrase,
     "Lexical content constraint"},
    {RuleType::kTitleInDoubleAngularBrackets, "title_in_double_angular_brackets",
     ParamShape::kNone, "Bespoke format"},
    {RuleType::kWordCount, "word_count", ParamShape::kCount, "Word Count"},
    {RuleType::kWrappedInDoubleQuotes, "wrapped_in_double_quotes", ParamShape::kNone,
     "Bespoke format"},
}};

constexpr std::array<RuleType, kRules.size()> kRuleTypes = [] {
  std::array<RuleType, kRules.size()> out{};
  for (std::size_t i = 0; i < kRules.size(); ++i) out[i] = kRules[i].type;
  return out;
}();

const RuleInfo& info(RuleType type) {
  for (const auto& r : kRules) {
    if (r.type == type) return r;
  }
  fail(ErrorKind::kUnsupported, "rule type not in catalog");
}

constexpr std::array<std::string_view, 25> kTaxonomy = {
    "Lexical content constraint", "Element constraint",      "Semantic constraint",
    "Word Count",                 "Sentence Count",          "Paragraph Count",
    "Document Count",             "Tone and emotion",        "Form and style",
    "Audience-specific",          "Authorial style",         "Fundamental format",
    "Bespoke format",             "Specialized format",      "Pragmatic constraint",
    "Syntactic constraint",       "Morphological constraint", "Phonological constraint",
    "Role-based constraint",      "Task-specific constraint", "Complex context constraint",
    "Example constraint",         "Inverse constraint",      "Contradictory constraint",
    "Rule constraint",
};

std::string_view shape_name(ParamShape shape) {
  switch (shape) {
    case ParamShape::kNone:
      return "none";
    case ParamShape::kCount:
      return "count";
    case ParamShape::kLetter:
      return "letter";
    case ParamShape::kKeyword:
      return "keyword";
    case ParamShape::kPhrase:
      return "phrase";
  }
  return "none";
}

ParamShape shape_of(const RuleParams& params) {
  return std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, NoParams>) return ParamShape::kNone;
        if constexpr (std::is_same_v<T, CountParams>) return ParamShape::kCount;
        if constexpr (std::is_same_v<T, LetterParams>) return ParamShape::kLetter;
        if constexpr (std::is_same_v<T, KeywordParams>) return ParamShape::kKeyword;
        if constexpr (std::is_same_v<T, PhraseParams>) return ParamShape::kPhrase;
      },
      params);
}

std::string relation_words(Relation r, std::int64_t n) {
  switch (r) {
    case Relation::kAtLeast:
      return "at least " + std::to_string(n);
    case Relation::kAtMost:
      return "at most " + std::to_string(n);
    case Relation::kExactly:
      return "exactly " + std::to_string(n);
  }
  return std::to_string(n);
}

// --- JSON field helpers -----------------------------------------------------

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  fail(ErrorKind::kValidation, path + ": " + what);
}

const nlohmann::json& require(const nlohmann::json& obj, const std::string& path,
                              const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path + "." + key, "missing required field");
  return *it;
}

std::string require_string(const nlohmann::json& obj, const std::string& path, const char* key) {
  const auto& v = require(obj, path, key);
  if (!v.is_string()) schema_error(path + "." + key, "expected string");
  return v.get<std::string>();
}

std::int64_t require_count(const nlohmann::json& obj, const std::string& path, const char* key) {
  const auto& v = require(obj, path, key);
  if (!v.is_number_integer()) schema_error(path + "." + key, "expected integer");
  const auto n = v.get<std::int64_t>();
  if (n < 0) schema_error(path + "." + key, "must be >= 0");
  return n;
}

void reject_unknown(const nlohmann::json& obj, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      schema_error(path + "." + key, "unknown field");
    }
  }
}

}  // namespace

std::span<const RuleType> all_rule_types() { return kRuleTypes; }

std::string_view to_string(RuleType type) { return info(type).name; }

RuleType parse_rule_type(std::string_view name) {
  for (const auto& r : kRules) {
    if (r.name == name) return r.type;
  }
  fail(ErrorKind::kUnsupported, "unsupported rule_type '" + std::string(name) + "'");
}

ParamShape param_shape(RuleType type) { return info(type).shape; }

std::string_view default_category(RuleType type) { return info(type).category; }

std::string_view to_string(Relation relation) {
  switch (relation) {
    case Relation::kAtLeast:
      return "at_least";
    case Relation::kAtMost:
      return "at_most";
    case Relation::kExactly:
      return "exactly";
  }
  return "at_least";
}

Relation parse_relation(std::string_view name) {
  if (name == "at_least") return Relation::kAtLeast;
  if (name == "at_most") return Relation::kAtMost;
  if (name == "exactly") return Relation::kExactly;
  fail(ErrorKind::kValidation, "unknown relation '" + std::string(name) + "'");
}

bool holds(Relation relation, std::int64_t observed, std::int64_t bound) {
  switch (relation) {
    case Relation::kAtLeast:
      return observed >= bound;
    case Relation::kAtMost:
      return observed <= bound;
    case Relation::kExactly:
      return observed == bound;
  }
  return false;
}

void validate(const HardRule& rule) {
  const auto& ri = info(rule.type);
  const std::string path = "rule(" + std::string(ri.name) + ")";
  if (shape_of(rule.params) != ri.shape) {
    schema_error(path, "expects " + std::string(shape_name(ri.shape)) + " parameters");
  }
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CountParams>) {
          if (p.count < 0) schema_error(path + ".count", "must be >= 0");
        } else if constexpr (std::is_same_v<T, LetterParams>) {
          if (p.count < 0) schema_error(path + ".count", "must be >= 0");
          if (!text::is_valid_utf8(p.letter) || text::codepoint_count(p.letter) != 1) {
            schema_error(path + ".letter", "must be exactly one character");
          }
          if (text::is_space(p.letter[0])) schema_error(path + ".letter", "must not be whitespace");
        } else if constexpr (std::is_same_v<T, KeywordParams>) {
          if (text::trim(p.keyword).empty()) schema_error(path + ".keyword", "must be non-empty");
          if (!text::is_valid_utf8(p.keyword)) schema_error(path + ".keyword", "invalid UTF-8");
        } else if constexpr (std::is_same_v<T, PhraseParams>) {
          if (text::trim(p.phrase).empty()) schema_error(path + ".phrase", "must be non-empty");
          if (!text::is_valid_utf8(p.phrase)) schema_error(path + ".phrase", "invalid UTF-8");
        }
      },
      rule.params);
}

std::string describe(const HardRule& rule) {
  const auto count = [&] { return std::get<CountParams>(rule.params); };
  switch (rule.type) {
    case RuleType::kAllCapitalLetters:
      return "Write the whole response using uppercase letters only.";
    case RuleType::kAllCapsWordFrequency: {
      const auto p = count();
      return "Include " + relation_words(p.relation, p.count) + " fully uppercase words.";
    }
    case RuleType::kAllLowercase:
      return "Write the whole response in lowercase letters, with no uppercase letters at all.";
    case RuleType::kBulletPointCount: {
      const auto p = count();
      return "Use " + relation_words(p.relation, p.count) + " markdown bullet points.";
    }
    case RuleType::kEndsWithPhrase:
      return "End the response with the phrase \"" +
             std::get<PhraseParams>(rule.params).phrase + "\".";
    case RuleType::kJsonFormat:
      return "Format the whole response as a single valid JSON value.";
    case RuleType::kKeywordExclusion:
      return "Never use the word \"" + std::get<KeywordParams>(rule.params).keyword +
             "\".";
    case RuleType::kKeywordInclusion:
      return "Use the word \"" + std::get<KeywordParams>(rule.params).keyword +
             "\".";
    case RuleType::kLetterFrequency: {
      const auto& p = std::get<LetterParams>(rule.params);
      return "The letter \"" + p.letter + "\" should occur " + relation_words(p.relation, p.count) +
             " times.";
    }
    case RuleType::kMarkdownHighlightSections: {
      const auto p = count();
      return "Mark " + relation_words(p.relation, p.count) +
             " spans with markdown emphasis, like *this span*.";
    }
    case RuleType::kNoCommas:
      return "Do not use any commas.";
    case RuleType::kNumberedListCount: {
      const auto p = count();
      return "Include a numbered list of " + relation_words(p.relation, p.count) + " items.";
    }
    case RuleType::kParagraphCount: {
      const auto p = count();
      return "Split the response into " + relation_words(p.relation, p.count) +
             " paragraphs separated by blank lines.";
    }
    case RuleType::kSentenceCount: {
      const auto p = count();
      return "Write " + relation_words(p.relation, p.count) + " sentences.";
    }
    case RuleType::kStartsWithPhrase:
      return "Start the response with the phrase \"" +
             std::get<PhraseParams>(rule.params).phrase + "\".";
    case RuleType::kTitleInDoubleAngularBrackets:
      return "Give the response a title inside double angle brackets, like <<my title>>.";
    case RuleType::kWordCount: {
      const auto p = count();
      return "Write " + relation_words(p.relation, p.count) + " words.";
    }
    case RuleType::kWrappedInDoubleQuotes:
      return "Wrap the whole response in double quotes.";
  }
  fail(ErrorKind::kUnsupported, "rule type not in catalog");
}

std::span<const std::string_view> constraint_taxonomy() { return kTaxonomy; }

bool is_taxonomy_category(std::string_view category) {
  return std::find(kTaxonomy.begin(), kTaxonomy.end(), category) != kTaxonomy.end();
}

std::string Constraint::instruction_text() const {
  if (!text.empty()) return text;
  if (rule) return describe(*rule);
  return {};
}

Constraint Constraint::hard(std::string id, HardRule rule, std::string text) {
  Constraint c;
  c.id = std::move(id);
  c.category = std::string(default_category(rule.type));
  c.text = std::move(text);
  c.rule = std::move(rule);
  return c;
}

Constraint Constraint::soft(std::string id, std::string text, std::string category) {
  Constraint c;
  c.id = std::move(id);
  c.text = std::move(text);
  c.category = std::move(category);
  return c;
}

void validate(const Constraint& c) {
  const std::string path = "constraint(" + c.id + ")";
  if (c.id.empty()) schema_error("constraint.id", "must be non-empty");
  if (!is_taxonomy_category(c.category)) {
    schema_error(path + ".category", "'" + c.category + "' is not a taxonomy category");
  }
  if (!text::is_valid_utf8(c.text)) schema_error(path + ".text", "invalid UTF-8");
  if (c.rule) {
    validate(*c.rule);
  } else if (text::trim(c.text).empty()) {
    schema_error(path + ".text", "soft constraint requires non-empty text");
  }
}

nlohmann::json to_json(const HardRule& rule) {
  nlohmann::json j;
  j["rule_type"] = std::string(to_string(rule.type));
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CountParams>) {
          j["relation"] = std::string(to_string(p.relation));
          j["count"] = p.count;
        } else if constexpr (std::is_same_v<T, LetterParams>) {
          j["letter"] = p.letter;
          j["relation"] = std::string(to_string(p.relation));
          j["count"] = p.count;
        } else if constexpr (std::is_same_v<T, KeywordParams>) {
          j["keyword"] = p.keyword;
        } else if constexpr (std::is_same_v<T, PhraseParams>) {
          j["phrase"] = p.phrase;
        }
      },
      rule.params);
  return j;
}

HardRule hard_rule_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected object");
  HardRule rule;
  const auto type_name = require_string(j, path, "rule_type");
  try {
    rule.type = parse_rule_type(type_name);
  } catch (const Error& e) {
    fail(e.kind(), path + ".rule_type: " + e.what());
  }
  const auto relation = [&] {
    const auto name = require_string(j, path, "relation");
    try {
      return parse_relation(name);
    } catch (const Error&) {
      schema_error(path + ".relation", "expected one of at_least, at_most, exactly");
    }
  };
  switch (param_shape(rule.type)) {
    case ParamShape::kNone:
      reject_unknown(j, path, {"rule_type"});
      rule.params = NoParams{};
      break;
    case ParamShape::kCount:
      reject_unknown(j, path, {"rule_type", "relation", "count"});
      rule.params = CountParams{relation(), require_count(j, path, "count")};
      break;
    case ParamShape::kLetter:
      reject_unknown(j, path, {"rule_type", "letter", "relation", "count"});
      rule.params =
          LetterParams{require_string(j, path, "letter"), relation(), require_count(j, path, "count")};
      break;
    case ParamShape::kKeyword:
      reject_unknown(j, path, {"rule_type", "keyword"});
      rule.params = KeywordParams{require_string(j, path, "keyword")};
      break;
    case ParamShape::kPhrase:
      reject_unknown(j, path, {"rule_type", "phrase"});
      rule.params = PhraseParams{require_string(j, path, "phrase")};
      break;
  }
  try {
    validate(rule);
  } catch (const Error& e) {
    schema_error(path, e.what());
  }
  return rule;
}

nlohmann::json to_json(const Constraint& c) {
  nlohmann::json j;
  j["id"] = c.id;
  j["kind"] = c.is_hard() ? "hard" : "soft";
  j["category"] = c.category;
  if (!c.text.empty()) j["text"] = c.text;
  if (c.rule) j["rule"] = to_json(*c.rule);
  return j;
}

Constraint constraint_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected object");
  reject_unknown(j, path, {"id", "kind", "category", "text", "rule"});
  Constraint c;
  c.id = require_string(j, path, "id");
  if (c.id.empty()) schema_error(path + ".id", "must be non-empty");
  const auto kind = require_string(j, path, "kind");
  if (j.contains("text")) {
    if (!j["text"].is_string()) schema_error(path + ".text", "expected string");
    c.text = j["text"].get<std::string>();
  }
  if (kind == "hard") {
    c.rule = hard_rule_from_json(require(j, path, "rule"), path + ".rule");
    c.category = j.contains("category") ? require_string(j, path, "category")
                                        : std::string(default_category(c.rule->type));
  } else if (kind == "soft") {
    if (j.contains("rule")) schema_error(path + ".rule", "soft constraints carry no rule");
    c.category = require_string(j, path, "category");
    if (text::trim(c.text).empty()) schema_error(path + ".text", "soft constraint requires non-empty text");
  } else {
    schema_error(path + ".kind", "expected 'hard' or 'soft'");
  }
  if (!is_taxonomy_category(c.category)) {
    schema_error(path + ".category", "'" + c.category + "' is not a taxonomy category");
  }
  return c;
}

}  // namespace ifrl
