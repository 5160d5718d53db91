#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace ifrl {

enum class RuleType {
  kAllCapitalLetters,
  kAllCapsWordFrequency,
  kAllLowercase,
  kBulletPointCount,
  kEndsWithPhrase,
  kJsonFormat,
  kKeywordExclusion,
  kKeywordInclusion,
  kLetterFrequency,
  kMarkdownHighlightSections,
  kNoCommas,
  kNumberedListCount,
  kParagraphCount,
  kSentenceCount,
  kStartsWithPhrase,
  kTitleInDoubleAngularBrackets,
  kWordCount,
  kWrappedInDoubleQuotes,
};

/// Every rule type, sorted by wire name.
std::span<const RuleType> all_rule_types();
std::string_view to_string(RuleType type);
/// Throws Error(kUnsupported) for names outside the catalog.
RuleType parse_rule_type(std::string_view name);

enum class Relation { kAtLeast, kAtMost, kExactly };

std::string_view to_string(Relation relation);
Relation parse_relation(std::string_view name);
bool holds(Relation relation, std::int64_t observed, std::int64_t bound);

struct NoParams {
  bool operator==(const NoParams&) const = default;
};
struct CountParams {
  Relation relation = Relation::kAtLeast;
  std::int64_t count = 0;
  bool operator==(const CountParams&) const = default;
};
struct LetterParams {
  std::string letter;  // exactly one code point
  Relation relation = Relation::kAtLeast;
  std::int64_t count = 0;
  bool operator==(const LetterParams&) const = default;
};
struct KeywordParams {
  std::string keyword;
  bool operator==(const KeywordParams&) const = default;
};
struct PhraseParams {
  std::string phrase;
  bool operator==(const PhraseParams&) const = default;
};

using RuleParams = std::variant<NoParams, CountParams, LetterParams, KeywordParams, PhraseParams>;

struct HardRule {
  RuleType type = RuleType::kJsonFormat;
  RuleParams params;

  bool operator==(const HardRule&) const = default;
};

/// Throws Error(kValidation) naming the offending field.
void validate(const HardRule& rule);

enum class ParamShape { kNone, kCount, kLetter, kKeyword, kPhrase };

/// Parameter shape every rule of `type` must carry.
ParamShape param_shape(RuleType type);
/// Taxonomy category a hard rule belongs to when the dataset names none.
std::string_view default_category(RuleType type);

/// Human-readable instruction sentence for a rule, used when a hard
/// constraint carries no authored text.
std::string describe(const HardRule& rule);

/// Constraint taxonomy categories (25 entries).
std::span<const std::string_view> constraint_taxonomy();
bool is_taxonomy_category(std::string_view category);

struct Constraint {
  std::string id;
  std::string category;
  /// Authored instruction text. Required for soft constraints; optional for
  /// hard ones (falls back to describe(rule)).
  std::string text;
  std::optional<HardRule> rule;  // engaged iff the constraint is hard

  bool is_hard() const { return rule.has_value(); }
  bool is_soft() const { return !rule.has_value(); }
  /// The text shown to a policy or a scorer.
  std::string instruction_text() const;

  static Constraint hard(std::string id, HardRule rule, std::string text = {});
  static Constraint soft(std::string id, std::string text, std::string category);

  bool operator==(const Constraint&) const = default;
};

void validate(const Constraint& constraint);

// JSON. Parsers validate and report dotted field paths rooted at `path`.
nlohmann::json to_json(const HardRule& rule);
HardRule hard_rule_from_json(const nlohmann::json& j, const std::string& path = "rule");
nlohmann::json to_json(const Constraint& constraint);
Constraint constraint_from_json(const nlohmann::json& j, const std::string& path = "constraint");

}  // namespace ifrl
