#include <gtest/gtest.h>

#include <chrono>
#include <map>
#include <random>
#include <set>

#include "ifrl/dataset.hpp"
#include "ifrl/error.hpp"
#include "ifrl/hard_verifier.hpp"

using namespace ifrl;
using nlohmann::json;

namespace {

struct Fixture {
  std::string id;
  HardRule rule;
  std::string response;
  bool expected;
  std::string detail;
  std::string flips;
};

std::vector<Fixture> load_golden() {
  std::vector<Fixture> out;
  dataset::read_jsonl(std::string(IFRL_GOLDEN_DIR) + "/hard_rules.jsonl", [&](const json& j, std::size_t) {
    out.push_back({j.at("id"), hard_rule_from_json(j.at("rule")), j.at("response"), j.at("expected"),
                   j.at("detail"), j.value("flips", "")});
  });
  return out;
}

HardRule count_rule(RuleType t, Relation r, std::int64_t n) { return {t, CountParams{r, n}}; }

}  // namespace

TEST(HardVerifier, GoldenFixturesAgree) {
  const auto fixtures = load_golden();
  ASSERT_GE(fixtures.size(), 36u);
  const auto start = std::chrono::steady_clock::now();
  for (const auto& f : fixtures) {
    const auto r = verify(f.response, f.rule);
    EXPECT_EQ(r.satisfied, f.expected) << f.id << ": " << r.detail;
    EXPECT_EQ(r.detail, f.detail) << f.id;
  }
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 1.0);
}

TEST(HardVerifier, EveryCatalogRuleHasPassAndFailFixture) {
  std::map<std::string, std::set<bool>> seen;
  for (const auto& f : load_golden()) seen[std::string(to_string(f.rule.type))].insert(f.expected);
  for (const auto& e : catalog()) {
    EXPECT_EQ(seen[e.rule_type].size(), 2u) << e.rule_type;
  }
}

TEST(HardVerifier, EveryRuleHasAPassFixtureWithAFlippingMutation) {
  const auto fixtures = load_golden();
  std::map<std::string, const Fixture*> by_id;
  for (const auto& f : fixtures) by_id[f.id] = &f;
  std::set<RuleType> covered;
  for (const auto& f : fixtures) {
    if (f.flips.empty()) continue;
    EXPECT_TRUE(f.expected) << f.id;
    ASSERT_TRUE(by_id.count(f.flips)) << f.id << " -> " << f.flips;
    const Fixture& g = *by_id[f.flips];
    EXPECT_FALSE(g.expected) << f.flips;
    EXPECT_EQ(g.rule, f.rule) << f.id;
    EXPECT_NE(g.response, f.response);
    covered.insert(f.rule.type);
  }
  for (RuleType t : all_rule_types()) EXPECT_TRUE(covered.count(t)) << to_string(t);
}

TEST(HardVerifier, ExamplesFromInstructionTables) {
  EXPECT_TRUE(verify("\"HELLO\"", {RuleType::kWrappedInDoubleQuotes, NoParams{}}).satisfied);
  EXPECT_TRUE(verify("mississippi", {RuleType::kLetterFrequency, LetterParams{"i", Relation::kAtLeast, 4}}).satisfied);
  EXPECT_FALSE(verify("Hello World", {RuleType::kAllCapitalLetters, NoParams{}}).satisfied);
  EXPECT_TRUE(verify("{\"a\": 1}", {RuleType::kJsonFormat, NoParams{}}).satisfied);
  EXPECT_FALSE(verify("{a: 1}", {RuleType::kJsonFormat, NoParams{}}).satisfied);
}

TEST(HardVerifier, CatalogIsSortedAndComplete) {
  const auto& c = catalog();
  ASSERT_GE(c.size(), 15u);
  EXPECT_EQ(c.size(), 18u);
  for (std::size_t i = 1; i < c.size(); ++i) EXPECT_LT(c[i - 1].rule_type, c[i].rule_type);
  const auto has = [&](std::string_view name) {
    return std::any_of(c.begin(), c.end(), [&](const CatalogEntry& e) { return e.rule_type == name; });
  };
  EXPECT_TRUE(has("json_format"));
  EXPECT_TRUE(has("all_caps_word_frequency"));
  const auto wc = std::find_if(c.begin(), c.end(), [](const CatalogEntry& e) { return e.rule_type == "word_count"; });
  ASSERT_NE(wc, c.end());
  EXPECT_NE(wc->param_schema.find("relation"), std::string::npos);
}

TEST(HardVerifier, InvalidRuleRejected) {
  EXPECT_THROW(verify("x", count_rule(RuleType::kWordCount, Relation::kAtLeast, -1)), Error);
  EXPECT_THROW(verify("x", {RuleType::kWordCount, NoParams{}}), Error);
  EXPECT_THROW(verify("x", {RuleType::kLetterFrequency, LetterParams{"ab", Relation::kAtLeast, 1}}), Error);
  try {
    hard_rule_from_json(json{{"rule_type", "rhyme_scheme"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnsupported);
  }
}

TEST(HardVerifier, VerifyAllMatchesRepeatedSingleCalls) {
  EXPECT_TRUE(verify_all("anything", {}).empty());
  std::mt19937_64 rng(5);
  const auto fixtures = load_golden();
  for (int trial = 0; trial < 100; ++trial) {
    const std::string& text = fixtures[rng() % fixtures.size()].response;
    std::vector<HardRule> rules;
    const std::size_t n = 1 + rng() % 6;
    for (std::size_t i = 0; i < n; ++i) rules.push_back(fixtures[rng() % fixtures.size()].rule);
    const auto batch = verify_all(text, rules);
    ASSERT_EQ(batch.size(), rules.size());
    for (std::size_t i = 0; i < rules.size(); ++i) EXPECT_EQ(batch[i], verify(text, rules[i]));
  }
}

TEST(HardVerifier, VerifyAllReportsFailingIndex) {
  std::vector<HardRule> rules = {{RuleType::kNoCommas, NoParams{}},
                                 count_rule(RuleType::kWordCount, Relation::kAtLeast, -3)};
  try {
    verify_all("text", rules);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()).rfind("rules[1]: ", 0), 0u) << e.what();
  }
}

TEST(HardVerifier, ConstraintIdIsStamped) {
  const auto c = Constraint::hard("c7", {RuleType::kNoCommas, NoParams{}});
  const auto r = verify("a, b", c);
  EXPECT_EQ(r.constraint_id, "c7");
  EXPECT_FALSE(r.satisfied);
  EXPECT_EQ(r.reward(), 0.0);
  EXPECT_THROW(verify("a", Constraint::soft("s", "Be kind.", "Tone and emotion")), Error);
}

TEST(HardVerifier, ArbitraryBytesNeverCrash) {
  std::vector<HardRule> rules;
  for (RuleType t : all_rule_types()) {
    switch (param_shape(t)) {
      case ParamShape::kNone: rules.push_back({t, NoParams{}}); break;
      case ParamShape::kCount: rules.push_back(count_rule(t, Relation::kAtLeast, 1)); break;
      case ParamShape::kLetter: rules.push_back({t, LetterParams{"\xC3\xA9", Relation::kAtLeast, 1}}); break;
      case ParamShape::kKeyword: rules.push_back({t, KeywordParams{"caf\xC3\xA9"}}); break;
      case ParamShape::kPhrase: rules.push_back({t, PhraseParams{"\xF0\x9F\x98\x80"}}); break;
    }
  }
  std::mt19937_64 rng(123);
  const std::vector<std::string> pieces = {"\xF0\x9F\x98\x80", "\xC3\xA9", "\xE2\x80\x8B", "*", "<<", ">>", "\"",
                                           "\n\n", "- ", "1. ", ".", "!", "{", "}", ",", "A", "z", " ", "\xFF",
                                           "\xC3", std::string(1, '\0')};
  std::vector<std::string> texts = {"", " ", "\n", std::string(1, '\0')};
  for (int i = 0; i < 500; ++i) {
    std::string s;
    const std::size_t n = rng() % 40;
    for (std::size_t k = 0; k < n; ++k) s += pieces[rng() % pieces.size()];
    texts.push_back(s);
  }
  for (const auto& s : texts) {
    for (const auto& r : rules) {
      VerificationResult a, b;
      ASSERT_NO_THROW(a = verify(s, r));
      ASSERT_NO_THROW(b = verify(s, r));
      EXPECT_EQ(a, b);
      EXPECT_FALSE(a.detail.empty());
    }
  }
}

TEST(HardVerifier, RelationsAtBoundaries) {
  const std::string text = "a b c";
  EXPECT_TRUE(verify(text, count_rule(RuleType::kWordCount, Relation::kAtLeast, 3)).satisfied);
  EXPECT_FALSE(verify(text, count_rule(RuleType::kWordCount, Relation::kAtLeast, 4)).satisfied);
  EXPECT_TRUE(verify(text, count_rule(RuleType::kWordCount, Relation::kAtMost, 3)).satisfied);
  EXPECT_FALSE(verify(text, count_rule(RuleType::kWordCount, Relation::kAtMost, 2)).satisfied);
  EXPECT_TRUE(verify(text, count_rule(RuleType::kWordCount, Relation::kExactly, 3)).satisfied);
  EXPECT_TRUE(verify("", count_rule(RuleType::kWordCount, Relation::kExactly, 0)).satisfied);
}
