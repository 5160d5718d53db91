#include <gtest/gtest.h>

#include <fstream>

#include "ifrl/dataset.hpp"
#include "ifrl/error.hpp"
#include "ifrl/synthetic.hpp"
#include "oracles.hpp"

using namespace ifrl;
using nlohmann::json;

namespace {

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary) << s;
}

ErrorKind kind_of(const std::function<void()>& f, std::string* message = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.kind();
  }
  ADD_FAILURE() << "expected an ifrl::Error";
  return ErrorKind::kInternal;
}

const char* kInstructionLine =
    R"({"id":"i1","seed_text":"Describe a park.","constraints":[)"
    R"({"id":"c1","kind":"hard","rule":{"rule_type":"word_count","relation":"at_most","count":25}},)"
    R"({"id":"c2","kind":"soft","category":"Tone and emotion","text":"Sound cheerful."}]})";

}  // namespace

TEST(CoreModel, LoadSingleInstruction) {
  const auto dir = oracle::temp_dir("core1");
  write_text(dir / "in.jsonl", std::string(kInstructionLine) + "\n");
  const auto ins = dataset::load_instructions(dir / "in.jsonl");
  ASSERT_EQ(ins.size(), 1u);
  EXPECT_EQ(ins[0].constraints.size(), 2u);
  EXPECT_TRUE(ins[0].constraints[0].is_hard());
  EXPECT_EQ(ins[0].constraints[0].category, "Word Count");
  EXPECT_TRUE(ins[0].constraints[1].is_soft());
}

TEST(CoreModel, EmptyFileGivesEmptyList) {
  const auto dir = oracle::temp_dir("core2");
  write_text(dir / "in.jsonl", "");
  EXPECT_TRUE(dataset::load_instructions(dir / "in.jsonl").empty());
}

TEST(CoreModel, DuplicateConstraintIdNamesTheId) {
  const auto dir = oracle::temp_dir("core3");
  write_text(dir / "in.jsonl",
             R"({"id":"i1","seed_text":"x","constraints":[)"
             R"({"id":"dup","kind":"hard","rule":{"rule_type":"no_commas"}},)"
             R"({"id":"dup","kind":"hard","rule":{"rule_type":"json_format"}}]})"
             "\n");
  std::string msg;
  EXPECT_EQ(kind_of([&] { dataset::load_instructions(dir / "in.jsonl"); }, &msg), ErrorKind::kValidation);
  EXPECT_NE(msg.find("'dup'"), std::string::npos) << msg;
  EXPECT_NE(msg.find(":1:"), std::string::npos) << msg;
}

TEST(CoreModel, MalformedLineReportsLineNumber) {
  const auto dir = oracle::temp_dir("core4");
  write_text(dir / "in.jsonl", std::string(kInstructionLine) + "\n\n{not json\n");
  std::string msg;
  EXPECT_EQ(kind_of([&] { dataset::load_instructions(dir / "in.jsonl"); }, &msg), ErrorKind::kValidation);
  EXPECT_NE(msg.find("in.jsonl:3:"), std::string::npos) << msg;
}

TEST(CoreModel, SchemaViolationsReportField) {
  const auto dir = oracle::temp_dir("core5");
  const std::vector<std::pair<std::string, std::string>> cases = {
      {R"({"id":"i","seed_text":"x","constraints":[{"id":"c","kind":"hard","rule":{"rule_type":"word_count","relation":"at_least","count":-1}}]})",
       "count"},
      {R"({"id":"i","seed_text":"x","constraints":[{"id":"c","kind":"soft","category":"Tone and emotion","text":"  "}]})",
       "text"},
      {R"({"id":"i","seed_text":"x","constraints":[{"id":"c","kind":"soft","category":"Made up","text":"t"}]})",
       "category"},
      {R"({"id":"i","seed_text":"x","constraints":[{"id":"c","kind":"hard","rule":{"rule_type":"keyword_inclusion","keyword":""}}]})",
       "keyword"},
      {R"({"id":"i","seed_text":"x","task_kind":"reasoning","gold_answer":""})", "gold_answer"},
      {R"({"id":"i","seed_text":"x","task_kind":"reasoning","gold_answer":"4","constraints":[{"id":"c","kind":"hard","rule":{"rule_type":"no_commas"}}]})",
       "constraints"},
      {R"({"id":"i","seed_text":"x","extra":1})", "extra"},
  };
  for (const auto& [line, field] : cases) {
    write_text(dir / "in.jsonl", line + "\n");
    std::string msg;
    EXPECT_EQ(kind_of([&] { dataset::load_instructions(dir / "in.jsonl"); }, &msg), ErrorKind::kValidation)
        << line;
    EXPECT_NE(msg.find(field), std::string::npos) << msg;
  }
}

TEST(CoreModel, UnknownRuleTypeIsUnsupported) {
  const auto dir = oracle::temp_dir("core6");
  write_text(dir / "in.jsonl",
             R"({"id":"i","seed_text":"x","constraints":[{"id":"c","kind":"hard","rule":{"rule_type":"haiku_form"}}]})"
             "\n");
  std::string msg;
  EXPECT_EQ(kind_of([&] { dataset::load_instructions(dir / "in.jsonl"); }, &msg), ErrorKind::kUnsupported);
  EXPECT_NE(msg.find("rule_type"), std::string::npos) << msg;
}

TEST(CoreModel, DuplicateInstructionIdRejected) {
  const auto dir = oracle::temp_dir("core7");
  write_text(dir / "in.jsonl", std::string(kInstructionLine) + "\n" + kInstructionLine + "\n");
  std::string msg;
  EXPECT_EQ(kind_of([&] { dataset::load_instructions(dir / "in.jsonl"); }, &msg), ErrorKind::kValidation);
  EXPECT_NE(msg.find("i1"), std::string::npos);
}

TEST(CoreModel, ConstraintCapEnforced) {
  Instruction ins;
  ins.id = "i";
  ins.seed_text = "x";
  for (int i = 0; i < 9; ++i) {
    ins.constraints.push_back(Constraint::soft("c" + std::to_string(i), "Be kind.", "Tone and emotion"));
  }
  EXPECT_THROW(validate(ins), Error);
  ins.constraints.pop_back();
  EXPECT_NO_THROW(validate(ins));
}

TEST(CoreModel, SavePairsWritesOneLinePerPair) {
  const auto dir = oracle::temp_dir("core8");
  const auto pairs = synthetic::separable_pairs(10, 3);
  dataset::save_pairs(pairs, dir / "pairs.jsonl");
  std::ifstream in(dir / "pairs.jsonl");
  std::size_t lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  EXPECT_EQ(lines, 10u);
  EXPECT_EQ(dataset::load_pairs(dir / "pairs.jsonl"), pairs);
}

TEST(CoreModel, UnwritablePathIsIoErrorWithPath) {
  std::string msg;
  const std::filesystem::path bad = "/nonexistent_dir_ifrl/pairs.jsonl";
  EXPECT_EQ(kind_of([&] { dataset::save_pairs(synthetic::separable_pairs(2), bad); }, &msg), ErrorKind::kIo);
  EXPECT_NE(msg.find(bad.string()), std::string::npos);
}

TEST(CoreModel, RoundTripSyntheticDatasets) {
  const auto dir = oracle::temp_dir("core9");
  synthetic::CorpusOptions o;
  o.num_instructions = 60;
  o.min_constraints = 1;
  o.max_constraints = 8;
  o.soft_fraction = 0.4;
  o.num_reasoning = 5;
  o.seed = 11;
  const auto ins = synthetic::make_corpus(o);
  dataset::save_instructions(ins, dir / "ins.jsonl");
  EXPECT_EQ(dataset::load_instructions(dir / "ins.jsonl"), ins);

  const auto responses = synthetic::mock_corpus_responses(ins);
  dataset::save_responses(responses, dir / "resp.jsonl");
  EXPECT_EQ(dataset::load_responses(dir / "resp.jsonl"), responses);

  std::vector<CurriculumLevel> levels;
  for (const auto& i : ins) {
    if (i.task_kind == TaskKind::kReasoning) continue;
    for (std::size_t k = 1; k <= i.constraints.size(); ++k) {
      levels.push_back({i.id, k, render_prompt(i.seed_text, i.constraints, k),
                        {i.constraints.begin(), i.constraints.begin() + static_cast<std::ptrdiff_t>(k)}});
    }
  }
  dataset::save_levels(levels, dir / "levels.jsonl");
  EXPECT_EQ(dataset::load_levels(dir / "levels.jsonl"), levels);
}

TEST(CoreModel, HardConstraintWithoutTextRendersRule) {
  const auto c = Constraint::hard("c1", {RuleType::kNoCommas, NoParams{}});
  EXPECT_FALSE(c.instruction_text().empty());
  EXPECT_EQ(render_prompt("Seed.", {c}, 1), "Seed.\n" + c.instruction_text());
  EXPECT_THROW(render_prompt("Seed.", {c}, 2), Error);
}

TEST(CoreModel, RewardBreakdownJsonShape) {
  RewardBreakdown b{{{"c1", 1.0, RewardSource::kRule}, {"c2", 0.25, RewardSource::kModel}}, 0.625};
  const json j = to_json(b);
  EXPECT_EQ(j["reward"].get<double>(), 0.625);
  EXPECT_EQ(j["per_constraint"][1]["source"], "model");
  EXPECT_EQ(j["per_constraint"][0]["id"], "c1");
}

TEST(CoreModel, RolloutGroupLengthsMustAgree) {
  RolloutGroup g{"g", {"a", "b"}, {1.0, 0.0}, std::nullopt};
  EXPECT_NO_THROW(validate(g));
  g.advantages = std::vector<double>{1.0};
  EXPECT_THROW(validate(g), Error);
  g.advantages.reset();
  g.responses = {"a"};
  g.rewards = {1.0};
  EXPECT_THROW(validate(g), Error);
}
