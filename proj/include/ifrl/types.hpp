#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ifrl/constraint.hpp"

namespace ifrl {

inline constexpr std::size_t kMaxConstraintsPerInstruction = 8;

enum class TaskKind { kInstructionFollowing, kReasoning };

struct Instruction {
  std::string id;
  std::string seed_text;
  std::vector<Constraint> constraints;  // order is the curriculum order
  TaskKind task_kind = TaskKind::kInstructionFollowing;
  std::string gold_answer;  // reasoning tasks only

  bool operator==(const Instruction&) const = default;
};

void validate(const Instruction& instruction);

/// Seed text followed by the first k constraint sentences, one per line.
std::string render_prompt(const std::string& seed_text, const std::vector<Constraint>& constraints,
                          std::size_t k);

struct CurriculumLevel {
  std::string instruction_id;
  std::size_t k = 1;
  std::string rendered_text;
  std::vector<Constraint> constraints;  // prefix c_1..c_k of the parent

  bool operator==(const CurriculumLevel&) const = default;
};

enum class ResponseSource { kExternal, kMock };

struct Response {
  std::string instruction_id;
  std::size_t level_k = 0;  // 0 is the seed-only response
  std::string text;
  ResponseSource source = ResponseSource::kExternal;

  bool operator==(const Response&) const = default;
};

struct LabeledPair {
  std::string response_text;
  Constraint constraint;
  int label = 0;  // 1 satisfied, 0 not

  bool operator==(const LabeledPair&) const = default;
};

enum class RewardSource { kRule, kModel };

struct ConstraintReward {
  std::string constraint_id;
  double reward = 0.0;
  RewardSource source = RewardSource::kRule;

  bool operator==(const ConstraintReward&) const = default;
};

struct RewardBreakdown {
  std::vector<ConstraintReward> per_constraint;
  double aggregate = 0.0;

  bool operator==(const RewardBreakdown&) const = default;
};

struct RolloutGroup {
  std::string group_id;
  std::vector<std::string> responses;
  std::vector<double> rewards;
  std::optional<std::vector<double>> advantages;
};

void validate(const RolloutGroup& group);

std::string_view to_string(RewardSource source);

// JSON records (lower_snake_case fields; see docs/formats.md).
nlohmann::json to_json(const Instruction& v);
Instruction instruction_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CurriculumLevel& v);
CurriculumLevel level_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Response& v);
Response response_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LabeledPair& v);
LabeledPair pair_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RewardBreakdown& v);

}  // namespace ifrl
