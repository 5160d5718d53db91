#include "ifrl/types.hpp"

#include <algorithm>
#include <set>

#include "ifrl/error.hpp"
#include "ifrl/text.hpp"

namespace ifrl {

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  fail(ErrorKind::kValidation, path + ": " + what);
}

const nlohmann::json& require(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(key, "missing required field");
  return *it;
}

std::string require_string(const nlohmann::json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_string()) schema_error(key, "expected string");
  return v.get<std::string>();
}

std::size_t require_size(const nlohmann::json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    schema_error(key, "expected non-negative integer");
  }
  return v.get<std::size_t>();
}

void reject_unknown(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      schema_error(key, "unknown field");
    }
  }
}

std::vector<Constraint> constraints_from_json(const nlohmann::json& arr) {
  if (!arr.is_array()) schema_error("constraints", "expected array");
  std::vector<Constraint> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(constraint_from_json(arr[i], "constraints[" + std::to_string(i) + "]"));
  }
  return out;
}

nlohmann::json constraints_to_json(const std::vector<Constraint>& cs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cs) arr.push_back(to_json(c));
  return arr;
}

void check_unique_ids(const std::vector<Constraint>& cs) {
  std::set<std::string> seen;
  for (const auto& c : cs) {
    if (!seen.insert(c.id).second) {
      schema_error("constraints", "duplicate constraint id '" + c.id + "'");
    }
  }
}

}  // namespace

void validate(const Instruction& ins) {
  if (ins.id.empty()) schema_error("id", "must be non-empty");
  if (!text::is_valid_utf8(ins.seed_text)) schema_error("seed_text", "invalid UTF-8");
  if (ins.constraints.size() > kMaxConstraintsPerInstruction) {
    schema_error("constraints", "at most " + std::to_string(kMaxConstraintsPerInstruction) +
                                    " constraints per instruction");
  }
  check_unique_ids(ins.constraints);
  for (const auto& c : ins.constraints) validate(c);
  if (ins.task_kind == TaskKind::kReasoning) {
    if (!ins.constraints.empty()) schema_error("constraints", "reasoning tasks carry no constraints");
    if (text::trim(ins.gold_answer).empty()) schema_error("gold_answer", "required for reasoning tasks");
  } else if (!ins.gold_answer.empty()) {
    schema_error("gold_answer", "only reasoning tasks carry a gold answer");
  }
}

std::string render_prompt(const std::string& seed_text, const std::vector<Constraint>& constraints,
                          std::size_t k) {
  if (k > constraints.size()) {
    schema_error("k", std::to_string(k) + " exceeds the " + std::to_string(constraints.size()) + " constraints");
  }
  std::string out = seed_text;
  for (std::size_t i = 0; i < k; ++i) {
    out += '\n';
    out += constraints[i].instruction_text();
  }
  return out;
}

void validate(const RolloutGroup& group) {
  if (group.responses.size() < 2) schema_error("responses", "a rollout group needs G >= 2");
  if (group.rewards.size() != group.responses.size()) {
    schema_error("rewards", "length must equal responses");
  }
  if (group.advantages && group.advantages->size() != group.responses.size()) {
    schema_error("advantages", "length must equal responses");
  }
}

std::string_view to_string(RewardSource source) {
  return source == RewardSource::kRule ? "rule" : "model";
}

nlohmann::json to_json(const Instruction& v) {
  nlohmann::json j;
  j["id"] = v.id;
  j["seed_text"] = v.seed_text;
  j["task_kind"] = v.task_kind == TaskKind::kReasoning ? "reasoning" : "instruction_following";
  j["constraints"] = constraints_to_json(v.constraints);
  if (v.task_kind == TaskKind::kReasoning) j["gold_answer"] = v.gold_answer;
  return j;
}

Instruction instruction_from_json(const nlohmann::json& j) {
  if (!j.is_object()) schema_error("instruction", "expected object");
  reject_unknown(j, {"id", "seed_text", "task_kind", "constraints", "gold_answer"});
  Instruction v;
  v.id = require_string(j, "id");
  v.seed_text = require_string(j, "seed_text");
  const auto kind = j.contains("task_kind") ? require_string(j, "task_kind")
                                            : std::string("instruction_following");
  if (kind == "reasoning") {
    v.task_kind = TaskKind::kReasoning;
    v.gold_answer = require_string(j, "gold_answer");
  } else if (kind == "instruction_following") {
    v.task_kind = TaskKind::kInstructionFollowing;
    if (j.contains("gold_answer")) schema_error("gold_answer", "only reasoning tasks carry a gold answer");
  } else {
    schema_error("task_kind", "expected 'instruction_following' or 'reasoning'");
  }
  if (j.contains("constraints")) v.constraints = constraints_from_json(j["constraints"]);
  validate(v);
  return v;
}

nlohmann::json to_json(const CurriculumLevel& v) {
  return {{"instruction_id", v.instruction_id},
          {"k", v.k},
          {"rendered_text", v.rendered_text},
          {"constraints", constraints_to_json(v.constraints)}};
}

CurriculumLevel level_from_json(const nlohmann::json& j) {
  if (!j.is_object()) schema_error("level", "expected object");
  reject_unknown(j, {"instruction_id", "k", "rendered_text", "constraints"});
  CurriculumLevel v;
  v.instruction_id = require_string(j, "instruction_id");
  v.k = require_size(j, "k");
  v.rendered_text = require_string(j, "rendered_text");
  v.constraints = constraints_from_json(require(j, "constraints"));
  if (v.k < 1) schema_error("k", "must be >= 1");
  if (v.constraints.size() != v.k) schema_error("constraints", "length must equal k");
  check_unique_ids(v.constraints);
  return v;
}

nlohmann::json to_json(const Response& v) {
  return {{"instruction_id", v.instruction_id},
          {"level_k", v.level_k},
          {"text", v.text},
          {"source", v.source == ResponseSource::kMock ? "mock" : "external"}};
}

Response response_from_json(const nlohmann::json& j) {
  if (!j.is_object()) schema_error("response", "expected object");
  reject_unknown(j, {"instruction_id", "level_k", "text", "source"});
  Response v;
  v.instruction_id = require_string(j, "instruction_id");
  v.level_k = require_size(j, "level_k");
  v.text = require_string(j, "text");
  if (v.level_k > kMaxConstraintsPerInstruction) schema_error("level_k", "exceeds constraint cap");
  if (j.contains("source")) {
    const auto s = require_string(j, "source");
    if (s == "mock") {
      v.source = ResponseSource::kMock;
    } else if (s != "external") {
      schema_error("source", "expected 'external' or 'mock'");
    }
  }
  return v;
}

nlohmann::json to_json(const LabeledPair& v) {
  return {{"response_text", v.response_text}, {"constraint", to_json(v.constraint)}, {"label", v.label}};
}

LabeledPair pair_from_json(const nlohmann::json& j) {
  if (!j.is_object()) schema_error("pair", "expected object");
  reject_unknown(j, {"response_text", "constraint", "label"});
  LabeledPair v;
  v.response_text = require_string(j, "response_text");
  v.constraint = constraint_from_json(require(j, "constraint"), "constraint");
  const auto& label = require(j, "label");
  if (!label.is_number_integer() || (label.get<int>() != 0 && label.get<int>() != 1)) {
    schema_error("label", "expected 0 or 1");
  }
  v.label = label.get<int>();
  return v;
}

nlohmann::json to_json(const RewardBreakdown& v) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& r : v.per_constraint) {
    per.push_back({{"id", r.constraint_id}, {"reward", r.reward}, {"source", to_string(r.source)}});
  }
  return {{"reward", v.aggregate}, {"per_constraint", per}};
}

}  // namespace ifrl
