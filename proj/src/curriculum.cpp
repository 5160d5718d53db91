#include "ifrl/curriculum.hpp"

#include <set>
#include <unordered_map>

#include "ifrl/error.hpp"
#include "ifrl/hard_verifier.hpp"

namespace ifrl {

std::vector<CurriculumLevel> decompose(const Instruction& instruction) {
  if (instruction.task_kind == TaskKind::kReasoning) {
    fail(ErrorKind::kValidation,
         "instruction " + instruction.id + ": reasoning tasks have no curriculum");
  }
  if (instruction.constraints.empty()) {
    fail(ErrorKind::kValidation,
         "instruction " + instruction.id + ": no constraints to decompose");
  }
  std::vector<CurriculumLevel> levels;
  levels.reserve(instruction.constraints.size());
  for (std::size_t k = 1; k <= instruction.constraints.size(); ++k) {
    CurriculumLevel level;
    level.instruction_id = instruction.id;
    level.k = k;
    level.constraints.assign(instruction.constraints.begin(), instruction.constraints.begin() + k);
    level.rendered_text = render_prompt(instruction.seed_text, instruction.constraints, k);
    levels.push_back(std::move(level));
  }
  return levels;
}

namespace {

// Returns levels indexed by k-1, after checking they form a complete prefix chain.
std::vector<const CurriculumLevel*> ordered_chain(std::span<const CurriculumLevel> levels) {
  if (levels.empty()) fail(ErrorKind::kValidation, "build_pairs: no levels");
  const std::string& id = levels.front().instruction_id;
  std::vector<const CurriculumLevel*> chain(levels.size(), nullptr);
  for (const auto& level : levels) {
    if (level.instruction_id != id) {
      fail(ErrorKind::kValidation, "build_pairs: mismatched instruction ids '" + id + "' and '" +
                                       level.instruction_id + "'");
    }
    if (level.k < 1 || level.k > levels.size() || chain[level.k - 1] != nullptr) {
      fail(ErrorKind::kValidation, "instruction " + id + ": levels must be exactly k = 1.." +
                                       std::to_string(levels.size()));
    }
    chain[level.k - 1] = &level;
  }
  for (std::size_t i = 1; i < chain.size(); ++i) {
    const auto& prev = chain[i - 1]->constraints;
    const auto& cur = chain[i]->constraints;
    if (!std::equal(prev.begin(), prev.end(), cur.begin())) {
      fail(ErrorKind::kValidation, "instruction " + id + ": level " + std::to_string(i + 1) +
                                       " does not extend level " + std::to_string(i));
    }
  }
  return chain;
}

bool contradicted_by_rule(const LabeledPair& pair) {
  if (!pair.constraint.is_hard()) return false;
  const bool satisfied = verify(pair.response_text, *pair.constraint.rule).satisfied;
  return satisfied != (pair.label == 1);
}

}  // namespace

std::vector<LabeledPair> build_pairs(std::span<const CurriculumLevel> levels,
                                     const std::map<std::size_t, Response>& responses,
                                     const PairOptions& options) {
  const auto chain = ordered_chain(levels);
  const std::string& id = chain.front()->instruction_id;
  const std::size_t n = chain.size();
  for (std::size_t k = 0; k <= n; ++k) {
    auto it = responses.find(k);
    if (it == responses.end()) {
      fail(ErrorKind::kValidation,
           "instruction " + id + ": missing response for level_k=" + std::to_string(k));
    }
    if (it->second.instruction_id != id) {
      fail(ErrorKind::kValidation, "instruction " + id + ": response for level_k=" +
                                       std::to_string(k) + " belongs to '" +
                                       it->second.instruction_id + "'");
    }
  }
  std::vector<LabeledPair> pairs;
  pairs.reserve(2 * n);
  for (std::size_t k = 1; k <= n; ++k) {
    const Constraint& ck = chain[k - 1]->constraints[k - 1];
    LabeledPair positive{responses.at(k).text, ck, 1};
    LabeledPair negative{responses.at(k - 1).text, ck, 0};
    for (auto* pair : {&positive, &negative}) {
      if (options.denoise_hard && contradicted_by_rule(*pair)) continue;
      pairs.push_back(std::move(*pair));
    }
  }
  return pairs;
}

std::vector<LabeledPair> build_corpus_pairs(std::span<const CurriculumLevel> levels,
                                            std::span<const Response> responses,
                                            const PairOptions& options) {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<CurriculumLevel>> by_instruction;
  for (const auto& level : levels) {
    auto [it, inserted] = by_instruction.try_emplace(level.instruction_id);
    if (inserted) order.push_back(level.instruction_id);
    it->second.push_back(level);
  }
  std::unordered_map<std::string, std::map<std::size_t, Response>> responses_by;
  for (const auto& r : responses) {
    auto& slot = responses_by[r.instruction_id];
    if (!slot.emplace(r.level_k, r).second) {
      fail(ErrorKind::kValidation, "instruction " + r.instruction_id +
                                       ": duplicate response for level_k=" +
                                       std::to_string(r.level_k));
    }
  }
  std::vector<LabeledPair> out;
  for (const auto& id : order) {
    auto pairs = build_pairs(by_instruction[id], responses_by[id], options);
    out.insert(out.end(), std::make_move_iterator(pairs.begin()),
               std::make_move_iterator(pairs.end()));
  }
  return out;
}

CurriculumStats dataset_stats(std::span<const CurriculumLevel> levels) {
  std::map<std::size_t, LevelStats> rows;
  for (const auto& level : levels) {
    auto& row = rows[level.k];
    row.k = level.k;
    row.num_instructions += 1;
    row.num_constraints += level.constraints.size();
    for (const auto& c : level.constraints) {
      (c.is_hard() ? row.num_hard : row.num_soft) += 1;
    }
  }
  CurriculumStats stats;
  for (auto& [k, row] : rows) stats.per_level.push_back(row);
  return stats;
}

nlohmann::json to_json(const CurriculumStats& stats) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : stats.per_level) {
    rows.push_back({{"k", r.k},
                    {"num_instructions", r.num_instructions},
                    {"num_constraints", r.num_constraints},
                    {"num_soft", r.num_soft},
                    {"num_hard", r.num_hard}});
  }
  return {{"per_level", rows}};
}

}  // namespace ifrl
