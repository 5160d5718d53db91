#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ifrl/metrics.hpp"
#include "ifrl/types.hpp"

// Deterministic synthetic corpora and a mock policy whose responses satisfy
// exactly the constraints they are asked to. Used by tests, the bundled
// sample corpus and the eval-rm benchmark.
namespace ifrl::synthetic {

struct CorpusOptions {
  std::size_t num_instructions = 1000;
  std::size_t min_constraints = 5;
  std::size_t max_constraints = 5;
  double soft_fraction = 0.3;  // chance that each constraint is soft
  std::size_t num_reasoning = 0;
  std::uint64_t seed = 0;
  std::string id_prefix = "syn";
};

std::vector<Instruction> make_corpus(const CorpusOptions& options);

/// 2806 instructions whose constraint counts are n=1: 61, n=2: 45, n=4: 81,
/// n=5: 2619, so the level sizes are 2806, 2745, 2700, 2700, 2619.
std::vector<Instruction> make_table_corpus(std::uint64_t seed);

/// Random constraint list of length n drawn from the mock-compatible hard
/// rules and the soft templates.
std::vector<Constraint> draw_constraints(std::uint64_t seed, std::size_t n, double soft_fraction);

/// Response to `instruction` that satisfies constraint i iff satisfy[i].
/// `variant` changes the filler text without changing which constraints hold.
std::string mock_response(const Instruction& instruction, const std::vector<bool>& satisfy,
                          std::uint64_t variant);

/// Responses for levels 0..n; level k satisfies exactly c_1..c_k. Reasoning
/// instructions get a single level-0 response ending in \boxed{gold}.
std::vector<Response> mock_level_responses(const Instruction& instruction);
std::vector<Response> mock_corpus_responses(std::span<const Instruction> instructions);

/// One policy sample for the score subcommand: instruction-following rollouts
/// carry constraints, reasoning rollouts carry the gold answer.
struct Rollout {
  std::string group_id;
  std::string response;
  std::vector<Constraint> constraints;
  std::string gold_answer;
};
nlohmann::json to_json(const Rollout& rollout);

/// group_size rollouts per instruction. Rollout j satisfies the first
/// round(j * n / (group_size - 1)) constraints; reasoning rollouts alternate
/// between the gold answer and a wrong one.
std::vector<Rollout> mock_rollouts(std::span<const Instruction> instructions, std::size_t group_size = 5);

/// Soft "mention cats" constraint: positives contain the token "cats",
/// negatives never do. Half of the pairs are positive.
std::vector<LabeledPair> separable_pairs(std::size_t count = 200, std::uint64_t seed = 0);

/// Groups of five responses over five constraints; the response ranked r
/// satisfies a random subset of 6 - r constraints.
std::vector<PreferenceGroup> preference_groups(std::size_t count, std::uint64_t seed,
                                               double soft_fraction = 0.6);

/// Every fixed word list the mock policy writes from, for vocabulary checks.
std::vector<std::string> vocabulary_samples();

}  // namespace ifrl::synthetic
