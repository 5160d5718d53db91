#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ifrl/reward.hpp"
#include "ifrl/types.hpp"

namespace ifrl {

// Rankings are vectors of rank values where a smaller value is a better
// position; equal values are ties.

/// Kendall tau-b, O(n log n). Returns 0 when either ranking is constant.
/// Throws Error(kValidation) on length mismatch, length < 2 or non-finite ranks.
double kendall_tau(std::span<const double> rank_a, std::span<const double> rank_b);

/// Fraction of unordered pairs ordered the same way in both rankings; pairs
/// tied in rank_b count 0.5. rank_a must be tie-free.
double position_consistency(std::span<const double> rank_a, std::span<const double> rank_b);

/// Competition ranks (1 = largest score); equal scores share the best rank.
std::vector<double> ranks_descending(std::span<const double> scores);

inline constexpr std::size_t kPreferenceGroupSize = 5;

struct RankedResponse {
  std::string text;
  int human_rank = 1;  // 1 is best
};

struct PreferenceGroup {
  std::string id;
  std::vector<Constraint> constraints;
  std::vector<RankedResponse> responses;
};

/// Exactly kPreferenceGroupSize responses whose human ranks are a permutation
/// of 1..N, and a non-empty constraint set with unique ids.
void validate(const PreferenceGroup& group);
nlohmann::json to_json(const PreferenceGroup& group);
PreferenceGroup preference_group_from_json(const nlohmann::json& j);

struct GroupAgreement {
  double kendall_tau = 0.0;
  double position_consistency = 0.0;
};

struct AgreementReport {
  double kendall_tau = 0.0;           // mean over groups
  double position_consistency = 0.0;  // mean over groups
  double time_per_group = 0.0;        // seconds, mean wall-clock scoring time
  std::vector<GroupAgreement> per_group;
};

nlohmann::json to_json(const AgreementReport& report);

/// Ranks each group's responses by descending sample_reward over the full
/// constraint set and compares with the human ranks. Engine errors are
/// rethrown prefixed with "groups[i]: ".
AgreementReport eval_reward_model(std::span<const PreferenceGroup> groups, const RewardEngine& engine);

struct ConstraintOutcome {
  bool hard = true;
  bool satisfied = false;
};

using InstructionOutcome = std::vector<ConstraintOutcome>;

struct SatisfactionRates {
  double csr = 0.0;  // mean over instructions of satisfied / constraints
  double isr = 0.0;  // fully satisfied instructions / instructions
};

/// Throws Error(kValidation) on empty input or an instruction with no outcomes.
SatisfactionRates satisfaction_rates(std::span<const InstructionOutcome> results);

/// Instruction-level (csr) and prompt-level (isr) strict rates over hard
/// constraints only. Instructions without hard constraints are skipped.
struct StrictRates {
  double instruction_level = 0.0;
  double prompt_level = 0.0;
};

StrictRates strict_rates(std::span<const InstructionOutcome> results);

}  // namespace ifrl
