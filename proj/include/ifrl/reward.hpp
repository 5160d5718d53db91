#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ifrl/hard_verifier.hpp"
#include "ifrl/scorer.hpp"
#include "ifrl/types.hpp"

namespace ifrl {

struct RewardMode {
  enum class Kind { kFull, kRuleOnly, kModelOnly, kBinarySoft };

  Kind kind = Kind::kFull;
  double threshold = 0.5;  // BinarySoft only, strictly inside (0, 1)

  static RewardMode full() { return {Kind::kFull, 0.5}; }
  static RewardMode rule_only() { return {Kind::kRuleOnly, 0.5}; }
  static RewardMode model_only() { return {Kind::kModelOnly, 0.5}; }
  static RewardMode binary_soft(double threshold);

  bool needs_model() const { return kind != Kind::kRuleOnly; }
  bool operator==(const RewardMode&) const = default;
};

/// "full", "rule_only", "model_only", "binary_soft" (threshold 0.5) or
/// "binary_soft:<threshold>".
RewardMode parse_reward_mode(std::string_view text);
std::string to_string(const RewardMode& mode);

/// Routes each constraint to the rule verifier or the soft scorer according
/// to the mode. Holds non-owning pointers; both must outlive the engine.
class RewardEngine {
 public:
  explicit RewardEngine(RewardMode mode, const SoftScorer* scorer = nullptr,
                        const RuleVerifier* verifier = nullptr);

  const RewardMode& mode() const { return mode_; }
  const SoftScorer* scorer() const { return scorer_; }

  /// r_i in [0, 1]. Throws Error(kValidation) for a soft constraint in
  /// RuleOnly mode or when the model path is needed but no scorer is set,
  /// and Error(kNumeric) when the scorer returns a value outside [0, 1].
  ConstraintReward constraint_reward(std::string_view response_text, const Constraint& constraint) const;

  /// Per-constraint rewards plus their mean (compensated left-to-right sum).
  RewardBreakdown sample_reward(std::string_view response_text,
                                std::span<const Constraint> constraints) const;

 private:
  RewardMode mode_;
  const SoftScorer* scorer_;
  const RuleVerifier* verifier_;
};

/// Text of the last \boxed{...} (balanced braces), otherwise the last
/// non-empty line. nullopt when the response has neither.
std::optional<std::string> extract_final_answer(std::string_view response_text);

/// Trim, collapse internal whitespace runs to one space, ASCII lowercase.
std::string normalize_answer(std::string_view answer);

/// 1.0 when the extracted answer equals the gold answer after
/// normalization, else 0.0. Throws Error(kValidation) on an empty gold answer.
double reasoning_reward(std::string_view response_text, std::string_view gold_answer);

struct AdvantageConfig {
  std::size_t group_size = 5;
  double eps = 1e-6;  // in (0, 1e-3]
};

void validate(const AdvantageConfig& config);

/// (r_i - mean) / (population_std + eps). A constant group yields exact zeros.
/// Throws Error(kValidation) when rewards.size() != group_size or a reward
/// is not finite.
std::vector<double> group_advantages(std::span<const double> rewards, const AdvantageConfig& config);

}  // namespace ifrl
