#include "ifrl/reward.hpp"

#include <charconv>
#include <cmath>

#include "ifrl/error.hpp"
#include "ifrl/text.hpp"

namespace ifrl {

RewardMode RewardMode::binary_soft(double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    fail(ErrorKind::kValidation, "binary_soft threshold must be strictly inside (0, 1)");
  }
  return {Kind::kBinarySoft, threshold};
}

RewardMode parse_reward_mode(std::string_view text) {
  if (text == "full") return RewardMode::full();
  if (text == "rule_only") return RewardMode::rule_only();
  if (text == "model_only") return RewardMode::model_only();
  if (text == "binary_soft") return RewardMode::binary_soft(0.5);
  constexpr std::string_view kPrefix = "binary_soft:";
  if (text.starts_with(kPrefix)) {
    const std::string_view num = text.substr(kPrefix.size());
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), value);
    if (ec != std::errc{} || ptr != num.data() + num.size()) {
      fail(ErrorKind::kValidation, "mode: bad binary_soft threshold '" + std::string(num) + "'");
    }
    return RewardMode::binary_soft(value);
  }
  fail(ErrorKind::kValidation, "mode: unknown reward mode '" + std::string(text) +
                                   "' (expected full, rule_only, model_only, binary_soft[:t])");
}

std::string to_string(const RewardMode& mode) {
  switch (mode.kind) {
    case RewardMode::Kind::kFull: return "full";
    case RewardMode::Kind::kRuleOnly: return "rule_only";
    case RewardMode::Kind::kModelOnly: return "model_only";
    case RewardMode::Kind::kBinarySoft: {
      if (mode.threshold == 0.5) return "binary_soft";
      char buf[64];
      const auto res = std::to_chars(buf, buf + sizeof buf, mode.threshold);
      return "binary_soft:" + std::string(buf, res.ptr);
    }
  }
  return "full";
}

RewardEngine::RewardEngine(RewardMode mode, const SoftScorer* scorer, const RuleVerifier* verifier)
    : mode_(mode), scorer_(scorer), verifier_(verifier != nullptr ? verifier : &default_verifier()) {
  if (mode_.kind == RewardMode::Kind::kBinarySoft) RewardMode::binary_soft(mode_.threshold);
}

ConstraintReward RewardEngine::constraint_reward(std::string_view response_text,
                                                 const Constraint& constraint) const {
  using Kind = RewardMode::Kind;
  const bool to_model = mode_.kind == Kind::kModelOnly || constraint.is_soft();
  if (!to_model) {
    const auto result = verifier_->check(response_text, constraint);
    return {constraint.id, result.reward(), RewardSource::kRule};
  }
  if (mode_.kind == Kind::kRuleOnly) {
    fail(ErrorKind::kValidation, "constraint '" + constraint.id + "' is soft but mode is rule_only");
  }
  if (scorer_ == nullptr) {
    fail(ErrorKind::kValidation, "constraint '" + constraint.id + "' needs a scorer but none is loaded");
  }
  const double p = scorer_->probability(response_text, constraint);
  if (!(p >= 0.0 && p <= 1.0)) {
    fail(ErrorKind::kNumeric, "scorer returned " + std::to_string(p) + " for constraint '" +
                                  constraint.id + "'");
  }
  double reward = p;
  if (mode_.kind == Kind::kBinarySoft) reward = p >= mode_.threshold ? 1.0 : 0.0;
  return {constraint.id, reward, RewardSource::kModel};
}

RewardBreakdown RewardEngine::sample_reward(std::string_view response_text,
                                            std::span<const Constraint> constraints) const {
  if (constraints.empty()) fail(ErrorKind::kValidation, "sample_reward: empty constraint list");
  RewardBreakdown out;
  out.per_constraint.reserve(constraints.size());
  // Neumaier-compensated left-to-right sum: nearly correctly rounded, so the
  // mean barely moves when constraints are reordered.
  double sum = 0.0, carry = 0.0;
  for (const auto& c : constraints) {
    out.per_constraint.push_back(constraint_reward(response_text, c));
    const double r = out.per_constraint.back().reward;
    const double t = sum + r;
    carry += std::abs(sum) >= std::abs(r) ? (sum - t) + r : (r - t) + sum;
    sum = t;
  }
  out.aggregate = (sum + carry) / static_cast<double>(constraints.size());
  return out;
}

std::optional<std::string> extract_final_answer(std::string_view text) {
  constexpr std::string_view kBoxed = "\\boxed{";
  const auto pos = text.rfind(kBoxed);
  if (pos != std::string_view::npos) {
    std::size_t depth = 1;
    const std::size_t start = pos + kBoxed.size();
    for (std::size_t i = start; i < text.size(); ++i) {
      if (text[i] == '{') ++depth;
      if (text[i] == '}' && --depth == 0) return std::string(text.substr(start, i - start));
    }
    // Unbalanced box: fall through to the last-line rule.
  }
  const auto ls = text::lines(text);
  for (auto it = ls.rbegin(); it != ls.rend(); ++it) {
    const auto t = text::trim(*it);
    if (!t.empty()) return std::string(t);
  }
  return std::nullopt;
}

std::string normalize_answer(std::string_view answer) {
  std::string out;
  bool pending_space = false;
  for (char c : text::trim(answer)) {
    if (text::is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(text::to_lower(c));
  }
  return out;
}

double reasoning_reward(std::string_view response_text, std::string_view gold_answer) {
  const std::string gold = normalize_answer(gold_answer);
  if (gold.empty()) fail(ErrorKind::kValidation, "reasoning_reward: empty gold answer");
  const auto answer = extract_final_answer(response_text);
  if (!answer) return 0.0;
  return normalize_answer(*answer) == gold ? 1.0 : 0.0;
}

void validate(const AdvantageConfig& config) {
  if (config.group_size < 2) fail(ErrorKind::kValidation, "group_size must be >= 2");
  if (!(config.eps > 0.0 && config.eps <= 1e-3)) {
    fail(ErrorKind::kValidation, "eps must be in (0, 1e-3]");
  }
}

std::vector<double> group_advantages(std::span<const double> rewards, const AdvantageConfig& config) {
  validate(config);
  if (rewards.size() != config.group_size) {
    fail(ErrorKind::kValidation, "group has " + std::to_string(rewards.size()) +
                                     " rewards, expected group_size " + std::to_string(config.group_size));
  }
  for (double r : rewards) {
    if (!std::isfinite(r)) fail(ErrorKind::kValidation, "group contains a non-finite reward");
  }
  std::vector<double> out(rewards.size(), 0.0);
  bool constant = true;
  for (double r : rewards) constant = constant && r == rewards[0];
  if (constant) return out;

  const double n = static_cast<double>(rewards.size());
  double sum = 0.0;
  for (double r : rewards) sum += r;
  const double mean = sum / n;
  double ss = 0.0;
  for (double r : rewards) ss += (r - mean) * (r - mean);
  const double denom = std::sqrt(ss / n) + config.eps;
  for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - mean) / denom;
  return out;
}

}  // namespace ifrl
