#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ifrl/constraint.hpp"

namespace ifrl {

struct VerificationResult {
  std::string constraint_id;
  bool satisfied = false;
  std::string detail;  // the measured quantity the decision was based on

  double reward() const { return satisfied ? 1.0 : 0.0; }
  bool operator==(const VerificationResult&) const = default;
};

struct CatalogEntry {
  RuleType type;
  std::string rule_type;
  std::string param_schema;
  std::string description;
};

/// Rule-based check of a single hard rule. Pure; safe from any thread.
/// Throws Error(kValidation) for rules that fail schema validation.
VerificationResult verify(std::string_view response_text, const HardRule& rule);

/// Same as verify(), stamped with the constraint's id. `constraint` must be hard.
VerificationResult verify(std::string_view response_text, const Constraint& constraint);

/// Element i equals verify(response_text, rules[i]). The first failing rule
/// aborts the batch; the error message starts with "rules[i]: ".
std::vector<VerificationResult> verify_all(std::string_view response_text,
                                           std::span<const HardRule> rules);

/// Supported rule types, sorted by rule_type name.
const std::vector<CatalogEntry>& catalog();

/// Seam for the reward engine, so rule routing can be observed in tests.
class RuleVerifier {
 public:
  virtual ~RuleVerifier() = default;
  virtual VerificationResult check(std::string_view response_text,
                                   const Constraint& constraint) const;
};

/// Process-wide stateless default instance.
const RuleVerifier& default_verifier();

}  // namespace ifrl
