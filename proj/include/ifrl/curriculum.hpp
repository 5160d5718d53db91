#pragma once

#include <map>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "ifrl/types.hpp"

namespace ifrl {

/// Level k carries the first k constraints of the instruction, k = 1..n.
/// Throws Error(kValidation) for reasoning tasks or zero-constraint instructions.
std::vector<CurriculumLevel> decompose(const Instruction& instruction);

struct PairOptions {
  /// Drop hard-constraint pairs whose label the rule verifier contradicts.
  bool denoise_hard = false;
};

/// Self-supervised scorer pairs for one instruction: for each k, (o_k, c_k, 1)
/// followed by (o_{k-1}, c_k, 0). `responses` is keyed by level_k and must
/// include level 0 (the seed-only response).
std::vector<LabeledPair> build_pairs(std::span<const CurriculumLevel> levels,
                                     const std::map<std::size_t, Response>& responses,
                                     const PairOptions& options = {});

/// Groups levels and responses by instruction id (in order of first
/// appearance among `levels`) and concatenates build_pairs per instruction.
std::vector<LabeledPair> build_corpus_pairs(std::span<const CurriculumLevel> levels,
                                            std::span<const Response> responses,
                                            const PairOptions& options = {});

struct LevelStats {
  std::size_t k = 0;
  std::size_t num_instructions = 0;
  std::size_t num_constraints = 0;
  std::size_t num_soft = 0;
  std::size_t num_hard = 0;

  bool operator==(const LevelStats&) const = default;
};

struct CurriculumStats {
  std::vector<LevelStats> per_level;  // ascending k
};

CurriculumStats dataset_stats(std::span<const CurriculumLevel> levels);
nlohmann::json to_json(const CurriculumStats& stats);

}  // namespace ifrl
