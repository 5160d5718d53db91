#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ifrl/constraint.hpp"

namespace ifrl {

struct FeatureConfig {
  std::uint32_t bits = 18;  // D = 2^bits buckets
  std::uint64_t hash_seed = 0x9E3779B97F4A7C15ULL;
  std::uint32_t max_ngram = 2;  // 1 = unigrams, 2 = unigrams + bigrams
  bool cross = true;            // response x constraint unigram pairs

  std::size_t dim() const { return std::size_t{1} << bits; }
  bool operator==(const FeatureConfig&) const = default;
};

void validate(const FeatureConfig& config);

/// Sparse, L2-normalized hashed feature vector.
struct FeatureVector {
  std::vector<std::uint32_t> indices;  // strictly increasing, all < dim
  std::vector<double> values;
  std::size_t dim = 0;

  bool operator==(const FeatureVector&) const = default;
};

/// Lowercased ASCII alphanumeric runs; bytes >= 0x80 are kept as token
/// characters so non-Latin text still produces features.
std::vector<std::string> tokenize(std::string_view text);

/// Seeded 64-bit string hash (FNV-1a followed by a splitmix64 finalizer).
std::uint64_t feature_hash(std::string_view key, std::uint64_t seed);

/// Namespaced n-grams of the response ("r"), of the constraint text ("c"),
/// and crossed response x constraint unigrams ("x"). Empty texts produce an
/// empty vector.
FeatureVector featurize(std::string_view response_text, std::string_view constraint_text,
                        const FeatureConfig& config);

/// Uses constraint.instruction_text(), so hard constraints featurize by their
/// rendered description.
FeatureVector featurize(std::string_view response_text, const Constraint& constraint,
                        const FeatureConfig& config);

}  // namespace ifrl
