#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ifrl/features.hpp"
#include "ifrl/types.hpp"

namespace ifrl {

/// Two-logit linear classifier over hashed features.
/// Logit 1 is "satisfies the constraint", logit 0 is "does not".
struct ScorerModel {
  FeatureConfig config;
  std::vector<double> weights;  // row-major 2 x D
  std::array<double, 2> bias{0.0, 0.0};

  static ScorerModel zeros(const FeatureConfig& config = {});

  std::size_t dim() const { return config.dim(); }
  double& weight(int row, std::size_t col) { return weights[row * dim() + col]; }
  double weight(int row, std::size_t col) const { return weights[row * dim() + col]; }
  std::array<double, 2> logits(const FeatureVector& x) const;

  bool operator==(const ScorerModel&) const = default;
};

/// Throws Error(kValidation) on shape mismatch, Error(kNumeric) on non-finite values.
void validate(const ScorerModel& model);

/// exp(l1) / (exp(l0) + exp(l1)), shifted by max(l0, l1), kept inside the
/// open interval (0, 1).
double softmax_positive(double logit0, double logit1);

double score(const ScorerModel& model, std::string_view response_text, const Constraint& constraint);

inline constexpr double kProbabilityClamp = 1e-12;

/// Sum over pairs of -[y log f + (1 - y) log(1 - f)], f clamped to [1e-12, 1 - 1e-12].
double bce_loss(const ScorerModel& model, std::span<const LabeledPair> pairs);

struct PreferencePair {
  std::string preferred;
  std::string rejected;
  Constraint constraint;
};

/// Sum over pairs of -log sigma(r_a - r_b) with r = logits[1] - logits[0].
double bt_loss(const ScorerModel& model, std::span<const PreferencePair> pairs);

/// Matches each positive pair with a negative pair on the same constraint, in
/// file order. Unmatched pairs are dropped.
std::vector<PreferencePair> preference_pairs(std::span<const LabeledPair> pairs);

/// Dense gradient of a summed objective.
struct Gradient {
  std::vector<double> weights;
  std::array<double, 2> bias{0.0, 0.0};
};

Gradient bce_gradient(const ScorerModel& model, std::span<const LabeledPair> pairs);
Gradient bt_gradient(const ScorerModel& model, std::span<const PreferencePair> pairs);

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t epochs = 300;
  double l2 = 0.0;
  std::uint64_t seed = 0;
  /// Standard deviation of the seeded normal initialization; 0 starts from zeros.
  double init_scale = 0.0;
  FeatureConfig features;
};

void validate(const TrainConfig& config);

struct TrainReport {
  /// Summed data loss before the first epoch and after every epoch
  /// (epochs + 1 entries).
  std::vector<double> loss;
};

/// Full-batch gradient descent on the mean BCE loss (plus l2/2 |W|^2).
ScorerModel train_bce(std::span<const LabeledPair> pairs, const TrainConfig& config,
                      TrainReport* report = nullptr);

/// Full-batch gradient descent on the mean Bradley-Terry loss.
ScorerModel train_bt(std::span<const PreferencePair> pairs, const TrainConfig& config,
                     TrainReport* report = nullptr);

// Binary model file: "IFRM", u32 version, u64 D, u64 hash_seed, u32 max_ngram,
// u32 cross, then 2*D row-major weights and 2 biases as little-endian f64.
inline constexpr std::uint32_t kModelFormatVersion = 1;
std::vector<std::uint8_t> serialize(const ScorerModel& model);
ScorerModel deserialize(std::span<const std::uint8_t> bytes);
void save_model(const ScorerModel& model, const std::filesystem::path& path);
ScorerModel load_model(const std::filesystem::path& path);
/// Content hash of the serialized model, e.g. "ifrm1-0123456789abcdef".
std::string model_version(const ScorerModel& model);

/// Probability source for soft constraints.
class SoftScorer {
 public:
  virtual ~SoftScorer() = default;
  virtual double probability(std::string_view response_text, const Constraint& constraint) const = 0;
  virtual std::string version() const = 0;
};

class LinearScorer final : public SoftScorer {
 public:
  explicit LinearScorer(std::shared_ptr<const ScorerModel> model);

  double probability(std::string_view response_text, const Constraint& constraint) const override;
  std::string version() const override { return version_; }
  const ScorerModel& model() const { return *model_; }

 private:
  std::shared_ptr<const ScorerModel> model_;
  std::string version_;
};

}  // namespace ifrl
