#include "ifrl/scorer.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "ifrl/error.hpp"

namespace ifrl {

ScorerModel ScorerModel::zeros(const FeatureConfig& config) {
  validate(config);
  ScorerModel m;
  m.config = config;
  m.weights.assign(2 * config.dim(), 0.0);
  return m;
}

std::array<double, 2> ScorerModel::logits(const FeatureVector& x) const {
  std::array<double, 2> out = bias;
  const std::size_t d = dim();
  for (std::size_t i = 0; i < x.indices.size(); ++i) {
    const std::size_t idx = x.indices[i];
    out[0] += weights[idx] * x.values[i];
    out[1] += weights[d + idx] * x.values[i];
  }
  return out;
}

void validate(const ScorerModel& model) {
  validate(model.config);
  if (model.weights.size() != 2 * model.dim()) {
    fail(ErrorKind::kValidation, "scorer model: weights size does not match 2 x D");
  }
  for (double w : model.weights) {
    if (!std::isfinite(w)) fail(ErrorKind::kNumeric, "scorer model: non-finite weight");
  }
  for (double b : model.bias) {
    if (!std::isfinite(b)) fail(ErrorKind::kNumeric, "scorer model: non-finite bias");
  }
}

double softmax_positive(double logit0, double logit1) {
  const double m = std::max(logit0, logit1);
  const double e0 = std::exp(logit0 - m);
  const double e1 = std::exp(logit1 - m);
  const double p = e1 / (e0 + e1);
  constexpr double kBelowOne = 1.0 - 0x1p-53;
  return std::clamp(p, std::numeric_limits<double>::min(), kBelowOne);
}

double score(const ScorerModel& model, std::string_view response_text, const Constraint& constraint) {
  const auto l = model.logits(featurize(response_text, constraint, model.config));
  if (!std::isfinite(l[0]) || !std::isfinite(l[1])) {
    fail(ErrorKind::kNumeric, "scorer produced non-finite logits");
  }
  return softmax_positive(l[0], l[1]);
}

namespace {

double clamp_probability(double p) {
  return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
}

double pair_bce(double p, int label) {
  const double f = clamp_probability(p);
  return label == 1 ? -std::log(f) : -std::log1p(-f);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double margin(const ScorerModel& model, const FeatureVector& x) {
  const auto l = model.logits(x);
  return l[1] - l[0];
}

struct BceItem {
  FeatureVector x;
  int label;
};

struct BtItem {
  FeatureVector a;
  FeatureVector b;
};

std::vector<BceItem> featurize_pairs(const ScorerModel& model, std::span<const LabeledPair> pairs) {
  std::vector<BceItem> items;
  items.reserve(pairs.size());
  for (const auto& p : pairs) {
    items.push_back({featurize(p.response_text, p.constraint, model.config), p.label});
  }
  return items;
}

std::vector<BtItem> featurize_prefs(const ScorerModel& model, std::span<const PreferencePair> pairs) {
  std::vector<BtItem> items;
  items.reserve(pairs.size());
  for (const auto& p : pairs) {
    items.push_back({featurize(p.preferred, p.constraint, model.config),
                     featurize(p.rejected, p.constraint, model.config)});
  }
  return items;
}

// Both objective kinds share one accumulation routine: for BCE, the
// derivative with respect to (l0, l1); for BT, the derivative with respect
// to the margin difference.
double accumulate_bce(const ScorerModel& model, const std::vector<BceItem>& items, Gradient* grad) {
  const std::size_t d = model.dim();
  double loss = 0.0;
  for (const auto& it : items) {
    const auto l = model.logits(it.x);
    const double p = softmax_positive(l[0], l[1]);
    loss += pair_bce(p, it.label);
    if (grad != nullptr) {
      const double g1 = p - it.label;
      for (std::size_t i = 0; i < it.x.indices.size(); ++i) {
        grad->weights[it.x.indices[i]] -= g1 * it.x.values[i];
        grad->weights[d + it.x.indices[i]] += g1 * it.x.values[i];
      }
      grad->bias[0] -= g1;
      grad->bias[1] += g1;
    }
  }
  return loss;
}

double accumulate_bt(const ScorerModel& model, const std::vector<BtItem>& items, Gradient* grad) {
  const std::size_t d = model.dim();
  double loss = 0.0;
  for (const auto& it : items) {
    const double delta = margin(model, it.a) - margin(model, it.b);
    loss += softplus(-delta);
    if (grad != nullptr) {
      const double g = sigmoid(delta) - 1.0;
      for (std::size_t i = 0; i < it.a.indices.size(); ++i) {
        grad->weights[it.a.indices[i]] -= g * it.a.values[i];
        grad->weights[d + it.a.indices[i]] += g * it.a.values[i];
      }
      for (std::size_t i = 0; i < it.b.indices.size(); ++i) {
        grad->weights[it.b.indices[i]] += g * it.b.values[i];
        grad->weights[d + it.b.indices[i]] -= g * it.b.values[i];
      }
    }
  }
  return loss;
}

std::vector<std::uint32_t> active_indices(const std::vector<const FeatureVector*>& xs) {
  std::set<std::uint32_t> s;
  for (const auto* x : xs) s.insert(x->indices.begin(), x->indices.end());
  return {s.begin(), s.end()};
}

template <typename Items, typename Accumulate>
ScorerModel gradient_descent(const Items& items, std::vector<std::uint32_t> active,
                             ScorerModel model, const TrainConfig& config, TrainReport* report,
                             Accumulate&& accumulate) {
  const std::size_t d = model.dim();
  const double inv_n = 1.0 / static_cast<double>(items.size());
  const bool dense_decay = config.l2 > 0.0 && config.init_scale > 0.0;
  Gradient grad;
  grad.weights.assign(2 * d, 0.0);
  if (report != nullptr) report->loss.clear();

  const auto check = [](double loss, std::size_t epoch) {
    if (!std::isfinite(loss)) {
      fail(ErrorKind::kNumeric, "training diverged: non-finite loss at epoch " + std::to_string(epoch) +
                                    " (reduce learning_rate)");
    }
  };

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (auto idx : active) {
      grad.weights[idx] = 0.0;
      grad.weights[d + idx] = 0.0;
    }
    grad.bias = {0.0, 0.0};
    const double loss = accumulate(model, items, &grad);
    check(loss, epoch);
    if (report != nullptr) report->loss.push_back(loss);

    const double lr = config.learning_rate;
    if (dense_decay) {
      for (double& w : model.weights) w -= lr * config.l2 * w;
    }
    for (auto idx : active) {
      for (std::size_t row = 0; row < 2; ++row) {
        double& w = model.weights[row * d + idx];
        const double decay = dense_decay ? 0.0 : config.l2 * w;
        w -= lr * (grad.weights[row * d + idx] * inv_n + decay);
      }
    }
    model.bias[0] -= lr * grad.bias[0] * inv_n;
    model.bias[1] -= lr * grad.bias[1] * inv_n;
  }
  const double final_loss = accumulate(model, items, nullptr);
  check(final_loss, config.epochs);
  if (report != nullptr) report->loss.push_back(final_loss);
  validate(model);
  return model;
}

ScorerModel initial_model(const TrainConfig& config) {
  auto model = ScorerModel::zeros(config.features);
  if (config.init_scale > 0.0) {
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> dist(0.0, config.init_scale);
    for (double& w : model.weights) w = dist(rng);
  }
  return model;
}

}  // namespace

double bce_loss(const ScorerModel& model, std::span<const LabeledPair> pairs) {
  if (pairs.empty()) fail(ErrorKind::kValidation, "bce_loss: empty pair list");
  const auto items = featurize_pairs(model, pairs);
  return accumulate_bce(model, items, nullptr);
}

double bt_loss(const ScorerModel& model, std::span<const PreferencePair> pairs) {
  if (pairs.empty()) fail(ErrorKind::kValidation, "bt_loss: empty pair list");
  const auto items = featurize_prefs(model, pairs);
  return accumulate_bt(model, items, nullptr);
}

Gradient bce_gradient(const ScorerModel& model, std::span<const LabeledPair> pairs) {
  const auto items = featurize_pairs(model, pairs);
  Gradient g;
  g.weights.assign(2 * model.dim(), 0.0);
  accumulate_bce(model, items, &g);
  return g;
}

Gradient bt_gradient(const ScorerModel& model, std::span<const PreferencePair> pairs) {
  const auto items = featurize_prefs(model, pairs);
  Gradient g;
  g.weights.assign(2 * model.dim(), 0.0);
  accumulate_bt(model, items, &g);
  return g;
}

std::vector<PreferencePair> preference_pairs(std::span<const LabeledPair> pairs) {
  // Key on the full constraint so equal ids across instructions do not collide.
  std::map<std::string, std::vector<const LabeledPair*>> positives;
  std::map<std::string, std::size_t> used;
  std::vector<std::pair<std::string, const LabeledPair*>> negatives;
  for (const auto& p : pairs) {
    const std::string key = to_json(p.constraint).dump();
    if (p.label == 1) {
      positives[key].push_back(&p);
    } else {
      negatives.emplace_back(key, &p);
    }
  }
  std::vector<PreferencePair> out;
  for (const auto& [key, neg] : negatives) {
    auto it = positives.find(key);
    if (it == positives.end()) continue;
    std::size_t& next = used[key];
    if (next >= it->second.size()) continue;
    const LabeledPair* pos = it->second[next++];
    out.push_back({pos->response_text, neg->response_text, neg->constraint});
  }
  return out;
}

void validate(const TrainConfig& config) {
  if (!(config.learning_rate > 0.0 && config.learning_rate <= 1.0)) {
    fail(ErrorKind::kValidation, "train_config.learning_rate must be in (0, 1]");
  }
  if (config.epochs < 1 || config.epochs > 1'000'000) {
    fail(ErrorKind::kValidation, "train_config.epochs must be in [1, 1e6]");
  }
  if (!(config.l2 >= 0.0) || !std::isfinite(config.l2)) {
    fail(ErrorKind::kValidation, "train_config.l2 must be >= 0");
  }
  if (!(config.init_scale >= 0.0) || !std::isfinite(config.init_scale)) {
    fail(ErrorKind::kValidation, "train_config.init_scale must be >= 0");
  }
  validate(config.features);
}

ScorerModel train_bce(std::span<const LabeledPair> pairs, const TrainConfig& config,
                      TrainReport* report) {
  validate(config);
  if (pairs.empty()) fail(ErrorKind::kValidation, "train_bce: empty pair list");
  auto model = initial_model(config);
  const auto items = featurize_pairs(model, pairs);
  std::vector<const FeatureVector*> xs;
  for (const auto& it : items) xs.push_back(&it.x);
  return gradient_descent(items, active_indices(xs), std::move(model), config, report,
                          accumulate_bce);
}

ScorerModel train_bt(std::span<const PreferencePair> pairs, const TrainConfig& config,
                     TrainReport* report) {
  validate(config);
  if (pairs.empty()) fail(ErrorKind::kValidation, "train_bt: empty preference list");
  auto model = initial_model(config);
  const auto items = featurize_prefs(model, pairs);
  std::vector<const FeatureVector*> xs;
  for (const auto& it : items) {
    xs.push_back(&it.a);
    xs.push_back(&it.b);
  }
  return gradient_descent(items, active_indices(xs), std::move(model), config, report,
                          accumulate_bt);
}

// --- serialization ----------------------------------------------------------

namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'I', 'F', 'R', 'M'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    if (pos_ + sizeof(U) > bytes_.size()) fail(ErrorKind::kValidation, "model file truncated");
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(bytes_[pos_ + i]) << (8 * i);
    pos_ += sizeof(U);
    return std::bit_cast<T>(bits);
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    if (pos_ + n > bytes_.size()) fail(ErrorKind::kValidation, "model file truncated");
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize(const ScorerModel& model) {
  validate(model);
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  out.reserve(40 + 8 * (model.weights.size() + 2));
  put_le<std::uint32_t>(out, kModelFormatVersion);
  put_le<std::uint64_t>(out, model.dim());
  put_le<std::uint64_t>(out, model.config.hash_seed);
  put_le<std::uint32_t>(out, model.config.max_ngram);
  put_le<std::uint32_t>(out, model.config.cross ? 1u : 0u);
  for (double w : model.weights) put_le<double>(out, w);
  put_le<double>(out, model.bias[0]);
  put_le<double>(out, model.bias[1]);
  return out;
}

ScorerModel deserialize(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.take(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) {
    fail(ErrorKind::kValidation, "not an IFRM model file (bad magic)");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kModelFormatVersion) {
    fail(ErrorKind::kUnsupported, "unsupported model format version " + std::to_string(version));
  }
  const auto d = r.get<std::uint64_t>();
  if (d < 2 || !std::has_single_bit(d) || d > (std::uint64_t{1} << 26)) {
    fail(ErrorKind::kValidation, "model file: D must be a power of two in [2, 2^26]");
  }
  FeatureConfig cfg;
  cfg.bits = static_cast<std::uint32_t>(std::countr_zero(d));
  cfg.hash_seed = r.get<std::uint64_t>();
  cfg.max_ngram = r.get<std::uint32_t>();
  const auto cross = r.get<std::uint32_t>();
  if (cross > 1) fail(ErrorKind::kValidation, "model file: cross flag must be 0 or 1");
  cfg.cross = cross == 1;
  auto model = ScorerModel::zeros(cfg);
  for (double& w : model.weights) w = r.get<double>();
  model.bias[0] = r.get<double>();
  model.bias[1] = r.get<double>();
  if (!r.done()) fail(ErrorKind::kValidation, "model file: trailing bytes");
  validate(model);
  return model;
}

void save_model(const ScorerModel& model, const std::filesystem::path& path) {
  const auto bytes = serialize(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) fail(ErrorKind::kIo, path.string() + ": write failure");
}

ScorerModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, path.string() + ": cannot open for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return deserialize(bytes);
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

std::string model_version(const ScorerModel& model) {
  const auto bytes = serialize(model);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "ifrm" + std::to_string(kModelFormatVersion) + "-";
  for (int i = 15; i >= 0; --i) out.push_back(kHex[(h >> (4 * i)) & 0xF]);
  return out;
}

LinearScorer::LinearScorer(std::shared_ptr<const ScorerModel> model) : model_(std::move(model)) {
  if (!model_) fail(ErrorKind::kValidation, "LinearScorer: null model");
  validate(*model_);
  version_ = model_version(*model_);
}

double LinearScorer::probability(std::string_view response_text, const Constraint& constraint) const {
  return score(*model_, response_text, constraint);
}

}  // namespace ifrl
