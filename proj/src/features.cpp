#include "ifrl/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ifrl/error.hpp"
#include "ifrl/text.hpp"

namespace ifrl {

void validate(const FeatureConfig& config) {
  if (config.bits < 1 || config.bits > 26) {
    fail(ErrorKind::kValidation, "feature_config.bits must be in [1, 26]");
  }
  if (config.max_ngram < 1 || config.max_ngram > 2) {
    fail(ErrorKind::kValidation, "feature_config.max_ngram must be 1 or 2");
  }
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    const bool token_char = text::is_alnum(c) || static_cast<unsigned char>(c) >= 0x80;
    if (token_char) {
      cur.push_back(text::to_lower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::uint64_t feature_hash(std::string_view key, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (char c : key) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  h += 0x9E3779B97F4A7C15ULL;
  h = (h ^ (h >> 30)) * 0xBF58476D1CE4E5B9ULL;
  h = (h ^ (h >> 27)) * 0x94D049BB133111EBULL;
  return h ^ (h >> 31);
}

namespace {

void add_ngrams(std::map<std::uint32_t, double>& acc, const std::vector<std::string>& toks,
                char ns, const FeatureConfig& cfg) {
  const std::uint64_t mask = cfg.dim() - 1;
  std::string key;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    key.assign({ns, '1', ':'});
    key += toks[i];
    acc[static_cast<std::uint32_t>(feature_hash(key, cfg.hash_seed) & mask)] += 1.0;
    if (cfg.max_ngram >= 2 && i + 1 < toks.size()) {
      key.assign({ns, '2', ':'});
      key += toks[i];
      key += ' ';
      key += toks[i + 1];
      acc[static_cast<std::uint32_t>(feature_hash(key, cfg.hash_seed) & mask)] += 1.0;
    }
  }
}

}  // namespace

FeatureVector featurize(std::string_view response_text, std::string_view constraint_text,
                        const FeatureConfig& config) {
  const auto rtoks = tokenize(response_text);
  const auto ctoks = tokenize(constraint_text);
  std::map<std::uint32_t, double> acc;
  add_ngrams(acc, rtoks, 'r', config);
  add_ngrams(acc, ctoks, 'c', config);
  if (config.cross && !rtoks.empty() && !ctoks.empty()) {
    const std::set<std::string_view> ru(rtoks.begin(), rtoks.end());
    const std::set<std::string_view> cu(ctoks.begin(), ctoks.end());
    const std::uint64_t mask = config.dim() - 1;
    std::string key;
    for (auto c : cu) {
      for (auto r : ru) {
        key.assign("x:");
        key += c;
        key += '|';
        key += r;
        acc[static_cast<std::uint32_t>(feature_hash(key, config.hash_seed) & mask)] += 1.0;
      }
    }
  }
  FeatureVector fv;
  fv.dim = config.dim();
  double norm2 = 0.0;
  for (const auto& [idx, v] : acc) norm2 += v * v;
  const double inv = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 0.0;
  fv.indices.reserve(acc.size());
  fv.values.reserve(acc.size());
  for (const auto& [idx, v] : acc) {
    fv.indices.push_back(idx);
    fv.values.push_back(v * inv);
  }
  return fv;
}

FeatureVector featurize(std::string_view response_text, const Constraint& constraint,
                        const FeatureConfig& config) {
  return featurize(response_text, constraint.instruction_text(), config);
}

}  // namespace ifrl
