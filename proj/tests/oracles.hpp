#pragma once

// Independent reference implementations used as test oracles.

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ifrl/hard_verifier.hpp"
#include "ifrl/scorer.hpp"

namespace oracle {

// O(n^2) tau-b by direct pair classification.
inline double kendall_tau_b(std::span<const double> a, std::span<const double> b) {
  std::int64_t concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double da = a[i] - a[j];
      const double db = b[i] - b[j];
      if (da == 0 && db == 0) {
        ++ties_a;
        ++ties_b;
      } else if (da == 0) {
        ++ties_a;
      } else if (db == 0) {
        ++ties_b;
      } else if ((da > 0) == (db > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double n0 = static_cast<double>(a.size() * (a.size() - 1) / 2);
  const double denom = std::sqrt((n0 - ties_a) * (n0 - ties_b));
  return denom == 0 ? 0.0 : static_cast<double>(concordant - discordant) / denom;
}

// Two-class softmax written out without the max shift.
inline double probability(const ifrl::ScorerModel& m, const std::string& response, const ifrl::Constraint& c) {
  const auto x = ifrl::featurize(response, c, m.config);
  double l0 = m.bias[0], l1 = m.bias[1];
  for (std::size_t i = 0; i < x.indices.size(); ++i) {
    l0 += m.weight(0, x.indices[i]) * x.values[i];
    l1 += m.weight(1, x.indices[i]) * x.values[i];
  }
  return 1.0 / (1.0 + std::exp(l0 - l1));
}

inline double bce(const ifrl::ScorerModel& m, std::span<const ifrl::LabeledPair> pairs) {
  double total = 0;
  for (const auto& p : pairs) {
    const double f = std::clamp(probability(m, p.response_text, p.constraint), 1e-12, 1 - 1e-12);
    total += -(p.label * std::log(f) + (1 - p.label) * std::log(1 - f));
  }
  return total;
}

inline double satisfied_fraction(const std::string& response, std::span<const ifrl::Constraint> cs) {
  int hit = 0;
  for (const auto& c : cs) hit += ifrl::verify(response, *c.rule).satisfied ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(cs.size());
}

inline ifrl::ScorerModel random_model(std::uint64_t seed, std::uint32_t bits = 10, double scale = 0.5) {
  ifrl::FeatureConfig cfg;
  cfg.bits = bits;
  auto m = ifrl::ScorerModel::zeros(cfg);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, scale);
  for (double& w : m.weights) w = d(rng);
  m.bias = {d(rng), d(rng)};
  return m;
}

inline double population_std(std::span<const double> v) {
  double mean = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("ifrl_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace oracle
