#pragma once

#include <atomic>
#include <chrono>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ifrl/scorer.hpp"

namespace ifrl {

struct RemoteScorerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::chrono::milliseconds timeout{10'000};
  std::size_t max_batch = 256;
  int max_retries = 3;  // attempts after the first, network failures only
  std::chrono::milliseconds backoff{50};
};

using ScoreItem = std::pair<std::string, Constraint>;

/// Client for an /v1/score endpoint used as an opaque probability source.
/// Each (response, constraint) item is sent as one model_only item with a
/// single constraint, so the reply reward is the constraint probability.
class RemoteScorer final : public SoftScorer {
 public:
  explicit RemoteScorer(RemoteScorerConfig config);

  /// Order-preserving; replies are clamped to [0, 1]. Throws Error(kNetwork)
  /// when retries are exhausted, Error(kProtocol) on malformed replies,
  /// non-2xx statuses or a result count that does not match the request.
  /// An empty batch returns without a network call.
  std::vector<double> score_batch(std::span<const ScoreItem> batch) const;

  double probability(std::string_view response_text, const Constraint& constraint) const override;
  /// "remote:<host>:<port>"
  std::string version() const override;

  /// Number of HTTP requests issued, including retries.
  std::size_t requests_sent() const { return requests_.load(); }

 private:
  std::vector<double> post_chunk(std::span<const ScoreItem> chunk) const;

  RemoteScorerConfig config_;
  mutable std::atomic<std::size_t> requests_{0};
};

}  // namespace ifrl
