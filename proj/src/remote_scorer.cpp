#include "ifrl/remote_scorer.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ifrl/error.hpp"

namespace ifrl {

RemoteScorer::RemoteScorer(RemoteScorerConfig config) : config_(std::move(config)) {
  if (config_.max_batch < 1) fail(ErrorKind::kValidation, "remote scorer: max_batch must be >= 1");
  if (config_.max_retries < 0 || config_.max_retries > 10) {
    fail(ErrorKind::kValidation, "remote scorer: max_retries must be in [0, 10]");
  }
  if (config_.port <= 0 || config_.port > 65535) fail(ErrorKind::kValidation, "remote scorer: bad port");
}

std::string RemoteScorer::version() const {
  return "remote:" + config_.host + ":" + std::to_string(config_.port);
}

double RemoteScorer::probability(std::string_view response_text, const Constraint& constraint) const {
  const ScoreItem item{std::string(response_text), constraint};
  return score_batch(std::span(&item, 1)).front();
}

std::vector<double> RemoteScorer::score_batch(std::span<const ScoreItem> batch) const {
  std::vector<double> out;
  out.reserve(batch.size());
  for (std::size_t start = 0; start < batch.size(); start += config_.max_batch) {
    const auto chunk = batch.subspan(start, std::min(config_.max_batch, batch.size() - start));
    const auto part = post_chunk(chunk);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::vector<double> RemoteScorer::post_chunk(std::span<const ScoreItem> chunk) const {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& [text, constraint] : chunk) {
    items.push_back({{"response", text}, {"constraints", nlohmann::json::array({to_json(constraint)})}});
  }
  const std::string body = nlohmann::json{{"items", items}, {"mode", "model_only"}}.dump();

  httplib::Client client(config_.host, config_.port);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  client.set_tcp_nodelay(true);

  httplib::Result res;
  for (int attempt = 0;; ++attempt) {
    ++requests_;
    res = client.Post("/v1/score", body, "application/json");
    const bool transient = !res || res->status == 503;
    if (!transient) break;
    if (attempt >= config_.max_retries) {
      fail(ErrorKind::kNetwork, version() + ": " +
                                    (res ? "status 503" : httplib::to_string(res.error())) + " after " +
                                    std::to_string(attempt + 1) + " attempts");
    }
    std::this_thread::sleep_for(config_.backoff * (1 << attempt));
  }
  if (res->status != 200) {
    fail(ErrorKind::kProtocol, version() + ": status " + std::to_string(res->status) + ": " + res->body);
  }
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kProtocol, version() + ": reply is not JSON: " + e.what());
  }
  if (!reply.is_object() || !reply.contains("results") || !reply["results"].is_array()) {
    fail(ErrorKind::kProtocol, version() + ": reply lacks a results array");
  }
  const auto& results = reply["results"];
  if (results.size() != chunk.size()) {
    fail(ErrorKind::kProtocol, version() + ": sent " + std::to_string(chunk.size()) + " items, got " +
                                   std::to_string(results.size()) + " results");
  }
  std::vector<double> out;
  out.reserve(results.size());
  for (const auto& r : results) {
    if (!r.is_object() || !r.contains("reward") || !r["reward"].is_number()) {
      fail(ErrorKind::kProtocol, version() + ": result without a numeric reward");
    }
    const double p = r["reward"].get<double>();
    if (!std::isfinite(p)) fail(ErrorKind::kProtocol, version() + ": non-finite reward");
    out.push_back(std::clamp(p, 0.0, 1.0));
  }
  return out;
}

}  // namespace ifrl
