#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <thread>

#include <nlohmann/json.hpp>

#include "ifrl/reward.hpp"
#include "ifrl/scorer.hpp"

namespace httplib {
class Server;
}

namespace ifrl {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 binds an ephemeral port
  std::filesystem::path model_path;
  RewardMode mode = RewardMode::full();
  std::size_t max_batch = 256;
  std::chrono::seconds request_timeout{30};
  std::size_t worker_threads = 4;
};

/// Throws Error(kValidation) when max_batch is 0 or when the mode needs a
/// model and model_path is empty.
void validate(const ServiceConfig& config);

/// "host:port" -> {host, port}.
std::pair<std::string, int> parse_bind_address(std::string_view bind);

/// Applies IFRL_BIND, IFRL_MODEL and IFRL_MODE from the environment.
void apply_env_overrides(ServiceConfig& config);

struct HttpReply {
  int status = 200;
  nlohmann::json body;
};

/// Transport-free request handlers plus an HTTP/1.1 front end. Handlers are
/// const and safe to call concurrently once the model is loaded.
class RewardService {
 public:
  explicit RewardService(ServiceConfig config);
  ~RewardService();

  RewardService(const RewardService&) = delete;
  RewardService& operator=(const RewardService&) = delete;

  /// Loads the model named by config.model_path (if any) and marks the
  /// service ready.
  void load();
  /// Uses an in-memory scorer instead of a model file; marks the service ready.
  void load(std::shared_ptr<const SoftScorer> scorer);
  bool ready() const { return ready_.load(); }

  HttpReply handle_score(std::string_view body) const;
  HttpReply handle_advantages(std::string_view body) const;
  HttpReply handle_health() const;

  /// Binds and serves on a background thread. Returns the bound port.
  int start();
  /// Binds and serves on the calling thread until stop().
  void run();
  void stop();

  const ServiceConfig& config() const { return config_; }

 private:
  void install_routes();
  int bind();

  ServiceConfig config_;
  std::shared_ptr<const SoftScorer> scorer_;
  std::string model_version_ = "none";
  std::atomic<bool> ready_{false};
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace ifrl
