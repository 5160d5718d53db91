#include "ifrl/service.hpp"

#include <charconv>
#include <cstdlib>

#include <httplib.h>

#include "ifrl/error.hpp"
#include "ifrl/hard_verifier.hpp"

namespace ifrl {

void validate(const ServiceConfig& config) {
  if (config.max_batch < 1) fail(ErrorKind::kValidation, "max_batch must be >= 1");
  if (config.mode.needs_model() && config.model_path.empty()) {
    fail(ErrorKind::kValidation, "mode " + to_string(config.mode) + " requires a model path");
  }
  if (config.port < 0 || config.port > 65535) fail(ErrorKind::kValidation, "port out of range");
  if (config.worker_threads < 1) fail(ErrorKind::kValidation, "worker_threads must be >= 1");
}

std::pair<std::string, int> parse_bind_address(std::string_view bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    fail(ErrorKind::kValidation, "bind address '" + std::string(bind) + "' is not host:port");
  }
  const std::string_view port_text = bind.substr(colon + 1);
  int port = -1;
  const auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port < 0 || port > 65535) {
    fail(ErrorKind::kValidation, "bind address '" + std::string(bind) + "' has a bad port");
  }
  return {std::string(bind.substr(0, colon)), port};
}

void apply_env_overrides(ServiceConfig& config) {
  if (const char* bind = std::getenv("IFRL_BIND"); bind != nullptr && *bind != '\0') {
    std::tie(config.host, config.port) = parse_bind_address(bind);
  }
  if (const char* model = std::getenv("IFRL_MODEL"); model != nullptr && *model != '\0') {
    config.model_path = model;
  }
  if (const char* mode = std::getenv("IFRL_MODE"); mode != nullptr && *mode != '\0') {
    config.mode = parse_reward_mode(mode);
  }
}

namespace {

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation: return 400;
    case ErrorKind::kUnsupported: return 422;
    default: return 500;
  }
}

HttpReply error_reply(int status, ErrorKind kind, const std::string& message) {
  return {status, {{"error", std::string(to_string(kind))}, {"message", message}}};
}

HttpReply error_reply(const Error& e) { return error_reply(status_for(e.kind()), e.kind(), e.what()); }

nlohmann::json parse_body(std::string_view body) {
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kValidation, std::string("body: invalid JSON: ") + e.what());
  }
}

void only_fields(const nlohmann::json& j, std::initializer_list<std::string_view> allowed,
                 const std::string& path) {
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(ErrorKind::kValidation, path + key + ": unknown field");
    }
  }
}

}  // namespace

RewardService::RewardService(ServiceConfig config) : config_(std::move(config)) {
  if (config_.max_batch < 1) fail(ErrorKind::kValidation, "max_batch must be >= 1");
}

RewardService::~RewardService() { stop(); }

void RewardService::load() {
  if (config_.model_path.empty()) {
    if (config_.mode.needs_model()) {
      fail(ErrorKind::kValidation, "mode " + to_string(config_.mode) + " requires a model path");
    }
    ready_ = true;
    return;
  }
  auto model = std::make_shared<const ScorerModel>(load_model(config_.model_path));
  load(std::make_shared<const LinearScorer>(std::move(model)));
}

void RewardService::load(std::shared_ptr<const SoftScorer> scorer) {
  if (!scorer) fail(ErrorKind::kValidation, "service: null scorer");
  scorer_ = std::move(scorer);
  model_version_ = scorer_->version();
  ready_ = true;
}

HttpReply RewardService::handle_health() const {
  if (!ready()) {
    return {503, {{"status", "loading"}, {"model_version", model_version_}, {"catalog_size", catalog().size()}}};
  }
  return {200, {{"status", "ok"}, {"model_version", model_version_}, {"catalog_size", catalog().size()}}};
}

HttpReply RewardService::handle_score(std::string_view body) const {
  if (!ready()) return error_reply(503, ErrorKind::kInternal, "model is still loading");
  std::vector<std::pair<std::string, std::vector<Constraint>>> items;
  RewardMode mode = config_.mode;
  try {
    const auto j = parse_body(body);
    if (!j.is_object()) fail(ErrorKind::kValidation, "body: expected an object");
    only_fields(j, {"items", "mode"}, "");
    if (j.contains("mode")) {
      if (!j["mode"].is_string()) fail(ErrorKind::kValidation, "mode: expected a string");
      mode = parse_reward_mode(j["mode"].get<std::string>());
    }
    if (!j.contains("items") || !j["items"].is_array()) {
      fail(ErrorKind::kValidation, "items: expected an array");
    }
    const auto& arr = j["items"];
    if (arr.size() > config_.max_batch) {
      return error_reply(413, ErrorKind::kValidation,
                         "items: batch of " + std::to_string(arr.size()) + " exceeds max_batch " +
                             std::to_string(config_.max_batch));
    }
    items.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "items[" + std::to_string(i) + "]";
      const auto& it = arr[i];
      if (!it.is_object()) fail(ErrorKind::kValidation, path + ": expected an object");
      only_fields(it, {"response", "constraints"}, path + ".");
      if (!it.contains("response") || !it["response"].is_string()) {
        fail(ErrorKind::kValidation, path + ".response: expected a string");
      }
      if (!it.contains("constraints") || !it["constraints"].is_array() || it["constraints"].empty()) {
        fail(ErrorKind::kValidation, path + ".constraints: expected a non-empty array");
      }
      std::vector<Constraint> cs;
      for (std::size_t k = 0; k < it["constraints"].size(); ++k) {
        cs.push_back(constraint_from_json(it["constraints"][k], path + ".constraints[" + std::to_string(k) + "]"));
      }
      items.emplace_back(it["response"].get<std::string>(), std::move(cs));
    }
    if (mode.needs_model() && !scorer_) {
      // Full mode over hard-only items never touches the model.
      bool any_model = mode.kind != RewardMode::Kind::kFull;
      for (const auto& [_, cs] : items) {
        for (const auto& c : cs) any_model = any_model || c.is_soft();
      }
      if (any_model && !items.empty()) {
        fail(ErrorKind::kValidation, "mode: " + to_string(mode) + " needs a model but none is loaded");
      }
    }
  } catch (const Error& e) {
    return error_reply(e);
  }

  const RewardEngine engine(mode, scorer_.get());
  nlohmann::json results = nlohmann::json::array();
  for (std::size_t i = 0; i < items.size(); ++i) {
    try {
      results.push_back(to_json(engine.sample_reward(items[i].first, items[i].second)));
    } catch (const Error& e) {
      const int status = e.kind() == ErrorKind::kValidation ? 400 : 500;
      return error_reply(status, e.kind(), "items[" + std::to_string(i) + "]: " + e.what());
    }
  }
  return {200, {{"results", std::move(results)}}};
}

HttpReply RewardService::handle_advantages(std::string_view body) const {
  if (!ready()) return error_reply(503, ErrorKind::kInternal, "model is still loading");
  try {
    const auto j = parse_body(body);
    if (!j.is_object()) fail(ErrorKind::kValidation, "body: expected an object");
    only_fields(j, {"groups", "eps"}, "");
    AdvantageConfig cfg;
    if (j.contains("eps")) {
      if (!j["eps"].is_number()) fail(ErrorKind::kValidation, "eps: expected a number");
      cfg.eps = j["eps"].get<double>();
    }
    if (!j.contains("groups") || !j["groups"].is_array()) {
      fail(ErrorKind::kValidation, "groups: expected an array");
    }
    const auto& groups = j["groups"];
    std::vector<std::vector<double>> parsed;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const std::string path = "groups[" + std::to_string(g) + "]";
      if (!groups[g].is_array()) fail(ErrorKind::kValidation, path + ": expected an array");
      if (groups[g].size() < 2) fail(ErrorKind::kValidation, path + ": groups need at least 2 rewards");
      if (g > 0 && groups[g].size() != groups[0].size()) {
        fail(ErrorKind::kValidation, path + ": ragged groups (length " + std::to_string(groups[g].size()) +
                                         ", expected " + std::to_string(groups[0].size()) + ")");
      }
      std::vector<double> rs;
      for (std::size_t i = 0; i < groups[g].size(); ++i) {
        if (!groups[g][i].is_number()) {
          fail(ErrorKind::kValidation, path + "[" + std::to_string(i) + "]: expected a number");
        }
        rs.push_back(groups[g][i].get<double>());
      }
      parsed.push_back(std::move(rs));
    }
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t g = 0; g < parsed.size(); ++g) {
      cfg.group_size = parsed[g].size();
      try {
        out.push_back(group_advantages(parsed[g], cfg));
      } catch (const Error& e) {
        fail(e.kind(), "groups[" + std::to_string(g) + "]: " + e.what());
      }
    }
    return {200, {{"advantages", std::move(out)}}};
  } catch (const Error& e) {
    return error_reply(e);
  }
}

void RewardService::install_routes() {
  server_ = std::make_unique<httplib::Server>();
  const auto timeout = config_.request_timeout.count();
  server_->set_read_timeout(timeout, 0);
  server_->set_write_timeout(timeout, 0);
  server_->set_payload_max_length(std::size_t{64} << 20);
  server_->set_tcp_nodelay(true);
  const std::size_t threads = config_.worker_threads;
  server_->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };

  const auto send = [](httplib::Response& res, const HttpReply& reply) {
    res.status = reply.status;
    res.set_content(reply.body.dump(), "application/json");
  };
  server_->Post("/v1/score", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, handle_score(req.body));
  });
  server_->Post("/v1/advantages", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, handle_advantages(req.body));
  });
  server_->Get("/healthz", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, handle_health());
  });
  server_->set_exception_handler([send](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      send(res, error_reply(500, ErrorKind::kInternal, e.what()));
    } catch (...) {
      send(res, error_reply(500, ErrorKind::kInternal, "unknown error"));
    }
  });
}

int RewardService::bind() {
  install_routes();
  int port = config_.port;
  if (port == 0) {
    port = server_->bind_to_any_port(config_.host);
  } else if (!server_->bind_to_port(config_.host, port)) {
    port = -1;
  }
  if (port < 0) {
    fail(ErrorKind::kIo, "cannot bind " + config_.host + ":" + std::to_string(config_.port));
  }
  return port;
}

int RewardService::start() {
  const int port = bind();
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port;
}

void RewardService::run() {
  bind();
  server_->listen_after_bind();
}

void RewardService::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace ifrl
