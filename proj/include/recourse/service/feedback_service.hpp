#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "recourse/benchmark/runner.hpp"

namespace httplib {
class Server;
}

namespace recourse {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path model_dir = "models";
  Method default_method = Method::countergan;
  std::optional<bool> enforce_bounds;  // overrides every engine's default
  std::filesystem::path request_log;   // empty: no log
  BenchmarkConfig engines;             // rgd/csgp settings

  // RECOURSE_MODEL_DIR, RECOURSE_PORT and RECOURSE_HOST override the fields
  // they name. Throws SpecError for a malformed port.
  void apply_env();
};

inline constexpr const char* kClassifierFile = "classifier.json";
inline constexpr const char* kAutoencoderFile = "autoencoder.json";
inline constexpr const char* kCounterganFile = "countergan.json";

// Models plus what /health and /models report about them. Never mutated
// after loading.
struct ModelSnapshot {
  ModelBundle models;
  std::map<std::string, std::string> file_hashes;  // file name -> fnv1a of its bytes
  nlohmann::json metadata;                         // per artifact: role, seed, schema_hash, metrics
};

// Reads the three artifacts from `dir` and checks that their schemas match.
ModelSnapshot load_snapshot(const std::filesystem::path& dir);

struct HttpReply {
  int status = 200;
  nlohmann::json body;
};

// JSON endpoints over one immutable model snapshot. Handlers are const and
// safe to call concurrently.
class FeedbackService {
 public:
  explicit FeedbackService(ServiceConfig config);
  ~FeedbackService();

  const ServiceConfig& config() const { return config_; }

  // Loads config().model_dir. Call before serving.
  void load();
  void set_snapshot(std::shared_ptr<const ModelSnapshot> snapshot);
  std::shared_ptr<const ModelSnapshot> snapshot() const;

  // Routes one request; unknown paths give 404.
  HttpReply handle(std::string_view method, std::string_view path, std::string_view body) const;

  HttpReply get_schema() const;
  HttpReply post_score(std::string_view body) const;
  HttpReply post_counterfactual(std::string_view body) const;
  HttpReply get_health() const;
  HttpReply get_models() const;

  // Binds config().host; port 0 picks a free one. Returns the bound port.
  int bind();
  // Serves until stop(); requires bind().
  void listen();
  void stop();

 private:
  void log_request(std::string_view method, std::string_view path, int status, double ms) const;

  ServiceConfig config_;
  std::shared_ptr<const ModelSnapshot> snapshot_;
  std::unique_ptr<httplib::Server> server_;
  mutable std::mutex log_mutex_;
};

}  // namespace recourse
