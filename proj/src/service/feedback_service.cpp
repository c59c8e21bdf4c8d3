#include "recourse/service/feedback_service.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>

#include <httplib.h>

#include "recourse/error.hpp"
#include "recourse/predictors/model_io.hpp"
#include "recourse/profiles/csv.hpp"
#include "recourse/util/files.hpp"

namespace recourse {

using json = nlohmann::json;

void ServiceConfig::apply_env() {
  if (const char* dir = std::getenv("RECOURSE_MODEL_DIR"); dir && *dir) model_dir = dir;
  if (const char* host_env = std::getenv("RECOURSE_HOST"); host_env && *host_env) host = host_env;
  if (const char* port_env = std::getenv("RECOURSE_PORT"); port_env && *port_env) {
    char* end = nullptr;
    const long p = std::strtol(port_env, &end, 10);
    if (*end != '\0' || p < 0 || p > 65535) throw SpecError("RECOURSE_PORT: not a port number");
    port = static_cast<int>(p);
  }
}

namespace {

json artifact_metadata(const json& doc) {
  return json{{"role", doc.at("role")},
              {"seed", doc.at("seed")},
              {"schema_hash", doc.at("schema_hash")},
              {"metrics", doc.at("metrics")}};
}

}  // namespace

ModelSnapshot load_snapshot(const std::filesystem::path& dir) {
  ModelSnapshot snap;
  snap.metadata = json::object();
  auto read = [&](const char* name) {
    const std::string text = read_file(dir / name);
    snap.file_hashes[name] = fnv1a_hex(text);
    json doc = parse_model_text(text);
    snap.metadata[name] = artifact_metadata(doc);
    return doc;
  };
  snap.models.classifier = classifier_from_json(read(kClassifierFile));
  snap.models.autoencoder = autoencoder_from_json(read(kAutoencoderFile));
  snap.models.gan = gan_from_json(read(kCounterganFile));
  snap.models.validate();
  return snap;
}

FeedbackService::FeedbackService(ServiceConfig config) : config_(std::move(config)) {}

FeedbackService::~FeedbackService() = default;

void FeedbackService::load() {
  set_snapshot(std::make_shared<const ModelSnapshot>(load_snapshot(config_.model_dir)));
}

void FeedbackService::set_snapshot(std::shared_ptr<const ModelSnapshot> snapshot) {
  std::atomic_store(&snapshot_, std::move(snapshot));
}

std::shared_ptr<const ModelSnapshot> FeedbackService::snapshot() const { return std::atomic_load(&snapshot_); }

namespace {

HttpReply error_reply(int status, const std::string& message, const std::string& feature = {}) {
  json body{{"error", message}};
  if (!feature.empty()) body["feature"] = feature;
  return {status, std::move(body)};
}

HttpReply not_loaded() { return error_reply(503, "models not loaded"); }

json kind_json(const FeatureSpec& f) {
  switch (f.kind) {
    case FeatureKind::continuous: return "continuous";
    case FeatureKind::integer: return "integer";
    case FeatureKind::multiple_of: return json{{"multiple_of", f.step}};
  }
  return "continuous";
}

json parse_body(std::string_view body) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON body: ") + e.what());
  }
}

// Maps library errors onto the status codes the endpoints document.
template <class Fn>
HttpReply guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const SchemaError& e) {
    return error_reply(400, e.what(), e.feature());
  } catch (const ParseError& e) {
    return error_reply(400, e.what());
  } catch (const Error& e) {
    return error_reply(500, e.what());
  }
}

}  // namespace

HttpReply FeedbackService::get_schema() const {
  const auto snap = snapshot();
  if (!snap) return not_loaded();
  const ProfileSchema& schema = snap->models.schema();
  json features = json::array();
  for (const FeatureSpec& f : schema.features()) {
    features.push_back(json{{"name", f.name},
                            {"kind", kind_json(f)},
                            {"mutable", f.is_mutable},
                            {"lower_bound", f.lower_bound},
                            {"upper_bound", f.upper_bound}});
  }
  return {200, json{{"schema_hash", schema.hash()}, {"features", std::move(features)}}};
}

HttpReply FeedbackService::post_score(std::string_view body) const {
  const auto snap = snapshot();
  if (!snap) return not_loaded();
  return guarded([&] {
    json doc = parse_body(body);
    if (doc.is_object() && doc.contains("profile")) doc = doc.at("profile");
    const ProfileSchema& schema = snap->models.schema();
    const RawProfile raw = profile_from_json(doc, schema);
    const double score = predict(snap->models.classifier, schema.normalize(raw));
    return HttpReply{200, json{{"score", score}, {"approved", score >= kDecisionThreshold}}};
  });
}

HttpReply FeedbackService::post_counterfactual(std::string_view body) const {
  const auto snap = snapshot();
  if (!snap) return not_loaded();
  return guarded([&]() -> HttpReply {
    const json doc = parse_body(body);
    if (!doc.is_object() || !doc.contains("profile")) throw ParseError("body needs a \"profile\" object");
    Method method = config_.default_method;
    if (doc.contains("method")) {
      if (!doc.at("method").is_string()) return error_reply(400, "\"method\" must be a string");
      try {
        method = method_from_string(doc.at("method").get<std::string>());
      } catch (const SpecError& e) {
        return error_reply(400, e.what());
      }
    }
    std::optional<bool> enforce = config_.enforce_bounds;
    if (doc.contains("options")) {
      const json& options = doc.at("options");
      if (!options.is_object()) return error_reply(400, "\"options\" must be an object");
      if (options.contains("enforce_bounds")) {
        if (!options.at("enforce_bounds").is_boolean()) return error_reply(400, "enforce_bounds must be a boolean");
        enforce = options.at("enforce_bounds").get<bool>();
      }
    }

    const ModelBundle& m = snap->models;
    const ProfileSchema& schema = m.schema();
    const RawProfile raw = profile_from_json(doc.at("profile"), schema);
    const auto violations = profile_violations(raw, schema);
    if (!violations.empty()) {
      json body422{{"error", "profile violates the schema"}, {"violations", violations}};
      return {422, std::move(body422)};
    }

    const Clock clock = default_clock();
    const auto start = clock();
    CfResult result;
    switch (method) {
      case Method::rgd: {
        RgdConfig c = config_.engines.rgd;
        if (enforce) c.enforce_bounds = *enforce;
        result = rgd_generate(m.classifier, raw, schema, c);
        break;
      }
      case Method::csgp: {
        CsgpConfig c = config_.engines.csgp;
        if (enforce) c.enforce_bounds = *enforce;
        result = csgp_generate(m.classifier, m.autoencoder, *m.autoencoder.prototypes, raw, schema, c);
        break;
      }
      case Method::countergan:
        result = countergan_generate(m.gan, m.classifier, raw, schema,
                                     enforce.value_or(config_.engines.countergan_enforce_bounds));
        break;
    }
    const auto stop = clock();
    if (stop < start) throw MeasurementError("latency: clock went backwards");
    const double latency_ms = std::chrono::duration<double, std::milli>(stop - start).count();

    const FeedbackDiff diff = make_diff(raw, result, schema);
    json changes = json::array();
    for (const DiffEntry& e : diff.changes) {
      changes.push_back(json{{"feature", e.feature}, {"old", e.old_value}, {"delta", e.delta}, {"new", e.new_value}});
    }
    json out{{"counterfactual", profile_to_json(result.raw, schema)},
             {"diff", std::move(changes)},
             {"score_before", result.score_before},
             {"score_after", result.score_after},
             {"approved_before", result.score_before >= kDecisionThreshold},
             {"approved_after", result.score_after >= kDecisionThreshold},
             {"method", method_name(method)},
             {"latency_ms", latency_ms}};
    return {200, std::move(out)};
  });
}

HttpReply FeedbackService::get_health() const {
  const auto snap = snapshot();
  if (!snap) return {200, json{{"status", "degraded"}, {"model_hashes", json::object()}}};
  return {200, json{{"status", "ok"}, {"model_hashes", snap->file_hashes}}};
}

HttpReply FeedbackService::get_models() const {
  const auto snap = snapshot();
  if (!snap) return not_loaded();
  return {200, snap->metadata};
}

HttpReply FeedbackService::handle(std::string_view method, std::string_view path, std::string_view body) const {
  const bool get = method == "GET";
  const bool post = method == "POST";
  if (path == "/schema" && get) return get_schema();
  if (path == "/score" && post) return post_score(body);
  if (path == "/counterfactual" && post) return post_counterfactual(body);
  if (path == "/health" && get) return get_health();
  if (path == "/models" && get) return get_models();
  if (path == "/schema" || path == "/score" || path == "/counterfactual" || path == "/health" || path == "/models") {
    return error_reply(405, "method not allowed");
  }
  return error_reply(404, "no such endpoint");
}

void FeedbackService::log_request(std::string_view method, std::string_view path, int status, double ms) const {
  if (config_.request_log.empty()) return;
  std::lock_guard lock(log_mutex_);
  std::ofstream out(config_.request_log, std::ios::app);
  out << method << ' ' << path << ' ' << status << ' ' << ms << '\n';
}

int FeedbackService::bind() {
  server_ = std::make_unique<httplib::Server>();
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    const auto start = std::chrono::steady_clock::now();
    const HttpReply reply = handle(req.method, req.path, req.body);
    res.status = reply.status;
    res.set_content(reply.body.dump(), "application/json");
    if (req.path == "/schema" && reply.status == 200) {
      res.set_header("ETag", "\"" + reply.body.at("schema_hash").get<std::string>() + "\"");
    }
    log_request(req.method, req.path, reply.status,
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
  };
  for (const char* path : {"/schema", "/score", "/counterfactual", "/health", "/models"}) {
    server_->Get(path, route);
    server_->Post(path, route);
  }
  const int port = config_.port == 0 ? server_->bind_to_any_port(config_.host)
                                     : (server_->bind_to_port(config_.host, config_.port) ? config_.port : -1);
  if (port < 0) throw Error("serve: cannot bind " + config_.host + ":" + std::to_string(config_.port));
  return port;
}

void FeedbackService::listen() {
  if (!server_) throw SpecError("serve: bind() first");
  server_->listen_after_bind();
}

void FeedbackService::stop() {
  if (server_) server_->stop();
}

}  // namespace recourse
