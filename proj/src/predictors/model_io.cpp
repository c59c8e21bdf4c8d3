#include "recourse/predictors/model_io.hpp"

#include "recourse/error.hpp"
#include "recourse/numerics/mlp_io.hpp"
#include "recourse/util/files.hpp"

namespace recourse {

using nlohmann::json;

json model_envelope(const std::string& role, const ProfileSchema& schema, std::uint64_t seed, json metrics) {
  return json{{"format", kModelFormatName},
              {"version", kModelFormatVersion},
              {"role", role},
              {"schema", schema.to_json()},
              {"schema_hash", schema.hash()},
              {"seed", seed},
              {"metrics", std::move(metrics)}};
}

namespace {
const json& need(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw FormatError(std::string("model file: missing '") + key + "'", key);
  return doc.at(key);
}

std::uint64_t read_seed(const json& doc) {
  const json& seed = need(doc, "seed");
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) throw FormatError("model file: bad seed", "seed");
  return seed.get<std::uint64_t>();
}

double metric(const json& metrics, const char* key) {
  return metrics.contains(key) && metrics.at(key).is_number() ? metrics.at(key).get<double>() : 0.0;
}

TrainingInfo read_info(const json& doc) {
  const json& m = need(doc, "metrics");
  TrainingInfo info;
  info.seed = read_seed(doc);
  info.epochs = static_cast<std::size_t>(metric(m, "epochs"));
  info.train_accuracy = metric(m, "train_accuracy");
  info.test_accuracy = metric(m, "test_accuracy");
  info.final_loss = metric(m, "final_loss");
  return info;
}

json info_json(const TrainingInfo& info) {
  return json{{"epochs", info.epochs},
              {"train_accuracy", info.train_accuracy},
              {"test_accuracy", info.test_accuracy},
              {"final_loss", info.final_loss}};
}
}  // namespace

ProfileSchema read_envelope(const json& doc, const std::string& expected_role) {
  if (!doc.is_object()) throw FormatError("model file: not a JSON object", "document");
  const json& format = need(doc, "format");
  if (format != kModelFormatName) throw FormatError("model file: unknown format", "format");
  const json& version = need(doc, "version");
  if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion) {
    throw FormatError("model file: unsupported version", "version");
  }
  const json& role = need(doc, "role");
  if (role != expected_role) throw FormatError("model file: expected role '" + expected_role + "'", "role");
  ProfileSchema schema = ProfileSchema::from_json(need(doc, "schema"));
  if (need(doc, "schema_hash") != schema.hash()) throw FormatError("model file: schema hash mismatch", "schema_hash");
  return schema;
}

json parse_model_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("model file: invalid JSON: ") + e.what(), "document");
  }
}

json classifier_to_json(const ClassifierModel& model) {
  json doc = model_envelope("classifier", *model.schema, model.info.seed, info_json(model.info));
  doc["network"] = mlp_to_json(model.net);
  return doc;
}

ClassifierModel classifier_from_json(const json& doc) {
  ClassifierModel model;
  model.schema = std::make_shared<const ProfileSchema>(read_envelope(doc, "classifier"));
  model.info = read_info(doc);
  model.net = mlp_from_json(need(doc, "network"));
  if (model.net.spec.input_width() != model.schema->size() || model.net.spec.output_width() != 1) {
    throw FormatError("classifier: network shape does not match schema", "network");
  }
  return model;
}

json autoencoder_to_json(const AutoencoderModel& model) {
  json metrics = info_json(model.info);
  metrics["noise_std"] = model.noise_std;
  json doc = model_envelope("autoencoder", *model.schema, model.info.seed, std::move(metrics));
  doc["encoder"] = mlp_to_json(model.encoder);
  doc["decoder"] = mlp_to_json(model.decoder);
  if (model.prototypes) {
    const auto& p = *model.prototypes;
    json rows = json::array();
    for (std::size_t r = 0; r < p.encodings.rows(); ++r) {
      const auto row = p.encodings.row(r);
      rows.push_back(json(Vector(row.begin(), row.end())));
    }
    doc["prototypes"] = {{"target_class", p.target_class}, {"k", p.k}, {"encodings", std::move(rows)}};
  }
  return doc;
}

AutoencoderModel autoencoder_from_json(const json& doc) {
  AutoencoderModel ae;
  ae.schema = std::make_shared<const ProfileSchema>(read_envelope(doc, "autoencoder"));
  ae.info = read_info(doc);
  ae.noise_std = metric(need(doc, "metrics"), "noise_std");
  ae.encoder = mlp_from_json(need(doc, "encoder"));
  ae.decoder = mlp_from_json(need(doc, "decoder"));
  if (ae.encoder.spec.input_width() != ae.schema->size() || ae.decoder.spec.output_width() != ae.schema->size() ||
      ae.encoder.spec.output_width() != ae.decoder.spec.input_width()) {
    throw FormatError("autoencoder: network shapes do not match", "encoder");
  }
  if (doc.contains("prototypes")) {
    const json& p = doc.at("prototypes");
    try {
      PrototypeSet set;
      set.target_class = p.at("target_class").get<int>();
      set.k = p.at("k").get<std::size_t>();
      const json& rows = p.at("encodings");
      set.encodings = Matrix(rows.size(), ae.latent_width());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != ae.latent_width()) throw FormatError("prototype width mismatch", "prototypes");
        for (std::size_t c = 0; c < rows[r].size(); ++c) set.encodings(r, c) = rows[r][c].get<double>();
      }
      ae.prototypes = std::move(set);
    } catch (const json::exception& e) {
      throw FormatError(std::string("autoencoder: bad prototypes: ") + e.what(), "prototypes");
    }
  }
  return ae;
}

void save_model(const ClassifierModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, classifier_to_json(model).dump(1));
}

void save_model(const AutoencoderModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, autoencoder_to_json(model).dump(1));
}

ClassifierModel load_classifier(const std::filesystem::path& path) {
  return classifier_from_json(parse_model_text(read_file(path)));
}

AutoencoderModel load_autoencoder(const std::filesystem::path& path) {
  return autoencoder_from_json(parse_model_text(read_file(path)));
}

}  // namespace recourse
