#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "recourse/predictors/autoencoder.hpp"
#include "recourse/predictors/classifier.hpp"

namespace recourse {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kModelFormatName = "recourse-model";

// Shared envelope: format, version, role, schema, schema_hash, seed, metrics.
nlohmann::json model_envelope(const std::string& role, const ProfileSchema& schema, std::uint64_t seed,
                              nlohmann::json metrics);

// Checks format/version/role and the schema hash; returns the schema.
// Throws FormatError naming the bad field.
ProfileSchema read_envelope(const nlohmann::json& doc, const std::string& expected_role);

// Parses JSON text, mapping syntax errors (e.g. truncation) to FormatError.
nlohmann::json parse_model_text(const std::string& text);

nlohmann::json classifier_to_json(const ClassifierModel& model);
ClassifierModel classifier_from_json(const nlohmann::json& doc);
nlohmann::json autoencoder_to_json(const AutoencoderModel& model);
AutoencoderModel autoencoder_from_json(const nlohmann::json& doc);

void save_model(const ClassifierModel& model, const std::filesystem::path& path);
void save_model(const AutoencoderModel& model, const std::filesystem::path& path);
ClassifierModel load_classifier(const std::filesystem::path& path);
AutoencoderModel load_autoencoder(const std::filesystem::path& path);

}  // namespace recourse
