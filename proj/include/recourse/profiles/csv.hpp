#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "recourse/profiles/dataset.hpp"

namespace recourse {

// Header: feature names in schema order, then "label". Raw units, shortest
// round-trip decimals.
std::string dataset_to_csv(const Dataset& data);
void save_csv(const Dataset& data, const std::filesystem::path& path);

// Header must list the schema's features in order followed by "label".
// Stats are fitted on all loaded rows.
Dataset dataset_from_csv(std::string_view text, const ProfileSchema& schema);
Dataset load_csv(const std::filesystem::path& path, const ProfileSchema& schema = default_schema());

// Flat object keyed by feature name; an optional "label" key is ignored.
RawProfile profile_from_json(const nlohmann::json& obj, const ProfileSchema& schema);
RawProfile parse_profile_json(std::string_view text, const ProfileSchema& schema);
nlohmann::json profile_to_json(const RawProfile& raw, const ProfileSchema& schema);

}  // namespace recourse
