#include "recourse/numerics/mlp_io.hpp"

#include <string>

#include "recourse/error.hpp"

namespace recourse {

using nlohmann::json;

json mlp_to_json(const MlpParams& params) {
  json doc;
  doc["version"] = kMlpFormatVersion;
  doc["layer_sizes"] = params.spec.layer_sizes;
  json acts = json::array();
  for (Activation a : params.spec.activations) acts.push_back(std::string(to_string(a)));
  doc["activations"] = std::move(acts);
  json layers = json::array();
  for (const auto& layer : params.layers) {
    json rows = json::array();
    for (std::size_t r = 0; r < layer.weights.rows(); ++r) {
      const auto row = layer.weights.row(r);
      rows.push_back(json(Vector(row.begin(), row.end())));
    }
    layers.push_back({{"weights", std::move(rows)}, {"bias", layer.bias}});
  }
  doc["layers"] = std::move(layers);
  return doc;
}

namespace {

const json& field(const json& doc, const char* name, const std::string& path) {
  if (!doc.is_object() || !doc.contains(name)) {
    throw FormatError("model file: missing field '" + path + name + "'", path + name);
  }
  return doc.at(name);
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw FormatError("model file: '" + path + "' is not a number", path);
  return v.get<double>();
}

}  // namespace

MlpParams mlp_from_json(const json& doc) {
  const json& version = field(doc, "version", "");
  if (!version.is_number_integer() || version.get<int>() != kMlpFormatVersion) {
    throw FormatError("network: unsupported version", "version");
  }
  MlpSpec spec;
  try {
    spec.layer_sizes = field(doc, "layer_sizes", "").get<std::vector<std::size_t>>();
    for (const auto& a : field(doc, "activations", "")) {
      spec.activations.push_back(activation_from_string(a.get<std::string>()));
    }
    spec.validate();
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(std::string("network: bad spec: ") + e.what(), "layer_sizes");
  }
  MlpParams params = zeros_like(spec);
  const json& layers = field(doc, "layers", "");
  if (!layers.is_array() || layers.size() != spec.layer_count()) {
    throw FormatError("network: layer count does not match spec", "layers");
  }
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const std::string path = "layers[" + std::to_string(l) + "].";
    const json& rows = field(layers[l], "weights", path);
    const json& bias = field(layers[l], "bias", path);
    auto& dst = params.layers[l];
    if (!rows.is_array() || rows.size() != dst.weights.rows()) {
      throw FormatError("network: weight rows mismatch", path + "weights");
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!rows[r].is_array() || rows[r].size() != dst.weights.cols()) {
        throw FormatError("network: weight columns mismatch", path + "weights");
      }
      for (std::size_t c = 0; c < rows[r].size(); ++c) dst.weights(r, c) = number(rows[r][c], path + "weights");
    }
    if (!bias.is_array() || bias.size() != dst.bias.size()) {
      throw FormatError("network: bias length mismatch", path + "bias");
    }
    for (std::size_t o = 0; o < bias.size(); ++o) dst.bias[o] = number(bias[o], path + "bias");
  }
  if (!params.all_finite()) throw FormatError("network: non-finite parameter", "layers");
  return params;
}

}  // namespace recourse
