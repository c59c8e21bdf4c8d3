#pragma once

#include <nlohmann/json.hpp>

#include "recourse/numerics/mlp.hpp"

namespace recourse {

inline constexpr int kMlpFormatVersion = 1;

// {"version":1, "layer_sizes":[...], "activations":[...],
//  "layers":[{"weights":[[row-major rows]], "bias":[...]}]}
nlohmann::json mlp_to_json(const MlpParams& params);

// Throws FormatError naming the offending field.
MlpParams mlp_from_json(const nlohmann::json& doc);

}  // namespace recourse
