#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recourse/predictors/classifier.hpp"
#include "recourse/profiles/schema.hpp"

namespace recourse {

enum class Method { rgd, csgp, countergan };

inline constexpr Method kAllMethods[] = {Method::rgd, Method::csgp, Method::countergan};

std::string_view method_name(Method m);   // "rgd", "csgp", "countergan"
std::string_view method_label(Method m);  // "RGD", "CSGP", "CounteRGAN"
// Throws SpecError for an unknown name.
Method method_from_string(std::string_view name);

struct CfResult {
  RawProfile raw;                // finalized counterfactual, raw units
  NormalizedProfile normalized;  // same, model space
  Vector residual;               // normalized - normalize(input)
  double score_before = 0.0;
  double score_after = 0.0;
  std::size_t iterations = 0;
  std::chrono::nanoseconds elapsed{0};
  Method method = Method::countergan;
  Vector loss_trace;  // prediction loss per accepted step (RGD)
};

struct DiffEntry {
  std::string feature;
  double old_value = 0.0;
  double delta = 0.0;
  double new_value = 0.0;
};

// Per-feature edits that turn the input into the counterfactual.
struct FeedbackDiff {
  std::vector<DiffEntry> changes;
  double score_before = 0.0;
  double score_after = 0.0;
};

// Turns a model-space candidate into a deliverable counterfactual:
// denormalize, restore immutable coordinates from `input`, round discrete
// features, optionally clamp to bounds, then re-normalize and score.
// Mutable values are nudged (by at most an ulp) so that
// input + (value - input) reproduces the value exactly.
// Throws NumericError for a non-finite candidate.
CfResult finalize(const RawProfile& input, std::span<const double> candidate, const ProfileSchema& schema,
                  const ClassifierModel& classifier, bool enforce_bounds);

FeedbackDiff make_diff(const RawProfile& input, const CfResult& result, const ProfileSchema& schema);

}  // namespace recourse
