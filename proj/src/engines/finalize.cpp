#include "recourse/engines/result.hpp"

#include <cmath>

#include "recourse/error.hpp"

namespace recourse {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::rgd: return "rgd";
    case Method::csgp: return "csgp";
    case Method::countergan: return "countergan";
  }
  return "countergan";
}

std::string_view method_label(Method m) {
  switch (m) {
    case Method::rgd: return "RGD";
    case Method::csgp: return "CSGP";
    case Method::countergan: return "CounteRGAN";
  }
  return "CounteRGAN";
}

Method method_from_string(std::string_view name) {
  for (Method m : kAllMethods) {
    if (name == method_name(m)) return m;
  }
  throw SpecError("unknown method '" + std::string(name) + "'");
}

namespace {

// Smallest nudge of `value` for which old + (value - old) == value.
double diff_exact(double old_value, double value) {
  for (int round = 0; round < 8; ++round) {
    const double delta = value - old_value;
    const double rebuilt = old_value + delta;
    if (rebuilt == value) return value;
    value = rebuilt;
  }
  throw NumericError("finalize: cannot represent edit exactly");
}

}  // namespace

CfResult finalize(const RawProfile& input, std::span<const double> candidate, const ProfileSchema& schema,
                  const ClassifierModel& classifier, bool enforce_bounds) {
  const std::size_t width = schema.size();
  if (input.values.size() != width || candidate.size() != width) throw SpecError("finalize: width mismatch");
  if (!all_finite(candidate)) throw NumericError("finalize: non-finite candidate");

  RawProfile raw{Vector(width)};
  schema.denormalize_into(candidate, raw.values);
  const auto mask = schema.mutable_mask();
  for (std::size_t j = 0; j < width; ++j) {
    const double old_value = input.values[j];
    if (mask[j] == 0.0) {
      raw.values[j] = old_value;
    } else if (std::abs(raw.values[j] - old_value) <= 1e-9 * std::max(1.0, std::abs(old_value))) {
      raw.values[j] = old_value;  // normalization round-off, not an edit
    }
  }
  raw = apply_discrete_rounding(raw, schema);
  if (enforce_bounds) raw = clamp_bounds(raw, schema);
  for (std::size_t j = 0; j < width; ++j) {
    if (mask[j] == 0.0) {
      raw.values[j] = input.values[j];
    } else if (raw.values[j] != input.values[j]) {
      raw.values[j] = diff_exact(input.values[j], raw.values[j]);
    }
  }

  CfResult out;
  out.normalized = schema.normalize(raw);
  const NormalizedProfile x = schema.normalize(input);
  out.residual.resize(width);
  for (std::size_t j = 0; j < width; ++j) out.residual[j] = out.normalized.values[j] - x.values[j];
  out.score_before = predict(classifier, x);
  out.score_after = predict(classifier, out.normalized);
  out.raw = std::move(raw);
  return out;
}

FeedbackDiff make_diff(const RawProfile& input, const CfResult& result, const ProfileSchema& schema) {
  if (input.values.size() != schema.size() || result.raw.values.size() != schema.size()) {
    throw SpecError("make_diff: width mismatch");
  }
  FeedbackDiff diff{{}, result.score_before, result.score_after};
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const double old_value = input.values[j];
    const double new_value = result.raw.values[j];
    if (new_value == old_value) continue;
    const auto& f = schema.feature(j);
    if (!f.is_mutable) throw SpecError("make_diff: immutable feature '" + f.name + "' changed");
    diff.changes.push_back(DiffEntry{f.name, old_value, new_value - old_value, new_value});
  }
  return diff;
}

}  // namespace recourse
