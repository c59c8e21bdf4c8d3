#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "recourse/numerics/matrix.hpp"

namespace recourse {

enum class FeatureKind { continuous, integer, multiple_of };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::continuous;
  double step = 0.0;  // grid spacing, multiple_of only
  bool is_mutable = false;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double mean = 0.0;  // normalization stats
  double std = 1.0;

  // True when `value` is an exact integer / exact step multiple for discrete kinds.
  bool satisfies_kind(double value) const;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

// Raw units, one value per schema feature.
struct RawProfile {
  Vector values;
  friend bool operator==(const RawProfile&, const RawProfile&) = default;
};

// z-scored with the schema's fitted stats.
struct NormalizedProfile {
  Vector values;
  friend bool operator==(const NormalizedProfile&, const NormalizedProfile&) = default;
};

class ProfileSchema {
 public:
  ProfileSchema() = default;
  // Validates names (unique, non-empty), bounds and grid alignment; throws SchemaError.
  explicit ProfileSchema(std::vector<FeatureSpec> features, bool fitted = false);

  std::size_t size() const noexcept { return features_.size(); }
  const std::vector<FeatureSpec>& features() const noexcept { return features_; }
  const FeatureSpec& feature(std::size_t i) const { return features_.at(i); }
  bool fitted() const noexcept { return fitted_; }

  // Throws SchemaError naming `name` when absent.
  std::size_t index_of(std::string_view name) const;
  bool contains(std::string_view name) const;

  std::size_t mutable_count() const noexcept { return mutable_count_; }
  std::size_t immutable_count() const noexcept { return size() - mutable_count_; }
  // 1.0 for mutable coordinates, 0.0 for immutable ones.
  std::span<const double> mutable_mask() const noexcept { return mask_; }

  // Copy with mean/std fitted column-wise on `raw` (population std; constant
  // columns get std 1 so the stats stay usable).
  ProfileSchema fitted_on(const Matrix& raw) const;

  NormalizedProfile normalize(const RawProfile& raw) const;
  RawProfile denormalize(const NormalizedProfile& norm) const;
  void normalize_into(std::span<const double> raw, std::span<double> out) const;
  void denormalize_into(std::span<const double> norm, std::span<double> out) const;
  Matrix normalize_rows(const Matrix& raw) const;

  nlohmann::json to_json() const;
  static ProfileSchema from_json(const nlohmann::json& doc);

  // FNV-1a over the canonical JSON, hex encoded.
  std::string hash() const;

  friend bool operator==(const ProfileSchema& a, const ProfileSchema& b) {
    return a.features_ == b.features_ && a.fitted_ == b.fitted_;
  }

 private:
  void require_fitted() const;

  std::vector<FeatureSpec> features_;
  std::unordered_map<std::string, std::size_t> index_;
  Vector mask_;
  std::size_t mutable_count_ = 0;
  bool fitted_ = false;
};

inline constexpr int kSchemaFormatVersion = 1;

// 33 features: the six editable profile fields followed by 27 immutable
// stand-ins (7 binary flags, 10 counts, 10 marketplace indices).
ProfileSchema default_schema();

NormalizedProfile normalize(const RawProfile& raw, const ProfileSchema& schema);
RawProfile denormalize(const NormalizedProfile& norm, const ProfileSchema& schema);

// Zeroes immutable coordinates of a normalized-space residual.
Vector apply_immutable_mask(std::span<const double> residual, const ProfileSchema& schema);
void apply_immutable_mask_inplace(std::span<double> residual, const ProfileSchema& schema);

// Integer features to the nearest integer, multiple_of features to the
// nearest grid point; halves round away from zero.
RawProfile apply_discrete_rounding(const RawProfile& raw, const ProfileSchema& schema);

RawProfile clamp_bounds(const RawProfile& raw, const ProfileSchema& schema);

// Kind or bound violations as human-readable messages; empty when valid.
std::vector<std::string> profile_violations(const RawProfile& raw, const ProfileSchema& schema);

}  // namespace recourse
