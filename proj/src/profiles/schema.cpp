#include "recourse/profiles/schema.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "recourse/error.hpp"
#include "recourse/util/files.hpp"

namespace recourse {

using nlohmann::json;

namespace {

double round_to_step(double v, double step) { return std::round(v / step) * step; }

std::string_view kind_name(FeatureKind k) {
  switch (k) {
    case FeatureKind::continuous: return "continuous";
    case FeatureKind::integer: return "integer";
    case FeatureKind::multiple_of: return "multiple_of";
  }
  return "continuous";
}

}  // namespace

bool FeatureSpec::satisfies_kind(double value) const {
  switch (kind) {
    case FeatureKind::continuous: return std::isfinite(value);
    case FeatureKind::integer: return std::isfinite(value) && value == std::round(value);
    case FeatureKind::multiple_of: return std::isfinite(value) && value == round_to_step(value, step);
  }
  return false;
}

ProfileSchema::ProfileSchema(std::vector<FeatureSpec> features, bool fitted)
    : features_(std::move(features)), fitted_(fitted) {
  if (features_.empty()) throw SchemaError("schema has no features");
  mask_.reserve(features_.size());
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const auto& f = features_[i];
    if (f.name.empty()) throw SchemaError("schema: empty feature name");
    if (!index_.emplace(f.name, i).second) throw SchemaError("schema: duplicate feature '" + f.name + "'", f.name);
    if (!(f.lower_bound <= f.upper_bound)) throw SchemaError("schema: bad bounds for '" + f.name + "'", f.name);
    if (f.kind == FeatureKind::multiple_of) {
      if (!(f.step > 0.0)) throw SchemaError("schema: non-positive step for '" + f.name + "'", f.name);
      const double cells = (f.upper_bound - f.lower_bound) / f.step;
      if (std::abs(cells - std::round(cells)) > 1e-9 ||
          std::abs(f.lower_bound / f.step - std::round(f.lower_bound / f.step)) > 1e-9) {
        throw SchemaError("schema: bounds of '" + f.name + "' are not on its grid", f.name);
      }
    }
    if (fitted_ && !(f.std > 0.0)) throw SchemaError("schema: non-positive std for '" + f.name + "'", f.name);
    mask_.push_back(f.is_mutable ? 1.0 : 0.0);
    if (f.is_mutable) ++mutable_count_;
  }
}

std::size_t ProfileSchema::index_of(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) throw SchemaError("unknown feature '" + std::string(name) + "'", std::string(name));
  return it->second;
}

bool ProfileSchema::contains(std::string_view name) const { return index_.count(std::string(name)) > 0; }

ProfileSchema ProfileSchema::fitted_on(const Matrix& raw) const {
  if (raw.cols() != size() || raw.rows() == 0) throw SpecError("fit: raw matrix shape does not match schema");
  auto features = features_;
  const double n = static_cast<double>(raw.rows());
  for (std::size_t j = 0; j < size(); ++j) {
    double sum = 0.0;
    for (std::size_t r = 0; r < raw.rows(); ++r) sum += raw(r, j);
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t r = 0; r < raw.rows(); ++r) {
      const double d = raw(r, j) - mean;
      ss += d * d;
    }
    const double std = std::sqrt(ss / n);
    features[j].mean = mean;
    features[j].std = std > 1e-12 ? std : 1.0;
  }
  return ProfileSchema(std::move(features), true);
}

void ProfileSchema::require_fitted() const {
  if (!fitted_) throw SpecError("schema normalization stats are not fitted");
}

void ProfileSchema::normalize_into(std::span<const double> raw, std::span<double> out) const {
  require_fitted();
  if (raw.size() != size() || out.size() != size()) throw SpecError("normalize: width mismatch");
  for (std::size_t j = 0; j < size(); ++j) out[j] = (raw[j] - features_[j].mean) / features_[j].std;
}

void ProfileSchema::denormalize_into(std::span<const double> norm, std::span<double> out) const {
  require_fitted();
  if (norm.size() != size() || out.size() != size()) throw SpecError("denormalize: width mismatch");
  for (std::size_t j = 0; j < size(); ++j) out[j] = norm[j] * features_[j].std + features_[j].mean;
}

NormalizedProfile ProfileSchema::normalize(const RawProfile& raw) const {
  NormalizedProfile out{Vector(size())};
  normalize_into(raw.values, out.values);
  return out;
}

RawProfile ProfileSchema::denormalize(const NormalizedProfile& norm) const {
  RawProfile out{Vector(size())};
  denormalize_into(norm.values, out.values);
  return out;
}

Matrix ProfileSchema::normalize_rows(const Matrix& raw) const {
  Matrix out(raw.rows(), raw.cols());
  for (std::size_t r = 0; r < raw.rows(); ++r) normalize_into(raw.row(r), out.row(r));
  return out;
}

json ProfileSchema::to_json() const {
  json features = json::array();
  for (const auto& f : features_) {
    json kind = f.kind == FeatureKind::multiple_of ? json{{"multiple_of", f.step}} : json(kind_name(f.kind));
    features.push_back({{"name", f.name},
                        {"kind", std::move(kind)},
                        {"mutable", f.is_mutable},
                        {"lower_bound", f.lower_bound},
                        {"upper_bound", f.upper_bound},
                        {"mean", f.mean},
                        {"std", f.std}});
  }
  return {{"version", kSchemaFormatVersion}, {"fitted", fitted_}, {"features", std::move(features)}};
}

ProfileSchema ProfileSchema::from_json(const json& doc) {
  auto need = [](const json& obj, const char* key, const std::string& where) -> const json& {
    if (!obj.is_object() || !obj.contains(key)) {
      throw FormatError("schema: missing field '" + where + key + "'", where + key);
    }
    return obj.at(key);
  };
  const json& version = need(doc, "version", "schema.");
  if (!version.is_number_integer() || version.get<int>() != kSchemaFormatVersion) {
    throw FormatError("schema: unsupported version", "version");
  }
  std::vector<FeatureSpec> features;
  try {
    for (const auto& f : need(doc, "features", "schema.")) {
      FeatureSpec spec;
      spec.name = need(f, "name", "schema.features.").get<std::string>();
      const json& kind = need(f, "kind", "schema.features.");
      if (kind.is_object()) {
        spec.kind = FeatureKind::multiple_of;
        spec.step = need(kind, "multiple_of", "schema.features.kind.").get<double>();
      } else if (kind == "continuous") {
        spec.kind = FeatureKind::continuous;
      } else if (kind == "integer") {
        spec.kind = FeatureKind::integer;
      } else {
        throw FormatError("schema: unknown kind for '" + spec.name + "'", "kind");
      }
      spec.is_mutable = need(f, "mutable", "schema.features.").get<bool>();
      spec.lower_bound = need(f, "lower_bound", "schema.features.").get<double>();
      spec.upper_bound = need(f, "upper_bound", "schema.features.").get<double>();
      spec.mean = need(f, "mean", "schema.features.").get<double>();
      spec.std = need(f, "std", "schema.features.").get<double>();
      features.push_back(std::move(spec));
    }
    return ProfileSchema(std::move(features), need(doc, "fitted", "schema.").get<bool>());
  } catch (const json::exception& e) {
    throw FormatError(std::string("schema: ") + e.what(), "features");
  }
}

std::string ProfileSchema::hash() const {
  return fnv1a_hex(to_json().dump());
}

ProfileSchema default_schema() {
  std::vector<FeatureSpec> f;
  auto add = [&f](std::string name, FeatureKind kind, double step, bool is_mutable, double lo, double hi) {
    f.push_back(FeatureSpec{std::move(name), kind, step, is_mutable, lo, hi, 0.0, 1.0});
  };
  using K = FeatureKind;
  add("expected_salary", K::multiple_of, 5000.0, true, 60000.0, 300000.0);
  add("headline_word_count", K::integer, 0.0, true, 0.0, 30.0);
  add("experience_relevance_score", K::continuous, 0.0, true, 0.0, 3.0);
  add("work_experience_avg_word_count", K::continuous, 0.0, true, 0.0, 200.0);
  add("verified_years_of_experience", K::continuous, 0.0, true, 0.0, 45.0);
  add("skills_popularity_score", K::continuous, 0.0, true, 0.0, 3.0);
  for (const char* name : {"has_phd", "has_masters", "has_bachelors", "cs_degree", "bootcamp_graduate",
                           "work_authorized", "open_to_remote"}) {
    add(name, K::integer, 0.0, false, 0.0, 1.0);
  }
  for (const char* name : {"skills_listed_count", "past_roles_count", "projects_count", "certifications_count",
                           "languages_count", "profile_views_count", "recruiter_saves_count",
                           "prior_applications_count", "portfolio_links_count", "endorsements_count"}) {
    add(name, K::integer, 0.0, false, 0.0, 50.0);
  }
  for (const char* name : {"market_demand_index", "role_demand_index", "location_demand_index",
                           "seasonality_index", "competition_index", "salary_band_position",
                           "applicant_pool_index", "submission_hour_index", "referral_strength",
                           "company_interest_index"}) {
    add(name, K::continuous, 0.0, false, -3.0, 3.0);
  }
  return ProfileSchema(std::move(f));
}

NormalizedProfile normalize(const RawProfile& raw, const ProfileSchema& schema) { return schema.normalize(raw); }

RawProfile denormalize(const NormalizedProfile& norm, const ProfileSchema& schema) {
  return schema.denormalize(norm);
}

void apply_immutable_mask_inplace(std::span<double> residual, const ProfileSchema& schema) {
  if (residual.size() != schema.size()) throw SpecError("apply_immutable_mask: width mismatch");
  const auto mask = schema.mutable_mask();
  for (std::size_t j = 0; j < residual.size(); ++j) {
    if (mask[j] == 0.0) residual[j] = 0.0;
  }
}

Vector apply_immutable_mask(std::span<const double> residual, const ProfileSchema& schema) {
  Vector out(residual.begin(), residual.end());
  apply_immutable_mask_inplace(out, schema);
  return out;
}

RawProfile apply_discrete_rounding(const RawProfile& raw, const ProfileSchema& schema) {
  if (raw.values.size() != schema.size()) throw SpecError("apply_discrete_rounding: width mismatch");
  RawProfile out = raw;
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const auto& f = schema.feature(j);
    if (f.kind == FeatureKind::integer) {
      out.values[j] = std::round(out.values[j]);
    } else if (f.kind == FeatureKind::multiple_of) {
      out.values[j] = round_to_step(out.values[j], f.step);
    }
  }
  return out;
}

RawProfile clamp_bounds(const RawProfile& raw, const ProfileSchema& schema) {
  if (raw.values.size() != schema.size()) throw SpecError("clamp_bounds: width mismatch");
  RawProfile out = raw;
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const auto& f = schema.feature(j);
    out.values[j] = std::clamp(out.values[j], f.lower_bound, f.upper_bound);
  }
  return out;
}

std::vector<std::string> profile_violations(const RawProfile& raw, const ProfileSchema& schema) {
  std::vector<std::string> out;
  if (raw.values.size() != schema.size()) {
    out.push_back("profile has " + std::to_string(raw.values.size()) + " values, schema has " +
                  std::to_string(schema.size()));
    return out;
  }
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const auto& f = schema.feature(j);
    const double v = raw.values[j];
    if (!(v >= f.lower_bound && v <= f.upper_bound)) {
      out.push_back(f.name + " out of bounds");
    } else if (!f.satisfies_kind(v)) {
      out.push_back(f.name + " violates its kind");
    }
  }
  return out;
}

}  // namespace recourse
