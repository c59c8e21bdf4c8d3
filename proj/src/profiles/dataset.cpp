#include "recourse/profiles/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "recourse/error.hpp"

namespace recourse {

RawProfile Dataset::raw_profile(std::size_t i) const {
  const auto r = raw.row(i);
  return RawProfile{Vector(r.begin(), r.end())};
}

NormalizedProfile Dataset::normalized(std::size_t i) const {
  const auto r = rows.row(i);
  return NormalizedProfile{Vector(r.begin(), r.end())};
}

double Dataset::positive_rate() const {
  if (labels.empty()) return 0.0;
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  return static_cast<double>(positives) / static_cast<double>(labels.size());
}

Dataset Dataset::subset(std::span<const std::size_t> indices, std::shared_ptr<const ProfileSchema> stats) const {
  Dataset out;
  out.schema = stats ? std::move(stats) : schema;
  out.raw = Matrix(indices.size(), width());
  out.labels.reserve(indices.size());
  out.ids.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const std::size_t i = indices[k];
    if (i >= size()) throw SpecError("subset: row index out of range");
    std::copy_n(raw.row(i).begin(), width(), out.raw.row(k).begin());
    out.labels.push_back(labels[i]);
    out.ids.push_back(ids[i]);
  }
  out.rows = out.schema->normalize_rows(out.raw);
  return out;
}

Dataset make_dataset(const ProfileSchema& schema, Matrix raw, std::vector<int> labels) {
  if (raw.rows() != labels.size()) throw SpecError("dataset: row count != label count");
  if (raw.cols() != schema.size()) throw SchemaError("dataset: width does not match schema");
  if (raw.rows() == 0) throw SpecError("dataset: no rows");
  for (int y : labels) {
    if (y != 0 && y != 1) throw SpecError("dataset: labels must be 0 or 1");
  }
  Dataset d;
  d.schema = std::make_shared<const ProfileSchema>(schema.fitted_on(raw));
  d.rows = d.schema->normalize_rows(raw);
  d.raw = std::move(raw);
  d.labels = std::move(labels);
  d.ids.resize(d.labels.size());
  std::iota(d.ids.begin(), d.ids.end(), std::size_t{0});
  return d;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction, Rand& rng) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw SpecError("split: train_fraction must lie in (0, 1)");
  }
  const std::size_t n = data.size();
  const auto n_train = static_cast<std::size_t>(std::round(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n) throw SpecError("split: a partition would be empty");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test_idx(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  Matrix train_raw(train_idx.size(), data.width());
  for (std::size_t k = 0; k < train_idx.size(); ++k) {
    std::copy_n(data.raw.row(train_idx[k]).begin(), data.width(), train_raw.row(k).begin());
  }
  auto stats = std::make_shared<const ProfileSchema>(data.schema->fitted_on(train_raw));
  return {data.subset(train_idx, stats), data.subset(test_idx, stats)};
}

}  // namespace recourse
