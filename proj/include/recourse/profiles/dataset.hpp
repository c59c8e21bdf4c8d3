#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "recourse/numerics/rand.hpp"
#include "recourse/profiles/schema.hpp"

namespace recourse {

struct Dataset {
  std::shared_ptr<const ProfileSchema> schema;  // fitted
  Matrix raw;                                   // raw units, kept for reporting
  Matrix rows;                                  // normalized with schema stats
  std::vector<int> labels;                      // 0/1
  std::vector<std::size_t> ids;                 // stable row identity

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t width() const noexcept { return raw.cols(); }
  RawProfile raw_profile(std::size_t i) const;
  NormalizedProfile normalized(std::size_t i) const;
  double positive_rate() const;

  // Rows at `indices`, normalized with `stats` (defaults to this dataset's schema).
  Dataset subset(std::span<const std::size_t> indices,
                 std::shared_ptr<const ProfileSchema> stats = nullptr) const;
};

// Builds a dataset whose normalization stats are fitted on all of `raw`.
// Throws SpecError for mismatched counts or non-binary labels.
Dataset make_dataset(const ProfileSchema& schema, Matrix raw, std::vector<int> labels);

// Uniform random partition; stats are refitted on the train part and applied
// to both. Train size is round(train_fraction * n).
std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction, Rand& rng);

}  // namespace recourse
