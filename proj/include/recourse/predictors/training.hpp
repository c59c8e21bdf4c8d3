#pragma once

#include <cstddef>
#include <cstdint>

namespace recourse {

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  std::uint64_t seed = 7;
  // Decoupled weight decay; keeps the classifier's scores away from 0 and 1.
  double weight_decay = 6.0;

  void validate() const;
};

struct TrainingInfo {
  std::uint64_t seed = 0;
  std::size_t epochs = 0;
  double train_accuracy = 0.0;  // classifier only
  double test_accuracy = 0.0;   // classifier only
  double final_loss = 0.0;      // mean loss of the last epoch
};

}  // namespace recourse
