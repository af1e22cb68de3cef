#pragma once

#include <cstdint>
#include <vector>

#include "distopt/trainer.hpp"

namespace distopt {

// One isotropic gaussian cluster per class.
struct ClusterSpec {
  std::vector<double> mean;
  double spread = 1.0;  // std-dev per dimension

  bool operator==(const ClusterSpec&) const = default;
};

struct SyntheticTask {
  std::vector<ClusterSpec> clusters;  // manifest class order
  int validation_per_class = 200;
  std::uint64_t seed = 0;
  double learning_rate = 0.5;
  int steps_per_epoch = 1;

  std::size_t dim() const { return clusters.empty() ? 0 : clusters.front().mean.size(); }

  // Throws DegenerateData for fewer than 2 validation samples per class and
  // ConfigInvalid for inconsistent dimensions or non-positive rates.
  void validate() const;

  bool operator==(const SyntheticTask&) const = default;
};

struct LabeledPoints {
  std::size_t dim = 0;
  std::vector<double> features;  // row-major, size() * dim
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
};

// Held-out set drawn once from the task seed; identical for every iteration.
LabeledPoints make_validation_set(const SyntheticTask& task);

// Feature vector of a training sample, a deterministic function of its
// locator, its class and the task seed.
std::vector<double> training_features(const SyntheticTask& task, const SampleRecord& sample);

// Trains a linear softmax classifier from zero weights by full-batch gradient
// descent and reports the per-class validation objective after each epoch.
// Objectives are floored at half a validation sample (0.5 / class count) so a
// class that is never predicted still yields a positive score.
TrainerResponse micro_train(const SyntheticTask& task, const LabeledPoints& validation, const SampledManifest& sample,
                            const TrainerRequest& request);

class MicroTrainer final : public Trainer {
 public:
  explicit MicroTrainer(SyntheticTask task);

  TrainerResponse train(const TrainerRequest& request, const SampledManifest& sample) override;

  const LabeledPoints& validation() const { return validation_; }

 private:
  SyntheticTask task_;
  LabeledPoints validation_;
};

}  // namespace distopt
