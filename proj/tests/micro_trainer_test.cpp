#include <doctest.h>

#include <cmath>

#include "distopt/micro_trainer.hpp"
#include "distopt/sampler.hpp"
#include "support.hpp"

using namespace distopt;

namespace {

TrainerRequest request_for(std::size_t n, int epochs, const std::string& objective = "accuracy") {
  TrainerRequest r;
  r.run_id = "m";
  r.epochs = epochs;
  r.window = default_window(epochs);
  r.objective = objective;
  for (std::size_t c = 0; c < n; ++c) r.class_table.push_back("c" + std::to_string(c));
  return r;
}

SampledManifest sample_of(const std::vector<std::size_t>& quotas) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < quotas.size(); ++c) names.push_back("c" + std::to_string(c));
  const auto m = synthetic_manifest(names, std::vector<std::size_t>(quotas.size(), 1000));
  return sample_subset(m, {quotas, 0}, 5);
}

}  // namespace

TEST_CASE("validation set is fixed by the seed") {
  SyntheticTask task{{{{0.0, 0.0}, 1.0}, {{3.0, 0.0}, 1.0}}, 50, 11};
  const auto a = make_validation_set(task);
  const auto b = make_validation_set(task);
  CHECK(a.features == b.features);
  CHECK(a.labels == b.labels);
  CHECK(a.size() == 100);
  task.seed = 12;
  CHECK(make_validation_set(task).features != a.features);
}

TEST_CASE("training features depend only on locator, class and seed") {
  SyntheticTask task{{{{0.0, 0.0}, 1.0}, {{3.0, 0.0}, 1.0}}, 50, 11};
  const SampleRecord r{"c1/0000003", 1, "c1"};
  CHECK(training_features(task, r) == training_features(task, r));
  CHECK(training_features(task, r) != training_features(task, {"c1/0000004", 1, "c1"}));
}

TEST_CASE("well separated clusters are learned") {
  // Means 8 apart with unit spread: Bayes error is far below 1%.
  const SyntheticTask task{{{{0.0, 0.0}, 1.0}, {{8.0, 0.0}, 1.0}}, 200, 4};
  MicroTrainer trainer(task);
  const auto r = trainer.train(request_for(2, 20), sample_of({10, 10}));
  for (std::size_t c = 0; c < 2; ++c) CHECK(r.matrix.at(c, 19) >= 0.95);
  CHECK_NOTHROW(validate_response(request_for(2, 20), r));
}

TEST_CASE("identical clusters sit at chance") {
  const SyntheticTask task{{{{0.0, 0.0}, 1.0}, {{0.0, 0.0}, 1.0}}, 500, 4};
  MicroTrainer trainer(task);
  const auto r = trainer.train(request_for(2, 10), sample_of({200, 200}));
  // Averaged over classes, per-class accuracy is exactly the overall accuracy.
  const double avg = (r.matrix.at(0, 9) + r.matrix.at(1, 9)) / 2.0;
  CHECK(avg == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("more data for a class raises its accuracy under overlap") {
  const SyntheticTask task{{{{0.0, 0.0}, 1.0}, {{1.0, 0.0}, 1.0}}, 500, 4};
  MicroTrainer trainer(task);
  const auto low = trainer.train(request_for(2, 30), sample_of({50, 300}));
  const auto high = trainer.train(request_for(2, 30), sample_of({300, 50}));
  CHECK(high.matrix.at(0, 29) > low.matrix.at(0, 29));
  CHECK(high.matrix.at(1, 29) < low.matrix.at(1, 29));
}

TEST_CASE("objectives are floored and deterministic") {
  const SyntheticTask task{{{{0.0}, 1.0}, {{0.5}, 1.0}, {{1.0}, 1.0}}, 40, 2};
  MicroTrainer trainer(task);
  const auto s = sample_of({1, 1, 200});
  for (const char* obj : {"accuracy", "precision", "recall"}) {
    const auto r = trainer.train(request_for(3, 5, obj), s);
    CHECK(r == trainer.train(request_for(3, 5, obj), s));
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < 5; ++i) CHECK(r.matrix.at(c, i) >= 0.5 / 40.0);
  }
}

TEST_CASE("task validation") {
  SyntheticTask task{{{{0.0, 0.0}, 1.0}, {{1.0}, 1.0}}, 50, 1};
  CHECK_ERROR_CODE(task.validate(), ErrorCode::kConfigInvalid);
  task.clusters[1].mean = {1.0, 1.0};
  task.validation_per_class = 1;
  CHECK_ERROR_CODE(task.validate(), ErrorCode::kDegenerateData);
  task.validation_per_class = 2;
  task.clusters[0].spread = 0.0;
  CHECK_ERROR_CODE(task.validate(), ErrorCode::kConfigInvalid);
}
