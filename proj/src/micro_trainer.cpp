#include "distopt/micro_trainer.hpp"

#include <algorithm>
#include <cmath>

#include "distopt/error.hpp"
#include "distopt/random.hpp"

namespace distopt {

void SyntheticTask::validate() const {
  if (clusters.size() < 2) throw Error(ErrorCode::kConfigInvalid, "synthetic task needs at least two classes");
  const std::size_t d = dim();
  if (d == 0) throw Error(ErrorCode::kConfigInvalid, "cluster means must be non-empty");
  for (const auto& k : clusters) {
    if (k.mean.size() != d) throw Error(ErrorCode::kConfigInvalid, "cluster means differ in dimension");
    if (!(k.spread > 0.0)) throw Error(ErrorCode::kConfigInvalid, "cluster spread must be positive");
  }
  if (validation_per_class < 2) {
    throw Error(ErrorCode::kDegenerateData, "each class needs at least 2 validation samples");
  }
  if (!(learning_rate > 0.0) || steps_per_epoch < 1) {
    throw Error(ErrorCode::kConfigInvalid, "learning rate and steps per epoch must be positive");
  }
}

namespace {

void draw_point(const ClusterSpec& cluster, Rng& rng, std::vector<double>& out) {
  for (std::size_t k = 0; k < cluster.mean.size(); ++k) out.push_back(cluster.mean[k] + cluster.spread * rng.normal());
}

constexpr std::uint64_t kValidationSalt = 0x76616c6964617465ULL;  // "validate"

}  // namespace

LabeledPoints make_validation_set(const SyntheticTask& task) {
  task.validate();
  LabeledPoints v;
  v.dim = task.dim();
  for (std::size_t c = 0; c < task.clusters.size(); ++c) {
    Rng rng(mix_seed(task.seed ^ kValidationSalt, 0, c));
    for (int i = 0; i < task.validation_per_class; ++i) {
      draw_point(task.clusters[c], rng, v.features);
      v.labels.push_back(static_cast<int>(c));
    }
  }
  return v;
}

std::vector<double> training_features(const SyntheticTask& task, const SampleRecord& sample) {
  const auto& cluster = task.clusters.at(static_cast<std::size_t>(sample.class_id));
  Rng rng(splitmix64(hash_string(sample.locator) ^ task.seed));
  std::vector<double> x;
  x.reserve(cluster.mean.size());
  draw_point(cluster, rng, x);
  return x;
}

namespace {

// Linear softmax model; weights row-major (class, feature) with a trailing
// bias column.
class SoftmaxModel {
 public:
  SoftmaxModel(std::size_t classes, std::size_t dim) : classes_(classes), dim_(dim), w_(classes * (dim + 1), 0.0) {}

  void probabilities(const double* x, std::vector<double>& p) const {
    p.resize(classes_);
    double top = -INFINITY;
    for (std::size_t c = 0; c < classes_; ++c) {
      const double* wc = &w_[c * (dim_ + 1)];
      double z = wc[dim_];
      for (std::size_t k = 0; k < dim_; ++k) z += wc[k] * x[k];
      p[c] = z;
      top = std::max(top, z);
    }
    double sum = 0.0;
    for (auto& z : p) {
      z = std::exp(z - top);
      sum += z;
    }
    for (auto& z : p) z /= sum;
  }

  int predict(const double* x) const {
    std::vector<double> p;
    probabilities(x, p);
    return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
  }

  void step(const LabeledPoints& data, double lr) {
    std::vector<double> grad(w_.size(), 0.0);
    std::vector<double> p;
    for (std::size_t s = 0; s < data.size(); ++s) {
      const double* x = &data.features[s * dim_];
      probabilities(x, p);
      p[static_cast<std::size_t>(data.labels[s])] -= 1.0;
      for (std::size_t c = 0; c < classes_; ++c) {
        double* gc = &grad[c * (dim_ + 1)];
        for (std::size_t k = 0; k < dim_; ++k) gc[k] += p[c] * x[k];
        gc[dim_] += p[c];
      }
    }
    const double scale = lr / static_cast<double>(data.size());
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] -= scale * grad[i];
  }

 private:
  std::size_t classes_;
  std::size_t dim_;
  std::vector<double> w_;
};

}  // namespace

TrainerResponse micro_train(const SyntheticTask& task, const LabeledPoints& validation, const SampledManifest& sample,
                            const TrainerRequest& request) {
  task.validate();
  validate_request(request);
  const std::size_t n = task.clusters.size();
  if (request.class_table.size() != n || sample.classes.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "micro trainer: class count differs from task");
  }

  LabeledPoints train;
  train.dim = task.dim();
  for (const auto& s : sample.samples) {
    const auto x = training_features(task, s);
    train.features.insert(train.features.end(), x.begin(), x.end());
    train.labels.push_back(s.class_id);
  }
  if (train.size() == 0) throw Error(ErrorCode::kDegenerateData, "empty training sample");

  std::vector<double> class_count(n, 0.0);
  for (int label : validation.labels) class_count[static_cast<std::size_t>(label)] += 1.0;
  for (double count : class_count) {
    if (count < 2.0) throw Error(ErrorCode::kDegenerateData, "a class has fewer than 2 validation samples");
  }

  TrainerResponse response;
  response.classes = request.class_table;
  response.matrix = ObjectiveMatrix(n, static_cast<std::size_t>(request.epochs));
  response.trainer = {"micro-softmax", "1", 0.0};

  SoftmaxModel model(n, train.dim);
  std::vector<double> correct(n), predicted(n);
  for (int epoch = 0; epoch < request.epochs; ++epoch) {
    for (int s = 0; s < task.steps_per_epoch; ++s) model.step(train, task.learning_rate);

    std::fill(correct.begin(), correct.end(), 0.0);
    std::fill(predicted.begin(), predicted.end(), 0.0);
    for (std::size_t s = 0; s < validation.size(); ++s) {
      const int guess = model.predict(&validation.features[s * validation.dim]);
      predicted[static_cast<std::size_t>(guess)] += 1.0;
      if (guess == validation.labels[s]) correct[static_cast<std::size_t>(guess)] += 1.0;
    }
    for (std::size_t c = 0; c < n; ++c) {
      const double floor = 0.5 / class_count[c];
      double value = 0.0;
      if (request.objective == "precision") {
        value = predicted[c] > 0.0 ? correct[c] / predicted[c] : 0.0;
      } else {
        // Per-class accuracy and recall coincide: correct / class size.
        value = correct[c] / class_count[c];
      }
      response.matrix.at(c, static_cast<std::size_t>(epoch)) = std::max(value, floor);
    }
  }
  return response;
}

MicroTrainer::MicroTrainer(SyntheticTask task) : task_(std::move(task)), validation_(make_validation_set(task_)) {}

TrainerResponse MicroTrainer::train(const TrainerRequest& request, const SampledManifest& sample) {
  return micro_train(task_, validation_, sample, request);
}

}  // namespace distopt
