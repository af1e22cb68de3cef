#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "distopt/manifest.hpp"

namespace distopt {

// Inclusive epoch range [first, last] over which objectives are averaged.
struct EpochWindow {
  int first = 0;
  int last = 0;

  int size() const { return last - first + 1; }
  bool operator==(const EpochWindow&) const = default;
};

// Default window: the trailing 20% of epochs, first = ceil(0.8 * epochs).
EpochWindow default_window(int epochs);

// Per-class, per-epoch objective scores, row-major (class, epoch).
class ObjectiveMatrix {
 public:
  ObjectiveMatrix() = default;
  ObjectiveMatrix(std::size_t num_classes, std::size_t num_epochs, double fill = 0.0);
  explicit ObjectiveMatrix(const std::vector<std::vector<double>>& rows);

  std::size_t num_classes() const { return classes_; }
  std::size_t num_epochs() const { return epochs_; }

  double& at(std::size_t c, std::size_t epoch) { return values_[c * epochs_ + epoch]; }
  double at(std::size_t c, std::size_t epoch) const { return values_[c * epochs_ + epoch]; }
  std::span<const double> row(std::size_t c) const { return {values_.data() + c * epochs_, epochs_}; }

  std::vector<std::vector<double>> rows() const;

  // Throws NonFiniteObjective for NaN/inf anywhere, DimensionMismatch when the
  // window does not fit, and NonPositiveObjective for values <= 0 inside it.
  void validate(EpochWindow window) const;

  bool operator==(const ObjectiveMatrix&) const = default;

 private:
  std::size_t classes_ = 0;
  std::size_t epochs_ = 0;
  std::vector<double> values_;
};

// Objectives that score each class independently. Composite scores such as
// F1 couple precision and recall and do not yield meaningful factors.
bool is_supported_objective(std::string_view name);
void require_supported_objective(std::string_view name);

// objective - offset for every epoch in the window; other epochs copied as-is.
ObjectiveMatrix offset_adjusted(const ObjectiveMatrix& matrix, std::span<const double> offsets,
                                EpochWindow window);

// Cross-class mean for each window epoch; element k is epoch window.first + k.
std::vector<double> epoch_average(const ObjectiveMatrix& adjusted, EpochWindow window);

// Mean of the per-epoch averages plus the class offset.
double class_target(std::span<const double> epoch_avg, double offset);

// Mean of the raw objective of one class over the window.
double class_mean(std::span<const double> row, EpochWindow window);

// factor * target / mean, elementwise.
std::vector<double> update_factors(std::span<const double> factors, std::span<const double> targets,
                                   std::span<const double> means);

struct FactorState {
  std::vector<double> factors;
  std::vector<bool> at_lower;
  std::vector<bool> at_upper;
  bool saturated = false;
};

FactorState clamp_and_flag(std::span<const double> raw, std::span<const double> lower,
                           std::span<const double> upper);

double mean_of(std::span<const double> values);

// Population variance.
double variance_of(std::span<const double> values);

struct UpdateDiagnostics {
  std::vector<double> means;    // per class, over the window
  std::vector<double> targets;  // per class, offset included
  double mean_avg = 0.0;        // cross-class average of offset-adjusted means
  std::vector<double> raw_factors;
  double variance = 0.0;        // population variance of the means
  std::vector<std::string> warnings;
};

struct UpdateResult {
  UpdateDiagnostics diagnostics;
  FactorState state;
};

// Targets below this are raised to it so the update stays positive.
inline constexpr double kMinTarget = 1e-6;

// One full factor update from a trainer's objective matrix.
UpdateResult compute_update(const ObjectiveMatrix& matrix, EpochWindow window,
                            std::span<const ClassSpec> specs, std::span<const double> factors);

struct ConvergenceParams {
  double tol_factor = 0.01;
  double tol_variance = 1e-4;
  int patience = 5;

  bool operator==(const ConvergenceParams&) const = default;
};

// factor_history holds f_0..f_k (k + 1 vectors) and mean_history the k
// per-iteration class means that produced each step. Converged once the last
// `patience` steps each have a largest relative factor change <= tol_factor
// and a cross-class variance of the means <= tol_variance.
bool convergence_check(std::span<const std::vector<double>> factor_history,
                       std::span<const std::vector<double>> mean_history, const ConvergenceParams& params);

}  // namespace distopt
