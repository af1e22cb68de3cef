#include "distopt/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "distopt/error.hpp"

namespace distopt {

EpochWindow default_window(int epochs) {
  if (epochs < 1) throw Error(ErrorCode::kConfigInvalid, "epochs must be >= 1");
  const int first = static_cast<int>(std::ceil(0.8 * epochs));
  return {std::min(first, epochs - 1), epochs - 1};
}

ObjectiveMatrix::ObjectiveMatrix(std::size_t num_classes, std::size_t num_epochs, double fill)
    : classes_(num_classes), epochs_(num_epochs), values_(num_classes * num_epochs, fill) {}

ObjectiveMatrix::ObjectiveMatrix(const std::vector<std::vector<double>>& rows)
    : classes_(rows.size()), epochs_(rows.empty() ? 0 : rows.front().size()) {
  values_.reserve(classes_ * epochs_);
  for (const auto& r : rows) {
    if (r.size() != epochs_) throw Error(ErrorCode::kDimensionMismatch, "ragged objective matrix");
    values_.insert(values_.end(), r.begin(), r.end());
  }
}

std::vector<std::vector<double>> ObjectiveMatrix::rows() const {
  std::vector<std::vector<double>> out;
  for (std::size_t c = 0; c < classes_; ++c) {
    auto r = row(c);
    out.emplace_back(r.begin(), r.end());
  }
  return out;
}

void ObjectiveMatrix::validate(EpochWindow window) const {
  for (std::size_t c = 0; c < classes_; ++c) {
    for (std::size_t i = 0; i < epochs_; ++i) {
      if (!std::isfinite(at(c, i))) {
        throw Error(ErrorCode::kNonFiniteObjective,
                    "class " + std::to_string(c) + " epoch " + std::to_string(i));
      }
    }
  }
  if (window.first < 0 || window.first > window.last || static_cast<std::size_t>(window.last) >= epochs_) {
    throw Error(ErrorCode::kDimensionMismatch, "epoch window [" + std::to_string(window.first) + ", " +
                                                   std::to_string(window.last) + "] outside " +
                                                   std::to_string(epochs_) + " epochs");
  }
  for (std::size_t c = 0; c < classes_; ++c) {
    for (int i = window.first; i <= window.last; ++i) {
      if (at(c, static_cast<std::size_t>(i)) <= 0.0) {
        throw Error(ErrorCode::kNonPositiveObjective,
                    "class " + std::to_string(c) + " epoch " + std::to_string(i));
      }
    }
  }
}

bool is_supported_objective(std::string_view name) {
  static constexpr std::array<std::string_view, 3> kAllowed = {"accuracy", "precision", "recall"};
  return std::find(kAllowed.begin(), kAllowed.end(), name) != kAllowed.end();
}

void require_supported_objective(std::string_view name) {
  if (!is_supported_objective(name)) {
    throw Error(ErrorCode::kConfigInvalid,
                "objective '" + std::string(name) + "' is not a per-class objective (use accuracy, precision or recall)");
  }
}

ObjectiveMatrix offset_adjusted(const ObjectiveMatrix& matrix, std::span<const double> offsets,
                                EpochWindow window) {
  if (offsets.size() != matrix.num_classes()) {
    throw Error(ErrorCode::kDimensionMismatch, "one offset per class required");
  }
  ObjectiveMatrix out = matrix;
  for (std::size_t c = 0; c < matrix.num_classes(); ++c) {
    for (int i = window.first; i <= window.last; ++i) {
      out.at(c, static_cast<std::size_t>(i)) -= offsets[c];
    }
  }
  return out;
}

std::vector<double> epoch_average(const ObjectiveMatrix& adjusted, EpochWindow window) {
  const auto n = static_cast<double>(adjusted.num_classes());
  std::vector<double> avg;
  avg.reserve(static_cast<std::size_t>(window.size()));
  for (int i = window.first; i <= window.last; ++i) {
    double sum = 0.0;
    for (std::size_t c = 0; c < adjusted.num_classes(); ++c) sum += adjusted.at(c, static_cast<std::size_t>(i));
    avg.push_back(sum / n);
  }
  return avg;
}

double class_target(std::span<const double> epoch_avg, double offset) { return mean_of(epoch_avg) + offset; }

double class_mean(std::span<const double> row, EpochWindow window) {
  double sum = 0.0;
  for (int i = window.first; i <= window.last; ++i) {
    const double v = row[static_cast<std::size_t>(i)];
    if (!(v > 0.0)) throw Error(ErrorCode::kNonPositiveObjective, "epoch " + std::to_string(i));
    sum += v;
  }
  return sum / window.size();
}

std::vector<double> update_factors(std::span<const double> factors, std::span<const double> targets,
                                   std::span<const double> means) {
  std::vector<double> out(factors.size());
  for (std::size_t c = 0; c < factors.size(); ++c) {
    if (!(means[c] > 0.0)) throw Error(ErrorCode::kDivisionDomain, "class mean must be positive");
    out[c] = targets[c] / means[c] * factors[c];
  }
  return out;
}

FactorState clamp_and_flag(std::span<const double> raw, std::span<const double> lower,
                           std::span<const double> upper) {
  FactorState s;
  s.factors.resize(raw.size());
  s.at_lower.assign(raw.size(), false);
  s.at_upper.assign(raw.size(), false);
  bool any_lower = false;
  bool any_upper = false;
  for (std::size_t c = 0; c < raw.size(); ++c) {
    const double f = std::min(upper[c], std::max(lower[c], raw[c]));
    s.factors[c] = f;
    s.at_lower[c] = f <= lower[c];
    s.at_upper[c] = f >= upper[c];
    any_lower = any_lower || s.at_lower[c];
    any_upper = any_upper || s.at_upper[c];
  }
  // A single class pinned at both limits (lower == upper) cannot by itself
  // signal missing data; saturation needs two distinct classes.
  if (any_lower && any_upper) {
    for (std::size_t c = 0; c < raw.size() && !s.saturated; ++c) {
      if (!s.at_lower[c]) continue;
      for (std::size_t k = 0; k < raw.size(); ++k) {
        if (k != c && s.at_upper[k]) {
          s.saturated = true;
          break;
        }
      }
    }
  }
  return s;
}

double mean_of(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

// Shifted by the first value so identical inputs give exactly zero.
double variance_of(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double shift = values.front();
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  double sq = 0.0;
  for (double v : values) {
    sum += v - shift;
    sq += (v - shift) * (v - shift);
  }
  return std::max(0.0, (sq - sum * sum / n) / n);
}

UpdateResult compute_update(const ObjectiveMatrix& matrix, EpochWindow window,
                            std::span<const ClassSpec> specs, std::span<const double> factors) {
  const std::size_t n = matrix.num_classes();
  if (specs.size() != n || factors.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "specs, factors and matrix disagree on class count");
  }
  matrix.validate(window);

  std::vector<double> offsets(n), lower(n), upper(n);
  for (std::size_t c = 0; c < n; ++c) {
    offsets[c] = specs[c].offset;
    lower[c] = specs[c].lower;
    upper[c] = specs[c].upper;
  }

  UpdateResult result;
  auto& diag = result.diagnostics;
  const ObjectiveMatrix adjusted = offset_adjusted(matrix, offsets, window);
  const std::vector<double> avg = epoch_average(adjusted, window);
  diag.mean_avg = class_target(avg, 0.0);
  diag.means.resize(n);
  diag.targets.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    diag.means[c] = class_mean(matrix.row(c), window);
    double target = class_target(avg, offsets[c]);
    if (target <= 0.0) {
      diag.warnings.push_back("class " + std::to_string(c) + ": target " + std::to_string(target) +
                              " raised to floor");
      target = kMinTarget;
    }
    diag.targets[c] = target;
  }
  diag.variance = variance_of(diag.means);
  diag.raw_factors = update_factors(factors, diag.targets, diag.means);
  result.state = clamp_and_flag(diag.raw_factors, lower, upper);
  return result;
}

bool convergence_check(std::span<const std::vector<double>> factor_history,
                       std::span<const std::vector<double>> mean_history, const ConvergenceParams& params) {
  const std::size_t steps = mean_history.size();
  if (params.patience < 1 || steps < static_cast<std::size_t>(params.patience)) return false;
  if (factor_history.size() < steps + 1) return false;
  for (std::size_t i = steps - static_cast<std::size_t>(params.patience); i < steps; ++i) {
    const auto& before = factor_history[i];
    const auto& after = factor_history[i + 1];
    double worst = 0.0;
    for (std::size_t c = 0; c < before.size(); ++c) {
      worst = std::max(worst, std::abs(after[c] - before[c]) / before[c]);
    }
    if (worst > params.tol_factor) return false;
    if (variance_of(mean_history[i]) > params.tol_variance) return false;
  }
  return true;
}

}  // namespace distopt
