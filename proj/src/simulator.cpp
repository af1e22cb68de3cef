#include "distopt/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "distopt/error.hpp"
#include "distopt/random.hpp"

namespace distopt {

void LearningCurveParams::validate() const {
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto& k = curves[c];
    const std::string where = "curve " + std::to_string(c);
    if (!std::isfinite(k.ceiling) || !std::isfinite(k.difficulty) || !std::isfinite(k.exponent)) {
      throw Error(ErrorCode::kInvalidCurve, where + ": non-finite parameter");
    }
    if (!(k.ceiling > 0.0 && k.ceiling <= 1.0)) throw Error(ErrorCode::kInvalidCurve, where + ": ceiling outside (0, 1]");
    if (k.difficulty < 0.0) throw Error(ErrorCode::kInvalidCurve, where + ": negative difficulty");
    if (!(k.exponent > 0.0)) throw Error(ErrorCode::kInvalidCurve, where + ": exponent must be positive");
  }
  if (ramp_epochs < 1) throw Error(ErrorCode::kInvalidCurve, "ramp must be >= 1 epoch");
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw Error(ErrorCode::kInvalidCurve, "noise must be >= 0");
}

double plateau_objective(const LearningCurve& curve, double samples) {
  const double raw = curve.ceiling - curve.difficulty * std::pow(samples, -curve.exponent);
  return std::clamp(raw, kMinPlateau, 1.0);
}

std::vector<double> plateau_objectives(const LearningCurveParams& params, const std::vector<double>& samples) {
  std::vector<double> out(samples.size());
  for (std::size_t c = 0; c < samples.size(); ++c) out[c] = plateau_objective(params.curves.at(c), samples[c]);
  return out;
}

TrainerResponse simulate_training(const std::vector<std::size_t>& quotas, const LearningCurveParams& params,
                                  const TrainerRequest& request) {
  params.validate();
  validate_request(request);
  if (quotas.size() != params.curves.size() || quotas.size() != request.class_table.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "simulator: quota, curve and class counts differ");
  }

  const auto n = quotas.size();
  const auto epochs = static_cast<std::size_t>(request.epochs);
  TrainerResponse response;
  response.classes = request.class_table;
  response.matrix = ObjectiveMatrix(n, epochs);
  response.trainer = {"simulator", "1", 0.0};

  const std::uint64_t stream_base = splitmix64(params.seed) ^ request.seed;
  for (std::size_t c = 0; c < n; ++c) {
    if (quotas[c] < 1) throw Error(ErrorCode::kInvalidCurve, "simulator: quota must be >= 1");
    const double plateau = plateau_objective(params.curves[c], static_cast<double>(quotas[c]));
    Rng rng(mix_seed(stream_base, static_cast<std::uint64_t>(request.iteration), c));
    for (std::size_t i = 0; i < epochs; ++i) {
      const double ramp = std::min(1.0, static_cast<double>(i + 1) / params.ramp_epochs);
      double value = plateau * ramp;
      if (params.noise > 0.0) value += params.noise * rng.normal();
      response.matrix.at(c, i) = std::clamp(value, kMinObservedObjective, 1.0);
    }
  }
  return response;
}

SimulatedTrainer::SimulatedTrainer(LearningCurveParams params) : params_(std::move(params)) { params_.validate(); }

TrainerResponse SimulatedTrainer::train(const TrainerRequest& request, const SampledManifest& sample) {
  return simulate_training(sample.class_counts(), params_, request);
}

}  // namespace distopt
