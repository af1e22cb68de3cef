#pragma once

#include <cstdint>
#include <vector>

#include "distopt/trainer.hpp"

namespace distopt {

// Saturating power law acc(d) = a - b * d^(-beta), clamped to [0.01, 1].
struct LearningCurve {
  double ceiling = 0.9;     // a
  double difficulty = 1.0;  // b
  double exponent = 0.5;    // beta

  bool operator==(const LearningCurve&) const = default;
};

struct LearningCurveParams {
  std::vector<LearningCurve> curves;  // one per class, manifest order
  int ramp_epochs = 1;                // epochs until the plateau is reached
  double noise = 0.0;                 // per-epoch gaussian std-dev
  std::uint64_t seed = 0;

  // Throws InvalidCurve for non-finite values, a ceiling outside (0, 1],
  // negative difficulty, non-positive exponent, ramp < 1 or negative noise.
  void validate() const;

  bool operator==(const LearningCurveParams&) const = default;
};

inline constexpr double kMinPlateau = 0.01;
inline constexpr double kMinObservedObjective = 1e-3;

// Noiseless plateau objective for `samples` training samples.
double plateau_objective(const LearningCurve& curve, double samples);

// Noiseless plateau objectives of every class for a quota allocation.
std::vector<double> plateau_objectives(const LearningCurveParams& params, const std::vector<double>& samples);

// Per-epoch value: plateau * min(1, (i + 1) / ramp) + N(0, noise), truncated
// to [kMinObservedObjective, 1]. Noise for class c comes from
// mix_seed(splitmix64(params.seed) ^ request.seed, request.iteration, c).
TrainerResponse simulate_training(const std::vector<std::size_t>& quotas, const LearningCurveParams& params,
                                  const TrainerRequest& request);

class SimulatedTrainer final : public Trainer {
 public:
  explicit SimulatedTrainer(LearningCurveParams params);

  TrainerResponse train(const TrainerRequest& request, const SampledManifest& sample) override;

  const LearningCurveParams& params() const { return params_; }

 private:
  LearningCurveParams params_;
};

}  // namespace distopt
