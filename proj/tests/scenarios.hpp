#pragma once

#include <string>
#include <vector>

#include "distopt/run_config.hpp"

namespace scenarios {

using distopt::ClassSettings;
using distopt::LearningCurve;
using distopt::RunConfig;

inline std::vector<std::string> class_names(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < n; ++c) names.push_back("class" + std::to_string(c));
  return names;
}

// Simulator run over a synthetic manifest with one learning curve per class.
inline RunConfig simulator_run(const std::vector<LearningCurve>& curves, std::size_t max_samples,
                               std::size_t available, double noise, int ramp_epochs) {
  RunConfig c;
  c.run_id = "sim";
  const auto names = class_names(curves.size());
  c.manifest.synthetic_classes = names;
  c.manifest.synthetic_counts.assign(curves.size(), available);
  c.class_defaults = ClassSettings{max_samples, 0.5, 0.05, 0.95, 0.0};
  c.trainer.kind = distopt::TrainerKind::kSimulator;
  c.trainer.simulator.ramp_epochs = ramp_epochs;
  c.trainer.simulator.noise = noise;
  c.trainer.simulator.seed = 7;
  c.trainer.micro.seed = 7;
  for (std::size_t k = 0; k < curves.size(); ++k) c.trainer.simulator.curves[names[k]] = curves[k];
  c.iterations = 150;
  c.epochs = 10;
  c.seed = 11;
  return c;
}

// Four classes sharing a ceiling with increasing difficulty.
inline RunConfig default_asymmetric() {
  return simulator_run({{0.95, 3.0, 0.5}, {0.95, 4.0, 0.5}, {0.95, 5.0, 0.5}, {0.95, 6.0, 0.5}}, 2000, 2000, 0.002,
                       5);
}

// Ten classes with evenly spaced difficulty.
inline RunConfig ten_class(double noise = 0.002) {
  std::vector<LearningCurve> curves;
  for (int k = 0; k < 10; ++k) curves.push_back({0.95, 3.0 + k / 3.0, 0.5});
  return simulator_run(curves, 2000, 2000, noise, 5);
}

// Class 1 can never reach the others, so the easy class is squeezed to its
// lower limit while the hard one hits its upper limit.
inline RunConfig saturating() {
  RunConfig c = simulator_run({{0.95, 3.0, 0.5}, {0.6, 3.0, 0.5}}, 2000, 2000, 0.0, 1);
  c.run_id = "saturating";
  return c;
}

}  // namespace scenarios
