#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "distopt/external_trainer.hpp"
#include "distopt/manifest.hpp"
#include "distopt/micro_trainer.hpp"
#include "distopt/optimizer.hpp"
#include "distopt/simulator.hpp"

namespace distopt {

// Where the training manifest comes from: a table / directory on disk, or a
// synthetic manifest of `<class>/<index>` ids.
struct ManifestSource {
  std::string path;
  std::vector<std::string> synthetic_classes;
  std::vector<std::size_t> synthetic_counts;

  bool is_synthetic() const { return path.empty(); }
  bool operator==(const ManifestSource&) const = default;
};

// Partially specified class parameters; overrides are layered on defaults.
struct ClassSettings {
  std::optional<std::size_t> max_samples;
  std::optional<double> factor;
  std::optional<double> lower;
  std::optional<double> upper;
  std::optional<double> offset;

  bool operator==(const ClassSettings&) const = default;
};

enum class TrainerKind { kSimulator, kMicro, kExternal };

std::string_view to_string(TrainerKind kind);
TrainerKind trainer_kind_from_string(std::string_view text);

struct SimulatorSettings {
  std::optional<LearningCurve> curve_defaults;
  std::map<std::string, LearningCurve> curves;
  int ramp_epochs = 1;
  double noise = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const SimulatorSettings&) const = default;
};

struct MicroSettings {
  std::map<std::string, ClusterSpec> clusters;
  int validation_per_class = 200;
  std::uint64_t seed = 0;
  double learning_rate = 0.5;
  int steps_per_epoch = 1;

  bool operator==(const MicroSettings&) const = default;
};

struct TrainerSpec {
  TrainerKind kind = TrainerKind::kSimulator;
  SimulatorSettings simulator;
  MicroSettings micro;
  ExternalCommand external;

  bool operator==(const TrainerSpec&) const = default;
};

struct RunConfig {
  std::string run_id = "run";
  ManifestSource manifest;
  std::optional<ClassSettings> class_defaults;
  std::map<std::string, ClassSettings> class_overrides;
  TrainerSpec trainer;
  std::string objective = "accuracy";
  int iterations = 150;
  int epochs = 10;
  std::optional<EpochWindow> window;  // default_window(epochs) when unset
  std::uint64_t seed = 0;
  ConvergenceParams convergence;

  EpochWindow effective_window() const { return window ? *window : default_window(epochs); }

  bool operator==(const RunConfig&) const = default;
};

// Throws ConfigInvalid for malformed documents or values violating
// iterations >= 1, window within epochs, positive tolerances and the
// objective allow-list.
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);

// Canonical JSON form; parse_run_config(run_config_to_json(c)) == c.
std::string run_config_to_json(const RunConfig& config);

void validate_run_config(const RunConfig& config);

DatasetManifest load_manifest(const RunConfig& config);

// Resolves defaults and overrides into one validated spec per manifest class.
std::vector<ClassSpec> resolve_class_specs(const RunConfig& config, const DatasetManifest& manifest);

LearningCurveParams resolve_curves(const SimulatorSettings& settings, const DatasetManifest& manifest);
SyntheticTask resolve_task(const MicroSettings& settings, const DatasetManifest& manifest);

// External trainers place their bundles under `work_dir`.
std::unique_ptr<Trainer> make_trainer(const RunConfig& config, const DatasetManifest& manifest,
                                      const std::filesystem::path& work_dir);

}  // namespace distopt
