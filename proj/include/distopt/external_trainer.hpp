#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "distopt/trainer.hpp"

namespace distopt {

struct ExternalCommand {
  std::vector<std::string> argv;  // the bundle directory is appended
  double timeout_seconds = 24.0 * 3600.0;

  bool operator==(const ExternalCommand&) const = default;
};

// Writes the request bundle into `bundle_dir`, runs the command with the
// bundle path as its last argument, waits for it, then parses and validates
// kResponseFile. The child's stdout/stderr are captured to stdout.log and
// stderr.log inside the bundle; the tail of stderr is attached to
// NonZeroExit errors. On timeout the whole process group is killed.
TrainerResponse invoke_external(const TrainerRequest& request, const SampledManifest& sample,
                                const ExternalCommand& command, const std::filesystem::path& bundle_dir);

class ExternalTrainer final : public Trainer {
 public:
  // Bundles are created as <work_dir>/iter_NNNNNN.
  ExternalTrainer(ExternalCommand command, std::filesystem::path work_dir);

  TrainerResponse train(const TrainerRequest& request, const SampledManifest& sample) override;

 private:
  ExternalCommand command_;
  std::filesystem::path work_dir_;
};

}  // namespace distopt
