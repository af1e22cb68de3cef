#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "distopt/run_config.hpp"

namespace distopt {

enum class RunStatus { kRunning, kCompleted, kConverged, kSaturated, kAborted };

std::string_view to_string(RunStatus status);
RunStatus run_status_from_string(std::string_view text);

// CLI exit code: 0 completed/converged, 2 saturated, 3 aborted.
int exit_code_for(RunStatus status);

struct IterationRecord {
  int iteration = 0;
  std::vector<double> factors;             // used for this iteration
  std::vector<double> normalized_factors;  // factors / sum of factors
  std::vector<std::size_t> quotas;
  std::vector<double> means;               // per class, over the window
  std::vector<double> targets;
  double mean_avg = 0.0;                   // cross-class average of offset-adjusted means
  double variance = 0.0;                   // population variance of the means
  std::vector<double> raw_next_factors;    // before clamping
  std::vector<double> next_factors;        // after clamping
  std::vector<bool> at_lower;
  std::vector<bool> at_upper;
  bool saturated = false;
  bool converged = false;
  std::vector<std::string> warnings;
  // Measured wall time of the trainer call. Kept out of the canonical
  // history so identical runs produce identical history files; written to
  // timing.csv instead.
  double trainer_seconds = 0.0;

  bool operator==(const IterationRecord& other) const;
};

struct RunHistory {
  RunConfig config;
  std::string manifest_hash;
  std::vector<std::string> classes;
  std::vector<std::size_t> max_samples;  // per-class sample base the factor scales
  std::vector<IterationRecord> records;
  RunStatus status = RunStatus::kRunning;
  // Set when saturated: every class falls back to its full max_samples.
  std::vector<std::size_t> fallback_quotas;
  std::string abort_reason;
};

// Canonical history document (excludes timing).
std::string history_to_json(const RunHistory& history);
RunHistory history_from_json(std::string_view text);

struct RunOptions {
  // Overrides the trainer built from the config (tests, embedding).
  Trainer* trainer = nullptr;
  // Stops after this many new iterations in this session, leaving the run
  // resumable with status running. Simulates an interruption.
  std::optional<int> stop_after;
  std::ostream* log = nullptr;
};

// Output directory layout:
//   run.json              config snapshot, manifest hash, status
//   iterations/NNNNNN.json one checkpoint per completed iteration
//   history.json          canonical full history
//   timing.csv            trainer wall time per iteration
//   bundles/              external trainer request bundles
inline constexpr const char* kHistoryFile = "history.json";

// Runs the optimization loop from scratch into `out_dir`, replacing any
// earlier checkpoint there. Configuration problems throw; failures while
// iterating mark the run aborted and are reported through the history.
RunHistory run(const RunConfig& config, const std::filesystem::path& out_dir, const RunOptions& options = {});

// Continues a checkpointed run. Finished runs are returned unchanged.
// Throws ManifestDrift when the manifest content changed and
// CorruptCheckpoint when the checkpoint cannot be read back.
RunHistory resume(const std::filesystem::path& out_dir, const RunOptions& options = {});

// Reads the checkpoint without running anything.
RunHistory load_checkpoint(const std::filesystem::path& out_dir);

struct ExpansionResult {
  std::vector<std::size_t> quotas;
  std::vector<bool> capped;
  std::vector<std::string> warnings;
};

// Scales quotas so the anchor class uses all of its availability while the
// unrounded factor ratios are preserved:
//   quota = round(factor / anchor factor * anchor availability),
// at least 1 and at most the class availability.
ExpansionResult expand_distribution(std::span<const double> factors, std::span<const std::size_t> availability,
                                    int anchor);

}  // namespace distopt
