#include "distopt/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <ostream>

#include "distopt/error.hpp"
#include "distopt/random.hpp"
#include "distopt/text_io.hpp"

namespace distopt {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kRunning: return "running";
    case RunStatus::kCompleted: return "completed";
    case RunStatus::kConverged: return "converged";
    case RunStatus::kSaturated: return "saturated";
    case RunStatus::kAborted: return "aborted";
  }
  return "?";
}

RunStatus run_status_from_string(std::string_view text) {
  for (auto s : {RunStatus::kRunning, RunStatus::kCompleted, RunStatus::kConverged, RunStatus::kSaturated,
                 RunStatus::kAborted}) {
    if (to_string(s) == text) return s;
  }
  throw Error(ErrorCode::kCorruptCheckpoint, "unknown run status '" + std::string(text) + "'");
}

int exit_code_for(RunStatus status) {
  switch (status) {
    case RunStatus::kSaturated: return 2;
    case RunStatus::kAborted: return 3;
    default: return 0;
  }
}

bool IterationRecord::operator==(const IterationRecord& o) const {
  return iteration == o.iteration && factors == o.factors && normalized_factors == o.normalized_factors &&
         quotas == o.quotas && means == o.means && targets == o.targets && mean_avg == o.mean_avg &&
         variance == o.variance && raw_next_factors == o.raw_next_factors && next_factors == o.next_factors &&
         at_lower == o.at_lower && at_upper == o.at_upper && saturated == o.saturated && converged == o.converged &&
         warnings == o.warnings;
}

namespace {

ordered_json record_to_json(const IterationRecord& r) {
  ordered_json j;
  j["iteration"] = r.iteration;
  j["factors"] = r.factors;
  j["normalized_factors"] = r.normalized_factors;
  j["quotas"] = r.quotas;
  j["means"] = r.means;
  j["targets"] = r.targets;
  j["mean_avg"] = r.mean_avg;
  j["variance"] = r.variance;
  j["raw_next_factors"] = r.raw_next_factors;
  j["next_factors"] = r.next_factors;
  j["at_lower"] = r.at_lower;
  j["at_upper"] = r.at_upper;
  j["saturated"] = r.saturated;
  j["converged"] = r.converged;
  j["warnings"] = r.warnings;
  return j;
}

IterationRecord record_from_json(const ordered_json& j) {
  IterationRecord r;
  r.iteration = j.at("iteration").get<int>();
  r.factors = j.at("factors").get<std::vector<double>>();
  r.normalized_factors = j.at("normalized_factors").get<std::vector<double>>();
  r.quotas = j.at("quotas").get<std::vector<std::size_t>>();
  r.means = j.at("means").get<std::vector<double>>();
  r.targets = j.at("targets").get<std::vector<double>>();
  r.mean_avg = j.at("mean_avg").get<double>();
  r.variance = j.at("variance").get<double>();
  r.raw_next_factors = j.at("raw_next_factors").get<std::vector<double>>();
  r.next_factors = j.at("next_factors").get<std::vector<double>>();
  r.at_lower = j.at("at_lower").get<std::vector<bool>>();
  r.at_upper = j.at("at_upper").get<std::vector<bool>>();
  r.saturated = j.at("saturated").get<bool>();
  r.converged = j.at("converged").get<bool>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

ordered_json header_to_json(const RunHistory& h) {
  ordered_json j;
  j["config"] = ordered_json::parse(run_config_to_json(h.config));
  j["manifest_hash"] = h.manifest_hash;
  j["classes"] = h.classes;
  j["max_samples"] = h.max_samples;
  j["status"] = to_string(h.status);
  j["abort_reason"] = h.abort_reason;
  j["fallback_quotas"] = h.fallback_quotas;
  return j;
}

RunHistory header_from_json(const ordered_json& j) {
  RunHistory h;
  h.config = parse_run_config(j.at("config").dump());
  h.manifest_hash = j.at("manifest_hash").get<std::string>();
  h.classes = j.at("classes").get<std::vector<std::string>>();
  h.max_samples = j.at("max_samples").get<std::vector<std::size_t>>();
  h.status = run_status_from_string(j.at("status").get<std::string>());
  h.abort_reason = j.at("abort_reason").get<std::string>();
  h.fallback_quotas = j.at("fallback_quotas").get<std::vector<std::size_t>>();
  return h;
}

std::string iteration_file_name(int iteration) {
  std::string name = std::to_string(iteration);
  name.insert(0, name.size() < 6 ? 6 - name.size() : 0, '0');
  return name + ".json";
}

std::vector<double> normalized(const std::vector<double>& f) {
  double sum = 0.0;
  for (double v : f) sum += v;
  std::vector<double> out(f.size());
  for (std::size_t c = 0; c < f.size(); ++c) out[c] = f[c] / sum;
  return out;
}

void write_header(const RunHistory& h, const fs::path& out_dir) {
  ordered_json j = header_to_json(h);
  j["iterations_completed"] = h.records.size();
  write_file_atomic(out_dir / "run.json", j.dump(2) + "\n");
}

void persist(const RunHistory& h, const fs::path& out_dir) {
  write_header(h, out_dir);
  write_file_atomic(out_dir / kHistoryFile, history_to_json(h));
}

// Status implied by the records alone, or nullopt when the run can continue.
std::optional<RunStatus> terminal_status(const RunHistory& h) {
  if (h.records.empty()) return std::nullopt;
  const auto& last = h.records.back();
  if (last.saturated) return RunStatus::kSaturated;
  if (last.converged) return RunStatus::kConverged;
  if (static_cast<int>(h.records.size()) >= h.config.iterations) return RunStatus::kCompleted;
  return std::nullopt;
}

void append_timing(const fs::path& out_dir, const IterationRecord& r) {
  std::ofstream out(out_dir / "timing.csv", std::ios::app);
  out << r.iteration << ',' << format_double(r.trainer_seconds) << '\n';
}

void set_fallback(RunHistory& h) {
  h.status = RunStatus::kSaturated;
  h.fallback_quotas = h.max_samples;
}

RunHistory drive(RunHistory h, const DatasetManifest& manifest, const std::vector<ClassSpec>& specs,
                 const fs::path& out_dir, const RunOptions& options) {
  std::unique_ptr<Trainer> owned;
  Trainer* trainer = options.trainer;
  if (trainer == nullptr) {
    owned = make_trainer(h.config, manifest, out_dir / "bundles");
    trainer = owned.get();
  }

  const std::size_t n = specs.size();
  const EpochWindow window = h.config.effective_window();

  std::vector<double> factors(n);
  if (h.records.empty()) {
    for (std::size_t c = 0; c < n; ++c) factors[c] = specs[c].factor;
  } else {
    factors = h.records.back().next_factors;
  }
  std::vector<std::vector<double>> factor_history;
  std::vector<std::vector<double>> mean_history;
  for (const auto& r : h.records) {
    factor_history.push_back(r.factors);
    std::vector<double> adjusted(n);
    for (std::size_t c = 0; c < n; ++c) adjusted[c] = r.means[c] - specs[c].offset;
    mean_history.push_back(std::move(adjusted));
  }

  h.status = RunStatus::kRunning;
  h.abort_reason.clear();
  int budget = options.stop_after.value_or(h.config.iterations);

  for (int it = static_cast<int>(h.records.size()); it < h.config.iterations; ++it) {
    if (budget-- <= 0) {
      persist(h, out_dir);
      return h;
    }
    IterationRecord rec;
    rec.iteration = it;
    rec.factors = factors;
    rec.normalized_factors = normalized(factors);
    rec.quotas.resize(n);
    for (std::size_t c = 0; c < n; ++c) rec.quotas[c] = compute_quota(specs[c].max_samples, factors[c]);

    try {
      const SampledManifest sample = sample_subset(manifest, {rec.quotas, it}, h.config.seed);
      TrainerRequest request;
      request.run_id = h.config.run_id;
      request.iteration = it;
      request.epochs = h.config.epochs;
      request.window = window;
      request.objective = h.config.objective;
      request.seed = trainer_seed(h.config.seed, static_cast<std::uint64_t>(it));
      request.class_table = manifest.classes();

      const auto start = std::chrono::steady_clock::now();
      const TrainerResponse response = trainer->train(request, sample);
      rec.trainer_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      validate_response(request, response);

      UpdateResult update = compute_update(response.matrix, window, specs, factors);
      rec.means = std::move(update.diagnostics.means);
      rec.targets = std::move(update.diagnostics.targets);
      rec.mean_avg = update.diagnostics.mean_avg;
      rec.variance = update.diagnostics.variance;
      rec.raw_next_factors = std::move(update.diagnostics.raw_factors);
      rec.warnings = std::move(update.diagnostics.warnings);
      rec.next_factors = update.state.factors;
      rec.at_lower = update.state.at_lower;
      rec.at_upper = update.state.at_upper;
      rec.saturated = update.state.saturated;
    } catch (const std::exception& e) {
      h.status = RunStatus::kAborted;
      h.abort_reason = e.what();
      if (options.log) *options.log << "iteration " << it << " aborted: " << e.what() << '\n';
      persist(h, out_dir);
      return h;
    }

    factor_history.push_back(rec.factors);
    std::vector<double> adjusted(n);
    for (std::size_t c = 0; c < n; ++c) adjusted[c] = rec.means[c] - specs[c].offset;
    mean_history.push_back(std::move(adjusted));
    auto with_next = factor_history;
    with_next.push_back(rec.next_factors);
    rec.converged = !rec.saturated && convergence_check(with_next, mean_history, h.config.convergence);

    if (options.log) {
      *options.log << "iteration " << it << "  variance " << format_double(rec.variance) << "  quotas";
      for (auto q : rec.quotas) *options.log << ' ' << q;
      if (rec.saturated) *options.log << "  [saturated]";
      if (rec.converged) *options.log << "  [converged]";
      *options.log << '\n';
    }

    write_file_atomic(out_dir / "iterations" / iteration_file_name(it), record_to_json(rec).dump(2) + "\n");
    append_timing(out_dir, rec);
    factors = rec.next_factors;
    h.records.push_back(std::move(rec));

    if (auto status = terminal_status(h)) {
      if (*status == RunStatus::kSaturated) {
        set_fallback(h);
      } else {
        h.status = *status;
      }
      break;
    }
  }
  if (h.status == RunStatus::kRunning) h.status = RunStatus::kCompleted;
  persist(h, out_dir);
  return h;
}

}  // namespace

std::string history_to_json(const RunHistory& h) {
  ordered_json j = header_to_json(h);
  ordered_json records = ordered_json::array();
  for (const auto& r : h.records) records.push_back(record_to_json(r));
  j["records"] = std::move(records);
  return j.dump(2) + "\n";
}

RunHistory history_from_json(std::string_view text) {
  try {
    const auto j = ordered_json::parse(text);
    RunHistory h = header_from_json(j);
    for (const auto& r : j.at("records")) h.records.push_back(record_from_json(r));
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptCheckpoint, e.what());
  }
}

RunHistory run(const RunConfig& config, const fs::path& out_dir, const RunOptions& options) {
  validate_run_config(config);
  const DatasetManifest manifest = load_manifest(config);
  const std::vector<ClassSpec> specs = resolve_class_specs(config, manifest);

  fs::create_directories(out_dir);
  fs::remove_all(out_dir / "iterations");
  fs::remove_all(out_dir / "bundles");
  fs::remove(out_dir / kHistoryFile);
  fs::remove(out_dir / "timing.csv");
  fs::create_directories(out_dir / "iterations");

  RunHistory h;
  // Round-trip through the canonical form so a fresh run and a resumed one
  // carry identical config snapshots.
  h.config = parse_run_config(run_config_to_json(config));
  h.manifest_hash = manifest.content_hash();
  h.classes = manifest.classes();
  for (const auto& s : specs) h.max_samples.push_back(s.max_samples);
  persist(h, out_dir);
  return drive(std::move(h), manifest, specs, out_dir, options);
}

RunHistory load_checkpoint(const fs::path& out_dir) {
  RunHistory h;
  try {
    h = header_from_json(ordered_json::parse(read_text_file(out_dir / "run.json")));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptCheckpoint, std::string("run.json: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kUnreadableSource) throw Error(ErrorCode::kCorruptCheckpoint, e.what());
    throw;
  }

  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(out_dir / "iterations", ec)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (files[i].filename() != iteration_file_name(static_cast<int>(i))) {
      throw Error(ErrorCode::kCorruptCheckpoint, "iteration checkpoints are not contiguous at " + std::to_string(i));
    }
    IterationRecord r;
    try {
      r = record_from_json(ordered_json::parse(read_text_file(files[i])));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kCorruptCheckpoint, files[i].string() + ": " + e.what());
    }
    if (r.iteration != static_cast<int>(i) || r.factors.size() != h.classes.size()) {
      throw Error(ErrorCode::kCorruptCheckpoint, files[i].string() + ": inconsistent record");
    }
    h.records.push_back(std::move(r));
  }

  if (auto status = terminal_status(h)) {
    h.status = *status;
    if (h.status == RunStatus::kSaturated) h.fallback_quotas = h.max_samples;
  } else if (h.status != RunStatus::kAborted) {
    h.status = RunStatus::kRunning;
  }
  return h;
}

RunHistory resume(const fs::path& out_dir, const RunOptions& options) {
  RunHistory h = load_checkpoint(out_dir);
  if (h.status == RunStatus::kCompleted || h.status == RunStatus::kConverged || h.status == RunStatus::kSaturated) {
    return h;
  }
  const DatasetManifest manifest = load_manifest(h.config);
  if (manifest.content_hash() != h.manifest_hash) {
    throw Error(ErrorCode::kManifestDrift,
                "manifest hash " + manifest.content_hash() + " differs from checkpoint " + h.manifest_hash);
  }
  const std::vector<ClassSpec> specs = resolve_class_specs(h.config, manifest);
  return drive(std::move(h), manifest, specs, out_dir, options);
}

}  // namespace distopt
