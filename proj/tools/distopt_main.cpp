// distopt: per-class data distribution optimizer.
//
//   distopt run     --config run.json --out runs/a [--manifest m.csv] [--seed N]
//                   [--iterations N] [--trainer sim|micro|external] [--trainer-cmd argv...]
//   distopt resume  --out runs/a
//   distopt expand  --out runs/a --anchor cat [--manifest full.csv]
//   distopt report  --out runs/a
//   distopt oracle  --config run.json [--out runs/a] [--budget N] [--step 0.01]
//
// Exit codes: 0 completed or converged, 2 saturated, 3 aborted, 64 bad config.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <numeric>

#include "distopt/error.hpp"
#include "distopt/orchestrator.hpp"
#include "distopt/report.hpp"
#include "distopt/text_io.hpp"

namespace fs = std::filesystem;
using namespace distopt;

namespace {

constexpr int kExitConfig = 64;

void print_summary(const RunHistory& h) {
  std::cout << "status: " << to_string(h.status) << "\n";
  std::cout << "iterations: " << h.records.size() << "\n";
  if (!h.abort_reason.empty()) std::cout << "abort reason: " << h.abort_reason << "\n";
  if (h.records.empty()) return;
  const RunSummary s = summarize(h);
  std::cout << "final mean: " << format_double(s.final_mean) << "\n";
  std::cout << "final variance: " << format_double(s.final_variance) << "\n";
  std::cout << "total samples: " << s.total_samples << "\n";
  std::cout << "class,factor,factor_normalized,quota\n";
  const auto& last = h.records.back();
  for (std::size_t c = 0; c < s.classes.size(); ++c) {
    std::cout << s.classes[c] << ',' << format_double(s.final_factors[c]) << ','
              << format_double(s.final_normalized[c]) << ',' << last.quotas[c] << "\n";
  }
  if (h.status == RunStatus::kSaturated) {
    std::cout << "saturated: falling back to full availability per class:";
    for (auto q : h.fallback_quotas) std::cout << ' ' << q;
    std::cout << "\n";
  }
}

int finish(const RunHistory& h, const fs::path& out) {
  if (!h.records.empty()) write_plot_data(summarize(h), out);
  print_summary(h);
  return exit_code_for(h.status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Per-class training data distribution optimizer"};
  app.require_subcommand(1);

  std::string config_path, manifest_path, out_dir = "distopt_out", trainer_kind, anchor;
  std::uint64_t seed = 0;
  int iterations = 0;
  std::vector<std::string> trainer_cmd;
  double budget = 0.0, step = 0.01;
  bool quiet = false;

  auto* run_cmd = app.add_subcommand("run", "Run the optimization loop from scratch");
  run_cmd->add_option("--config", config_path, "Run configuration (JSON)")->required();
  run_cmd->add_option("--manifest", manifest_path, "Manifest table or class directory tree");
  run_cmd->add_option("--out", out_dir, "Output / checkpoint directory");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Base seed");
  run_cmd->add_option("--iterations", iterations, "Iteration limit");
  run_cmd->add_option("--trainer", trainer_kind, "sim, micro or external")
      ->check(CLI::IsMember({"sim", "micro", "external"}));
  run_cmd->add_option("--trainer-cmd", trainer_cmd, "External trainer argv; the bundle path is appended");
  run_cmd->add_flag("--quiet", quiet, "No per-iteration log");

  auto* resume_cmd = app.add_subcommand("resume", "Continue a checkpointed run");
  resume_cmd->add_option("--out", out_dir, "Checkpoint directory")->required();
  resume_cmd->add_flag("--quiet", quiet, "No per-iteration log");

  auto* expand_cmd = app.add_subcommand("expand", "Scale final quotas to an anchor class's full availability");
  expand_cmd->add_option("--out", out_dir, "Run directory")->required();
  expand_cmd->add_option("--anchor", anchor, "Anchor class name")->required();
  expand_cmd->add_option("--manifest", manifest_path, "Manifest with the full availability (default: the run's)");

  auto* report_cmd = app.add_subcommand("report", "Write factors.csv, objectives.csv and summary.csv");
  report_cmd->add_option("--out", out_dir, "Run directory")->required();

  auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force allocation search on a simulator config");
  oracle_cmd->add_option("--config", config_path, "Simulator run configuration")->required();
  oracle_cmd->add_option("--out", out_dir, "Run directory to compare against");
  oracle_cmd->add_option("--budget", budget, "Total sample budget (default: final quotas of --out)");
  oracle_cmd->add_option("--step", step, "Grid step as a fraction of the budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) {
      RunConfig config = load_run_config(config_path);
      if (!manifest_path.empty()) {
        config.manifest = ManifestSource{};
        config.manifest.path = fs::absolute(manifest_path).string();
      } else if (!config.manifest.is_synthetic()) {
        const fs::path p = config.manifest.path;
        if (p.is_relative()) config.manifest.path = (fs::absolute(config_path).parent_path() / p).lexically_normal().string();
      }
      if (*seed_opt) config.seed = seed;
      if (iterations > 0) config.iterations = iterations;
      if (!trainer_kind.empty()) config.trainer.kind = trainer_kind_from_string(trainer_kind);
      if (!trainer_cmd.empty()) config.trainer.external.argv = trainer_cmd;
      validate_run_config(config);
      RunOptions options;
      if (!quiet) options.log = &std::cerr;
      return finish(run(config, out_dir, options), out_dir);
    }
    if (*resume_cmd) {
      RunOptions options;
      if (!quiet) options.log = &std::cerr;
      return finish(resume(out_dir, options), out_dir);
    }
    if (*report_cmd) {
      const RunHistory h = load_checkpoint(out_dir);
      return finish(h, out_dir) == 3 ? 3 : 0;
    }
    if (*expand_cmd) {
      const RunHistory h = load_checkpoint(out_dir);
      if (h.records.empty()) throw Error(ErrorCode::kConfigInvalid, "run has no iterations");
      RunConfig config = h.config;
      if (!manifest_path.empty()) {
        config.manifest = ManifestSource{};
        config.manifest.path = manifest_path;
      }
      const DatasetManifest manifest = load_manifest(config);
      const auto anchor_id = manifest.class_index(anchor);
      if (!anchor_id) throw Error(ErrorCode::kConfigInvalid, "unknown anchor class '" + anchor + "'");
      if (manifest.classes() != h.classes) throw Error(ErrorCode::kConfigInvalid, "manifest classes differ from the run");
      const auto& factors = h.records.back().next_factors;
      const ExpansionResult ex = expand_distribution(factors, manifest.availability(), *anchor_id);
      std::string csv = "class,factor,quota,available,capped\n";
      for (std::size_t c = 0; c < factors.size(); ++c) {
        csv += csv_escape(h.classes[c]) + "," + format_double(factors[c]) + "," + std::to_string(ex.quotas[c]) + "," +
               std::to_string(manifest.availability()[c]) + "," + (ex.capped[c] ? "1" : "0") + "\n";
      }
      write_file_atomic(fs::path(out_dir) / "expanded.csv", csv);
      for (const auto& w : ex.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << csv;
      std::cout << "total," << std::accumulate(ex.quotas.begin(), ex.quotas.end(), std::size_t{0}) << "\n";
      return 0;
    }
    if (*oracle_cmd) {
      const RunConfig config = load_run_config(config_path);
      if (config.trainer.kind != TrainerKind::kSimulator) {
        throw Error(ErrorCode::kConfigInvalid, "the oracle needs a simulator configuration");
      }
      const DatasetManifest manifest = load_manifest(config);
      LearningCurveParams curves = resolve_curves(config.trainer.simulator, manifest);
      curves.noise = 0.0;
      std::optional<RunHistory> h;
      if (!oracle_cmd->get_option("--out")->empty()) h = load_checkpoint(out_dir);
      if (budget <= 0.0) {
        if (!h || h->records.empty()) throw Error(ErrorCode::kConfigInvalid, "give --budget or a finished --out run");
        const auto& q = h->records.back().quotas;
        budget = static_cast<double>(std::accumulate(q.begin(), q.end(), std::size_t{0}));
      }
      OracleResult r = grid_oracle(curves, budget, step);
      std::cout << "budget: " << format_double(r.budget) << "\nstep: " << format_double(r.step)
                << "\nevaluated: " << r.evaluated << "\nbest variance: " << format_double(r.best_variance) << "\n";
      std::cout << "class,oracle";
      if (h && !h->records.empty()) {
        attach_allocation(r, curves, h->records.back().quotas);
        std::cout << ",optimizer";
      }
      std::cout << "\n";
      for (std::size_t c = 0; c < manifest.num_classes(); ++c) {
        std::cout << manifest.classes()[c] << ',' << format_double(r.best_allocation[c]);
        if (!r.optimizer_allocation.empty()) std::cout << ',' << format_double(r.optimizer_allocation[c]);
        std::cout << "\n";
      }
      if (!r.optimizer_allocation.empty()) std::cout << "optimizer variance: " << format_double(r.optimizer_variance) << "\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_config_error(e.code()) ? kExitConfig : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
