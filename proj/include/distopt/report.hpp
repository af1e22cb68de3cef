#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "distopt/orchestrator.hpp"
#include "distopt/simulator.hpp"

namespace distopt {

struct RunSummary {
  std::vector<std::string> classes;
  std::vector<double> mean_avg_series;                  // per iteration
  std::vector<std::vector<double>> class_mean_series;   // [iteration][class]
  std::vector<std::vector<double>> normalized_series;   // [iteration][class]
  std::vector<double> final_factors;                    // raw, after the last update
  std::vector<double> final_normalized;
  double final_mean = 0.0;                              // over the last record's means
  double final_variance = 0.0;                          // population variance
  std::size_t total_samples = 0;                        // sum of the last quotas
  RunStatus status = RunStatus::kRunning;
};

RunSummary summarize(const RunHistory& history);

struct PlotTables {
  std::string factors;     // iteration,class,factor_normalized
  std::string objectives;  // iteration,class,mean,mean_avg
  std::string summary;     // key,value
};

PlotTables emit_plot_data(const RunSummary& summary);

// Writes factors.csv, objectives.csv and summary.csv into `dir`.
void write_plot_data(const RunSummary& summary, const std::filesystem::path& dir);

struct FactorRow {
  int iteration = 0;
  std::string class_name;
  double factor = 0.0;
  bool operator==(const FactorRow&) const = default;
};

struct ObjectiveRow {
  int iteration = 0;
  std::string class_name;
  double mean = 0.0;
  double mean_avg = 0.0;
  bool operator==(const ObjectiveRow&) const = default;
};

std::vector<FactorRow> parse_factor_table(std::string_view csv);
std::vector<ObjectiveRow> parse_objective_table(std::string_view csv);

struct OracleResult {
  double step = 0.0;
  double budget = 0.0;
  std::size_t evaluated = 0;
  std::vector<double> best_allocation;  // samples per class
  double best_variance = 0.0;
  std::vector<double> optimizer_allocation;
  double optimizer_variance = 0.0;
};

// Exhaustive search over allocations of `budget` samples to at most three
// classes in steps of `step * budget` (every class gets at least one step).
// Minimizes the population variance of the noiseless plateau objectives;
// ties go to the lexicographically smallest allocation.
OracleResult grid_oracle(const LearningCurveParams& params, double budget, double step);

// Fills the optimizer side of an oracle comparison.
void attach_allocation(OracleResult& result, const LearningCurveParams& params, const std::vector<std::size_t>& quotas);

}  // namespace distopt
