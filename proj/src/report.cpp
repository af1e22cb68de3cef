#include "distopt/report.hpp"

#include <cmath>
#include <functional>

#include "distopt/error.hpp"
#include "distopt/text_io.hpp"

namespace distopt {

RunSummary summarize(const RunHistory& history) {
  if (history.records.empty()) throw Error(ErrorCode::kConfigInvalid, "cannot summarize an empty history");
  RunSummary s;
  s.classes = history.classes;
  s.status = history.status;
  for (const auto& r : history.records) {
    s.mean_avg_series.push_back(r.mean_avg);
    s.class_mean_series.push_back(r.means);
    s.normalized_series.push_back(r.normalized_factors);
  }
  const auto& last = history.records.back();
  s.final_factors = last.next_factors;
  double sum = 0.0;
  for (double f : s.final_factors) sum += f;
  for (double f : s.final_factors) s.final_normalized.push_back(f / sum);
  s.final_mean = mean_of(last.means);
  s.final_variance = variance_of(last.means);
  for (auto q : last.quotas) s.total_samples += q;
  return s;
}

PlotTables emit_plot_data(const RunSummary& s) {
  PlotTables t;
  t.factors = "iteration,class,factor_normalized\n";
  t.objectives = "iteration,class,mean,mean_avg\n";
  for (std::size_t i = 0; i < s.normalized_series.size(); ++i) {
    for (std::size_t c = 0; c < s.classes.size(); ++c) {
      const std::string prefix = std::to_string(i) + "," + csv_escape(s.classes[c]) + ",";
      t.factors += prefix + format_double(s.normalized_series[i][c]) + "\n";
      t.objectives +=
          prefix + format_double(s.class_mean_series[i][c]) + "," + format_double(s.mean_avg_series[i]) + "\n";
    }
  }
  t.summary = "key,value\n";
  t.summary += "status," + std::string(to_string(s.status)) + "\n";
  t.summary += "iterations," + std::to_string(s.mean_avg_series.size()) + "\n";
  t.summary += "final_mean," + format_double(s.final_mean) + "\n";
  t.summary += "final_variance," + format_double(s.final_variance) + "\n";
  t.summary += "total_samples," + std::to_string(s.total_samples) + "\n";
  for (std::size_t c = 0; c < s.classes.size(); ++c) {
    t.summary += "factor:" + csv_escape(s.classes[c]) + "," + format_double(s.final_factors[c]) + "\n";
  }
  for (std::size_t c = 0; c < s.classes.size(); ++c) {
    t.summary += "factor_normalized:" + csv_escape(s.classes[c]) + "," + format_double(s.final_normalized[c]) + "\n";
  }
  return t;
}

void write_plot_data(const RunSummary& summary, const std::filesystem::path& dir) {
  const PlotTables t = emit_plot_data(summary);
  write_file_atomic(dir / "factors.csv", t.factors);
  write_file_atomic(dir / "objectives.csv", t.objectives);
  write_file_atomic(dir / "summary.csv", t.summary);
}

std::vector<FactorRow> parse_factor_table(std::string_view csv) {
  auto rows = parse_csv(csv);
  std::vector<FactorRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 3) throw Error(ErrorCode::kMalformedResponse, "factor table row " + std::to_string(i));
    out.push_back({std::stoi(r[0]), r[1], parse_double(r[2])});
  }
  return out;
}

std::vector<ObjectiveRow> parse_objective_table(std::string_view csv) {
  auto rows = parse_csv(csv);
  std::vector<ObjectiveRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 4) throw Error(ErrorCode::kMalformedResponse, "objective table row " + std::to_string(i));
    out.push_back({std::stoi(r[0]), r[1], parse_double(r[2]), parse_double(r[3])});
  }
  return out;
}

OracleResult grid_oracle(const LearningCurveParams& params, double budget, double step) {
  const std::size_t n = params.curves.size();
  if (n < 2 || n > 3) throw Error(ErrorCode::kConfigInvalid, "grid oracle supports 2 or 3 classes");
  if (params.noise != 0.0) throw Error(ErrorCode::kConfigInvalid, "grid oracle needs a noiseless simulator");
  if (!(step > 0.0 && step <= 1.0)) throw Error(ErrorCode::kConfigInvalid, "step must lie in (0, 1]");
  const double steps_real = 1.0 / step;
  const auto steps = static_cast<long>(std::lround(steps_real));
  if (std::abs(steps_real - static_cast<double>(steps)) > 1e-9 || steps < static_cast<long>(n)) {
    throw Error(ErrorCode::kConfigInvalid, "step must divide 1 into at least one step per class");
  }
  if (budget < static_cast<double>(n)) {
    throw Error(ErrorCode::kBudgetTooSmall, "budget must cover at least one sample per class");
  }
  params.validate();

  OracleResult result;
  result.step = step;
  result.budget = budget;
  result.best_variance = INFINITY;

  std::vector<long> units(n);
  std::vector<double> alloc(n);
  // Units enumerated in lexicographic order, so a strict improvement test
  // keeps the smallest allocation among ties.
  std::function<void(std::size_t, long)> visit = [&](std::size_t c, long remaining) {
    if (c + 1 == n) {
      units[c] = remaining;
      for (std::size_t k = 0; k < n; ++k) alloc[k] = budget * static_cast<double>(units[k]) / static_cast<double>(steps);
      const double var = variance_of(plateau_objectives(params, alloc));
      ++result.evaluated;
      if (var < result.best_variance) {
        result.best_variance = var;
        result.best_allocation = alloc;
      }
      return;
    }
    const long slots_left = static_cast<long>(n - c - 1);
    for (long u = 1; u <= remaining - slots_left; ++u) {
      units[c] = u;
      visit(c + 1, remaining - u);
    }
  };
  visit(0, steps);
  return result;
}

void attach_allocation(OracleResult& result, const LearningCurveParams& params, const std::vector<std::size_t>& quotas) {
  result.optimizer_allocation.assign(quotas.begin(), quotas.end());
  result.optimizer_variance = variance_of(plateau_objectives(params, result.optimizer_allocation));
}

}  // namespace distopt
