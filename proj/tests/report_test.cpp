#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "distopt/orchestrator.hpp"
#include "distopt/report.hpp"
#include "distopt/text_io.hpp"
#include "scenarios.hpp"
#include "support.hpp"

using namespace distopt;

namespace {

RunHistory reference_history(const std::filesystem::path& dir, int iterations = 150) {
  auto cfg = scenarios::default_asymmetric();
  cfg.iterations = iterations;
  return run(cfg, dir);
}

LearningCurveParams noiseless(const std::vector<LearningCurve>& curves) {
  LearningCurveParams p;
  p.curves = curves;
  return p;
}

}  // namespace

TEST_CASE("summary matches a recomputation from the records") {
  ScratchDir dir("report_summary");
  const auto h = reference_history(dir.path);
  const auto s = summarize(h);
  const auto& last = h.records.back();
  double m = 0.0;
  for (double v : last.means) m += v;
  m /= static_cast<double>(last.means.size());
  double var = 0.0;
  for (double v : last.means) var += (v - m) * (v - m);
  var /= static_cast<double>(last.means.size());
  CHECK(s.final_variance == doctest::Approx(var).epsilon(1e-15));
  CHECK(s.final_variance == variance_of(last.means));
  CHECK(s.final_mean == doctest::Approx(m).epsilon(1e-15));
  CHECK(s.mean_avg_series.size() == h.records.size());
  CHECK(s.final_factors == last.next_factors);
  std::size_t total = 0;
  for (auto q : last.quotas) total += q;
  CHECK(s.total_samples == total);
  CHECK(s.status == RunStatus::kConverged);
  double norm = 0.0;
  for (double v : s.final_normalized) norm += v;
  CHECK(std::abs(norm - 1.0) <= 1e-9);
  for (std::size_t i = 0; i < h.records.size(); ++i) {
    CHECK(s.mean_avg_series[i] == h.records[i].mean_avg);
    CHECK(s.class_mean_series[i] == h.records[i].means);
  }
}

TEST_CASE("single iteration series") {
  ScratchDir dir("report_one");
  const auto s = summarize(reference_history(dir.path, 1));
  CHECK(s.mean_avg_series.size() == 1);
  CHECK(s.normalized_series.size() == 1);
  CHECK(s.class_mean_series.size() == 1);
}

TEST_CASE("equal means give zero variance") {
  RunHistory h;
  h.classes = {"a", "b"};
  IterationRecord r;
  r.factors = r.next_factors = {0.5, 0.5};
  r.normalized_factors = {0.5, 0.5};
  r.quotas = {10, 10};
  r.means = {0.7, 0.7};
  h.records.push_back(r);
  CHECK(summarize(h).final_variance == 0.0);
  CHECK_ERROR_CODE(summarize(RunHistory{}), ErrorCode::kConfigInvalid);
}

TEST_CASE("plot table cardinality and re-emission") {
  // 150 iterations of 10 classes, all recorded.
  ScratchDir dir("report_tables");
  auto cfg = scenarios::ten_class();
  cfg.convergence.patience = 1000;
  cfg.convergence.tol_factor = 1e-300;
  const auto h = run(cfg, dir.path);
  REQUIRE(h.records.size() == 150);
  const auto s = summarize(h);
  const auto t = emit_plot_data(s);
  const auto factors = parse_factor_table(t.factors);
  CHECK(factors.size() == 1500);
  CHECK(parse_objective_table(t.objectives).size() == 1500);
  const auto again = emit_plot_data(summarize(h));
  CHECK(again.factors == t.factors);
  CHECK(again.objectives == t.objectives);
  CHECK(again.summary == t.summary);
  CHECK(factors[13].iteration == 1);
  CHECK(factors[13].class_name == "class3");
  CHECK(factors[13].factor == h.records[1].normalized_factors[3]);
}

TEST_CASE("plotting script round-trips the tables") {
  ScratchDir dir("report_plot");
  const auto h = reference_history(dir.path);
  write_plot_data(summarize(h), dir.path);
  const auto out = dir.path / "re";
  const std::string cmd = "python3 " + std::string(DISTOPT_SOURCE_DIR) + "/tools/plot_run.py --roundtrip " +
                          (dir.path).string() + " " + out.string();
  REQUIRE(std::system(cmd.c_str()) == 0);
  const auto a = parse_factor_table(read_text_file(dir.path / "factors.csv"));
  const auto b = parse_factor_table(read_text_file(out / "factors.csv"));
  CHECK(a == b);
  const auto c = parse_objective_table(read_text_file(dir.path / "objectives.csv"));
  const auto d = parse_objective_table(read_text_file(out / "objectives.csv"));
  CHECK(c == d);
}

TEST_CASE("oracle on symmetric curves picks the equal split") {
  const auto r = grid_oracle(noiseless({{0.9, 1.0, 0.5}, {0.9, 1.0, 0.5}}), 1000.0, 0.01);
  CHECK(r.best_allocation == std::vector<double>{500.0, 500.0});
  CHECK(r.evaluated == 99);
  const auto r3 = grid_oracle(noiseless({{0.9, 1.0, 0.5}, {0.9, 1.0, 0.5}, {0.9, 1.0, 0.5}}), 1200.0, 1.0 / 3.0);
  CHECK(r3.best_allocation == std::vector<double>{400.0, 400.0, 400.0});
}

TEST_CASE("oracle on asymmetric curves") {
  const auto p = noiseless({{0.9, 0.5, 0.5}, {0.9, 2.0, 0.5}});
  const auto r = grid_oracle(p, 1000.0, 0.01);
  // Equal plateaus need d2 / d1 = (2.0 / 0.5)^2 = 16, i.e. d1 = 1000 / 17.
  CHECK(r.best_allocation == std::vector<double>{60.0, 940.0});
  CHECK(r.best_allocation[1] > r.best_allocation[0]);

  // The exhaustive grid agrees with a direct scan.
  double best = INFINITY;
  int arg = 0;
  for (int k = 1; k < 100; ++k) {
    const double v = variance_of(plateau_objectives(p, {10.0 * k, 1000.0 - 10.0 * k}));
    if (v < best) {
      best = v;
      arg = k;
    }
  }
  CHECK(r.best_allocation[0] == 10.0 * arg);
  CHECK(r.best_variance == best);
}

TEST_CASE("no grid allocation beats the oracle") {
  const auto p = noiseless({{0.9, 1.0, 0.5}, {0.85, 2.0, 0.4}, {0.95, 3.0, 0.6}});
  const double budget = 3000.0;
  const auto r = grid_oracle(p, budget, 0.05);
  CHECK(r.evaluated == 171);  // compositions of 20 units into 3 positive parts
  for (int a = 1; a < 20; ++a) {
    for (int b = 1; a + b < 20; ++b) {
      const std::vector<double> alloc{150.0 * a, 150.0 * b, 150.0 * (20 - a - b)};
      CHECK(r.best_variance <= variance_of(plateau_objectives(p, alloc)));
    }
  }
}

TEST_CASE("oracle comparison fields") {
  const auto p = noiseless({{0.9, 0.5, 0.5}, {0.9, 2.0, 0.5}});
  auto r = grid_oracle(p, 1000.0, 0.01);
  attach_allocation(r, p, {59, 941});
  CHECK(r.optimizer_allocation == std::vector<double>{59.0, 941.0});
  CHECK(r.optimizer_variance == variance_of(plateau_objectives(p, {59.0, 941.0})));
}

TEST_CASE("oracle argument errors") {
  const auto two = noiseless({{0.9, 0.5, 0.5}, {0.9, 2.0, 0.5}});
  CHECK_ERROR_CODE(grid_oracle(two, 1.0, 0.5), ErrorCode::kBudgetTooSmall);
  CHECK_ERROR_CODE(grid_oracle(two, 1000.0, 0.3), ErrorCode::kConfigInvalid);
  CHECK_ERROR_CODE(grid_oracle(noiseless({{0.9, 1, 0.5}}), 1000.0, 0.1), ErrorCode::kConfigInvalid);
  auto noisy = two;
  noisy.noise = 0.1;
  CHECK_ERROR_CODE(grid_oracle(noisy, 1000.0, 0.1), ErrorCode::kConfigInvalid);
}
