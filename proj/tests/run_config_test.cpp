#include <doctest.h>

#include "distopt/run_config.hpp"
#include "scenarios.hpp"
#include "support.hpp"

using namespace distopt;

namespace {

const char* kConfig = R"({
  "run_id": "cfg",
  "manifest": {"synthetic": {"classes": ["cat", "dog", "eel"], "per_class": [100, 200, 300]}},
  "class_defaults": {"max_samples": 100, "factor": 0.5, "lower": 0.05, "upper": 0.95},
  "classes": {"eel": {"max_samples": 300, "offset": 0.05, "factor": 0.25}},
  "trainer": {"kind": "sim", "ramp_epochs": 3, "noise": 0.01, "seed": 5,
              "curve_defaults": {"ceiling": 0.9, "difficulty": 2, "exponent": 0.5},
              "curves": {"dog": {"difficulty": 4}}},
  "objective": "recall",
  "iterations": 20,
  "epochs": 6,
  "window": [3, 5],
  "seed": 99,
  "convergence": {"tol_factor": 0.02, "patience": 3}
})";

}  // namespace

TEST_CASE("config parse and resolve") {
  const RunConfig c = parse_run_config(kConfig);
  CHECK(c.run_id == "cfg");
  CHECK(c.objective == "recall");
  CHECK(c.effective_window() == EpochWindow{3, 5});
  CHECK(c.convergence.tol_factor == 0.02);
  CHECK(c.convergence.tol_variance == 1e-4);
  CHECK(c.convergence.patience == 3);

  const auto m = load_manifest(c);
  const auto specs = resolve_class_specs(c, m);
  REQUIRE(specs.size() == 3);
  CHECK(specs[0] == ClassSpec{0, 100, 0.5, 0.05, 0.95, 0.0});
  CHECK(specs[2] == ClassSpec{2, 300, 0.25, 0.05, 0.95, 0.05});

  const auto curves = resolve_curves(c.trainer.simulator, m);
  CHECK(curves.curves[0] == LearningCurve{0.9, 2.0, 0.5});
  CHECK(curves.curves[1] == LearningCurve{0.9, 4.0, 0.5});
  CHECK(curves.ramp_epochs == 3);
}

TEST_CASE("config canonical round trip") {
  const RunConfig c = parse_run_config(kConfig);
  const std::string text = run_config_to_json(c);
  CHECK(parse_run_config(text) == c);
  CHECK(run_config_to_json(parse_run_config(text)) == text);

  const RunConfig s = scenarios::default_asymmetric();
  CHECK(parse_run_config(run_config_to_json(s)) == s);
}

TEST_CASE("config errors") {
  CHECK_ERROR_CODE(parse_run_config("{"), ErrorCode::kConfigInvalid);
  CHECK_ERROR_CODE(parse_run_config(R"({"manifest": "m.csv", "objective": "f1"})"), ErrorCode::kConfigInvalid);
  CHECK_ERROR_CODE(parse_run_config(R"({"manifest": "m.csv", "iterations": 0})"), ErrorCode::kConfigInvalid);
  CHECK_ERROR_CODE(parse_run_config(R"({"manifest": "m.csv", "epochs": 5, "window": [2, 5]})"),
                   ErrorCode::kConfigInvalid);
  CHECK_ERROR_CODE(parse_run_config(R"({"manifest": "m.csv", "trainer": {"kind": "external"}})"),
                   ErrorCode::kConfigInvalid);
  CHECK_ERROR_CODE(parse_run_config(R"({"manifest": "m.csv", "trainer": {"kind": "gpu"}})"),
                   ErrorCode::kConfigInvalid);
  CHECK_ERROR_CODE(parse_run_config(R"({"iterations": 3})"), ErrorCode::kConfigInvalid);

  RunConfig c = parse_run_config(kConfig);
  const auto m = load_manifest(c);
  c.class_overrides["fox"] = ClassSettings{};
  CHECK_ERROR_CODE(resolve_class_specs(c, m), ErrorCode::kConfigInvalid);
  c = parse_run_config(kConfig);
  c.class_defaults->factor.reset();
  CHECK_ERROR_CODE(resolve_class_specs(c, m), ErrorCode::kMissingClassSpec);
  c = parse_run_config(kConfig);
  c.class_overrides["dog"].max_samples = 201;
  CHECK_ERROR_CODE(resolve_class_specs(c, m), ErrorCode::kAvailabilityExceeded);
  c = parse_run_config(kConfig);
  c.trainer.simulator.curve_defaults.reset();
  CHECK_ERROR_CODE(resolve_curves(c.trainer.simulator, m), ErrorCode::kConfigInvalid);
}

TEST_CASE("trainer factory") {
  RunConfig c = parse_run_config(kConfig);
  const auto m = load_manifest(c);
  CHECK(dynamic_cast<SimulatedTrainer*>(make_trainer(c, m, "/tmp").get()) != nullptr);
  c.trainer.kind = TrainerKind::kMicro;
  CHECK_ERROR_CODE(make_trainer(c, m, "/tmp"), ErrorCode::kConfigInvalid);
  for (const auto& name : m.classes()) c.trainer.micro.clusters[name] = {{0.0, 1.0}, 1.0};
  CHECK(dynamic_cast<MicroTrainer*>(make_trainer(c, m, "/tmp").get()) != nullptr);
  c.trainer.kind = TrainerKind::kExternal;
  c.trainer.external.argv = {"true"};
  CHECK(dynamic_cast<ExternalTrainer*>(make_trainer(c, m, "/tmp").get()) != nullptr);
  CHECK(trainer_kind_from_string(to_string(TrainerKind::kMicro)) == TrainerKind::kMicro);
}
