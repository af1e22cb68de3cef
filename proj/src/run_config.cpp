#include "distopt/run_config.hpp"

#include <json.hpp>

#include "distopt/error.hpp"
#include "distopt/text_io.hpp"

namespace distopt {

using nlohmann::ordered_json;

std::string_view to_string(TrainerKind kind) {
  switch (kind) {
    case TrainerKind::kSimulator: return "sim";
    case TrainerKind::kMicro: return "micro";
    case TrainerKind::kExternal: return "external";
  }
  return "?";
}

TrainerKind trainer_kind_from_string(std::string_view text) {
  if (text == "sim") return TrainerKind::kSimulator;
  if (text == "micro") return TrainerKind::kMicro;
  if (text == "external") return TrainerKind::kExternal;
  throw Error(ErrorCode::kConfigInvalid, "unknown trainer kind '" + std::string(text) + "'");
}

namespace {

template <typename T>
void read_opt(const ordered_json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

template <typename T>
void read_into(const ordered_json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

ClassSettings class_settings_from(const ordered_json& j) {
  ClassSettings s;
  read_opt(j, "max_samples", s.max_samples);
  read_opt(j, "factor", s.factor);
  read_opt(j, "lower", s.lower);
  read_opt(j, "upper", s.upper);
  read_opt(j, "offset", s.offset);
  return s;
}

ordered_json to_json(const ClassSettings& s) {
  ordered_json j = ordered_json::object();
  if (s.max_samples) j["max_samples"] = *s.max_samples;
  if (s.factor) j["factor"] = *s.factor;
  if (s.lower) j["lower"] = *s.lower;
  if (s.upper) j["upper"] = *s.upper;
  if (s.offset) j["offset"] = *s.offset;
  return j;
}

LearningCurve curve_from(const ordered_json& j, const LearningCurve& base) {
  LearningCurve k = base;
  read_into(j, "ceiling", k.ceiling);
  read_into(j, "difficulty", k.difficulty);
  read_into(j, "exponent", k.exponent);
  return k;
}

ordered_json to_json(const LearningCurve& k) {
  return {{"ceiling", k.ceiling}, {"difficulty", k.difficulty}, {"exponent", k.exponent}};
}

RunConfig config_from_json(const ordered_json& j) {
  RunConfig c;
  read_into(j, "run_id", c.run_id);

  if (j.contains("manifest")) {
    const auto& m = j.at("manifest");
    if (m.is_string()) {
      c.manifest.path = m.get<std::string>();
    } else {
      const auto& syn = m.at("synthetic");
      c.manifest.synthetic_classes = syn.at("classes").get<std::vector<std::string>>();
      if (syn.at("per_class").is_array()) {
        c.manifest.synthetic_counts = syn.at("per_class").get<std::vector<std::size_t>>();
      } else {
        c.manifest.synthetic_counts.assign(c.manifest.synthetic_classes.size(), syn.at("per_class").get<std::size_t>());
      }
    }
  }

  if (j.contains("class_defaults")) c.class_defaults = class_settings_from(j.at("class_defaults"));
  if (j.contains("classes")) {
    for (const auto& [name, value] : j.at("classes").items()) c.class_overrides[name] = class_settings_from(value);
  }

  if (j.contains("trainer")) {
    const auto& t = j.at("trainer");
    c.trainer.kind = trainer_kind_from_string(t.value("kind", std::string("sim")));
    auto& sim = c.trainer.simulator;
    read_into(t, "ramp_epochs", sim.ramp_epochs);
    read_into(t, "noise", sim.noise);
    if (t.contains("curve_defaults")) sim.curve_defaults = curve_from(t.at("curve_defaults"), LearningCurve{});
    if (t.contains("curves")) {
      for (const auto& [name, value] : t.at("curves").items()) {
        sim.curves[name] = curve_from(value, sim.curve_defaults.value_or(LearningCurve{}));
      }
    }
    auto& micro = c.trainer.micro;
    read_into(t, "validation_per_class", micro.validation_per_class);
    read_into(t, "learning_rate", micro.learning_rate);
    read_into(t, "steps_per_epoch", micro.steps_per_epoch);
    if (t.contains("clusters")) {
      for (const auto& [name, value] : t.at("clusters").items()) {
        micro.clusters[name] = {value.at("mean").get<std::vector<double>>(), value.value("spread", 1.0)};
      }
    }
    if (t.contains("seed")) {
      sim.seed = t.at("seed").get<std::uint64_t>();
      micro.seed = sim.seed;
    }
    read_into(t, "command", c.trainer.external.argv);
    read_into(t, "timeout_seconds", c.trainer.external.timeout_seconds);
  }

  read_into(j, "objective", c.objective);
  read_into(j, "iterations", c.iterations);
  read_into(j, "epochs", c.epochs);
  if (j.contains("window")) {
    const auto w = j.at("window").get<std::vector<int>>();
    if (w.size() != 2) throw Error(ErrorCode::kConfigInvalid, "window must be [first, last]");
    c.window = EpochWindow{w[0], w[1]};
  }
  read_into(j, "seed", c.seed);
  if (j.contains("convergence")) {
    const auto& cv = j.at("convergence");
    read_into(cv, "tol_factor", c.convergence.tol_factor);
    read_into(cv, "tol_variance", c.convergence.tol_variance);
    read_into(cv, "patience", c.convergence.patience);
  }
  return c;
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text) {
  RunConfig c;
  try {
    c = config_from_json(ordered_json::parse(json_text));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigInvalid, e.what());
  }
  validate_run_config(c);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) { return parse_run_config(read_text_file(path)); }

std::string run_config_to_json(const RunConfig& c) {
  ordered_json j;
  j["run_id"] = c.run_id;
  if (c.manifest.is_synthetic()) {
    j["manifest"] = {{"synthetic", {{"classes", c.manifest.synthetic_classes}, {"per_class", c.manifest.synthetic_counts}}}};
  } else {
    j["manifest"] = c.manifest.path;
  }
  if (c.class_defaults) j["class_defaults"] = to_json(*c.class_defaults);
  ordered_json classes = ordered_json::object();
  for (const auto& [name, s] : c.class_overrides) classes[name] = to_json(s);
  j["classes"] = classes;

  ordered_json t;
  t["kind"] = to_string(c.trainer.kind);
  switch (c.trainer.kind) {
    case TrainerKind::kSimulator: {
      const auto& sim = c.trainer.simulator;
      t["ramp_epochs"] = sim.ramp_epochs;
      t["noise"] = sim.noise;
      t["seed"] = sim.seed;
      if (sim.curve_defaults) t["curve_defaults"] = to_json(*sim.curve_defaults);
      ordered_json curves = ordered_json::object();
      for (const auto& [name, k] : sim.curves) curves[name] = to_json(k);
      t["curves"] = curves;
      break;
    }
    case TrainerKind::kMicro: {
      const auto& micro = c.trainer.micro;
      t["validation_per_class"] = micro.validation_per_class;
      t["seed"] = micro.seed;
      t["learning_rate"] = micro.learning_rate;
      t["steps_per_epoch"] = micro.steps_per_epoch;
      ordered_json clusters = ordered_json::object();
      for (const auto& [name, k] : micro.clusters) clusters[name] = {{"mean", k.mean}, {"spread", k.spread}};
      t["clusters"] = clusters;
      break;
    }
    case TrainerKind::kExternal:
      t["command"] = c.trainer.external.argv;
      t["timeout_seconds"] = c.trainer.external.timeout_seconds;
      break;
  }
  j["trainer"] = t;
  j["objective"] = c.objective;
  j["iterations"] = c.iterations;
  j["epochs"] = c.epochs;
  if (c.window) j["window"] = {c.window->first, c.window->last};
  j["seed"] = c.seed;
  j["convergence"] = {{"tol_factor", c.convergence.tol_factor},
                      {"tol_variance", c.convergence.tol_variance},
                      {"patience", c.convergence.patience}};
  return j.dump(2) + "\n";
}

void validate_run_config(const RunConfig& c) {
  if (c.iterations < 1) throw Error(ErrorCode::kConfigInvalid, "iterations must be >= 1");
  if (c.epochs < 1) throw Error(ErrorCode::kConfigInvalid, "epochs must be >= 1");
  const EpochWindow w = c.effective_window();
  if (!(w.first >= 0 && w.first <= w.last && w.last < c.epochs)) {
    throw Error(ErrorCode::kConfigInvalid, "epoch window must satisfy 0 <= first <= last < epochs");
  }
  if (!(c.convergence.tol_factor > 0.0) || !(c.convergence.tol_variance > 0.0) || c.convergence.patience < 1) {
    throw Error(ErrorCode::kConfigInvalid, "convergence tolerances must be positive");
  }
  require_supported_objective(c.objective);
  if (c.manifest.is_synthetic() && c.manifest.synthetic_classes.empty()) {
    throw Error(ErrorCode::kConfigInvalid, "no manifest given");
  }
  if (c.trainer.kind == TrainerKind::kExternal && c.trainer.external.argv.empty()) {
    throw Error(ErrorCode::kConfigInvalid, "external trainer needs a command");
  }
  if (c.trainer.kind == TrainerKind::kExternal && !(c.trainer.external.timeout_seconds > 0.0)) {
    throw Error(ErrorCode::kConfigInvalid, "external trainer timeout must be positive");
  }
}

DatasetManifest load_manifest(const RunConfig& c) {
  if (c.manifest.is_synthetic()) return synthetic_manifest(c.manifest.synthetic_classes, c.manifest.synthetic_counts);
  return ingest_manifest(c.manifest.path);
}

std::vector<ClassSpec> resolve_class_specs(const RunConfig& c, const DatasetManifest& manifest) {
  for (const auto& [name, s] : c.class_overrides) {
    if (!manifest.class_index(name)) throw Error(ErrorCode::kConfigInvalid, "settings for unknown class '" + name + "'");
  }
  std::vector<ClassSpec> specs;
  for (std::size_t id = 0; id < manifest.num_classes(); ++id) {
    const std::string& name = manifest.classes()[id];
    ClassSettings s = c.class_defaults.value_or(ClassSettings{});
    if (auto it = c.class_overrides.find(name); it != c.class_overrides.end()) {
      const ClassSettings& o = it->second;
      if (o.max_samples) s.max_samples = o.max_samples;
      if (o.factor) s.factor = o.factor;
      if (o.lower) s.lower = o.lower;
      if (o.upper) s.upper = o.upper;
      if (o.offset) s.offset = o.offset;
    }
    if (!s.max_samples || !s.factor || !s.lower || !s.upper) {
      throw Error(ErrorCode::kMissingClassSpec, name);
    }
    specs.push_back({static_cast<int>(id), *s.max_samples, *s.factor, *s.lower, *s.upper, s.offset.value_or(0.0)});
  }
  return validate_config(std::move(specs), manifest);
}

LearningCurveParams resolve_curves(const SimulatorSettings& settings, const DatasetManifest& manifest) {
  LearningCurveParams p;
  p.ramp_epochs = settings.ramp_epochs;
  p.noise = settings.noise;
  p.seed = settings.seed;
  for (const auto& [name, k] : settings.curves) {
    if (!manifest.class_index(name)) throw Error(ErrorCode::kConfigInvalid, "curve for unknown class '" + name + "'");
  }
  for (const auto& name : manifest.classes()) {
    if (auto it = settings.curves.find(name); it != settings.curves.end()) {
      p.curves.push_back(it->second);
    } else if (settings.curve_defaults) {
      p.curves.push_back(*settings.curve_defaults);
    } else {
      throw Error(ErrorCode::kConfigInvalid, "no learning curve for class '" + name + "'");
    }
  }
  p.validate();
  return p;
}

SyntheticTask resolve_task(const MicroSettings& settings, const DatasetManifest& manifest) {
  SyntheticTask t;
  t.validation_per_class = settings.validation_per_class;
  t.seed = settings.seed;
  t.learning_rate = settings.learning_rate;
  t.steps_per_epoch = settings.steps_per_epoch;
  for (const auto& name : manifest.classes()) {
    auto it = settings.clusters.find(name);
    if (it == settings.clusters.end()) throw Error(ErrorCode::kConfigInvalid, "no cluster for class '" + name + "'");
    t.clusters.push_back(it->second);
  }
  t.validate();
  return t;
}

std::unique_ptr<Trainer> make_trainer(const RunConfig& c, const DatasetManifest& manifest,
                                      const std::filesystem::path& work_dir) {
  switch (c.trainer.kind) {
    case TrainerKind::kSimulator:
      return std::make_unique<SimulatedTrainer>(resolve_curves(c.trainer.simulator, manifest));
    case TrainerKind::kMicro:
      return std::make_unique<MicroTrainer>(resolve_task(c.trainer.micro, manifest));
    case TrainerKind::kExternal:
      return std::make_unique<ExternalTrainer>(c.trainer.external, work_dir);
  }
  throw Error(ErrorCode::kConfigInvalid, "unknown trainer kind");
}

}  // namespace distopt
