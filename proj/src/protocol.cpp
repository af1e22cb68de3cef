#include "distopt/protocol.hpp"

#include <cctype>
#include <cmath>
#include <json.hpp>
#include <limits>

#include "distopt/error.hpp"
#include "distopt/text_io.hpp"

namespace distopt {

using nlohmann::ordered_json;

void validate_request(const TrainerRequest& request) {
  const auto& w = request.window;
  if (!(w.first >= 0 && w.last >= w.first && request.epochs > w.last)) {
    throw Error(ErrorCode::kConfigInvalid, "request needs epochs > window_end >= window_start >= 0");
  }
  require_supported_objective(request.objective);
}

void validate_response(const TrainerRequest& request, const TrainerResponse& response) {
  if (response.classes != request.class_table) {
    throw Error(ErrorCode::kDimensionMismatch, "response class table differs from request");
  }
  const auto& m = response.matrix;
  if (m.num_classes() != request.class_table.size() || m.num_epochs() != static_cast<std::size_t>(request.epochs)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(request.class_table.size()) + "x" + std::to_string(request.epochs) +
                    " matrix, got " + std::to_string(m.num_classes()) + "x" + std::to_string(m.num_epochs()));
  }
  m.validate(request.window);
  for (std::size_t c = 0; c < m.num_classes(); ++c) {
    for (std::size_t i = 0; i < m.num_epochs(); ++i) {
      const double v = m.at(c, i);
      if (v < 0.0 || v > 1.0) {
        throw Error(ErrorCode::kMalformedResponse, "objective " + format_double(v) + " outside [0, 1] for class " +
                                                       response.classes[c] + " epoch " + std::to_string(i));
      }
    }
  }
}

std::string request_to_json(const TrainerRequest& r) {
  ordered_json j;
  j["run_id"] = r.run_id;
  j["iteration"] = r.iteration;
  j["epochs"] = r.epochs;
  j["window_start"] = r.window.first;
  j["window_end"] = r.window.last;
  j["objective"] = r.objective;
  j["seed"] = r.seed;
  j["class_table"] = r.class_table;
  return j.dump(2) + "\n";
}

TrainerRequest request_from_json(std::string_view text) {
  try {
    const auto j = ordered_json::parse(text);
    TrainerRequest r;
    r.run_id = j.at("run_id").get<std::string>();
    r.iteration = j.at("iteration").get<int>();
    r.epochs = j.at("epochs").get<int>();
    r.window = {j.at("window_start").get<int>(), j.at("window_end").get<int>()};
    r.objective = j.at("objective").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.class_table = j.at("class_table").get<std::vector<std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigInvalid, std::string("bad request document: ") + e.what());
  }
}

std::string response_to_json(const TrainerResponse& r) {
  ordered_json j;
  j["classes"] = r.classes;
  j["epochs"] = r.matrix.num_epochs();
  ordered_json rows = ordered_json::array();
  for (std::size_t c = 0; c < r.matrix.num_classes(); ++c) {
    ordered_json row = ordered_json::array();
    for (double v : r.matrix.row(c)) {
      if (std::isfinite(v)) {
        row.push_back(v);
      } else {
        row.push_back(std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf"));
      }
    }
    rows.push_back(std::move(row));
  }
  j["values"] = std::move(rows);
  j["trainer"] = {{"name", r.trainer.name},
                  {"version", r.trainer.version},
                  {"wall_time_seconds", r.trainer.wall_time_seconds}};
  return j.dump(2) + "\n";
}

namespace {

// Rewrites bare NaN / Infinity / -Infinity tokens outside string literals
// as the strings read_value() understands, which nlohmann::json accepts.
std::string sanitize_non_finite(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_string) {
      out += ch;
      if (ch == '\\' && i + 1 < text.size()) {
        out += text[++i];
      } else if (ch == '"') {
        in_string = false;
      }
      continue;
    }
    if (ch == '"') {
      in_string = true;
      out += ch;
      continue;
    }
    bool replaced = false;
    static constexpr std::pair<std::string_view, std::string_view> kTokens[] = {
        {"-Infinity", "\"-inf\""}, {"Infinity", "\"inf\""}, {"NaN", "\"nan\""}};
    for (const auto& [token, replacement] : kTokens) {
      if (text.substr(i, token.size()) == token) {
        out += replacement;
        i += token.size() - 1;
        replaced = true;
        break;
      }
    }
    if (!replaced) out += ch;
  }
  return out;
}

double read_value(const ordered_json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    if (s == "-inf" || s == "-infinity") return -std::numeric_limits<double>::infinity();
  }
  throw Error(ErrorCode::kMalformedResponse, "objective value is not a number: " + v.dump());
}

}  // namespace

TrainerResponse response_from_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(sanitize_non_finite(text));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedResponse, std::string("unparseable response: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kMalformedResponse, "response must be a JSON object");

  TrainerResponse r;
  try {
    r.classes = j.at("classes").get<std::vector<std::string>>();
    const auto& values = j.at("values");
    if (!values.is_array()) throw Error(ErrorCode::kMalformedResponse, "'values' must be an array of rows");
    std::vector<std::vector<double>> rows;
    for (const auto& row : values) {
      if (!row.is_array()) throw Error(ErrorCode::kMalformedResponse, "'values' rows must be arrays");
      std::vector<double> parsed;
      for (const auto& v : row) parsed.push_back(read_value(v));
      rows.push_back(std::move(parsed));
    }
    r.matrix = ObjectiveMatrix(rows);
    if (j.contains("epochs") && j.at("epochs").get<std::size_t>() != r.matrix.num_epochs() && !rows.empty()) {
      throw Error(ErrorCode::kDimensionMismatch, "'epochs' disagrees with row length");
    }
    if (j.contains("trainer")) {
      const auto& t = j.at("trainer");
      r.trainer.name = t.value("name", "");
      r.trainer.version = t.value("version", "");
      r.trainer.wall_time_seconds = t.value("wall_time_seconds", 0.0);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedResponse, std::string("bad response document: ") + e.what());
  }
  return r;
}

void write_request_bundle(const std::filesystem::path& dir, const TrainerRequest& request,
                          const SampledManifest& sample) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / kManifestFile, sample.to_csv());
  write_file_atomic(dir / kSampleFile, sample.metadata_json());
  write_file_atomic(dir / kRequestFile, request_to_json(request));
}

}  // namespace distopt
