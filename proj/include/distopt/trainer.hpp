#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "distopt/optimizer.hpp"
#include "distopt/sampler.hpp"

namespace distopt {

struct TrainerRequest {
  std::string run_id;
  int iteration = 0;
  int epochs = 1;
  EpochWindow window;
  std::string objective = "accuracy";
  std::uint64_t seed = 0;
  std::vector<std::string> class_table;

  bool operator==(const TrainerRequest&) const = default;
};

struct TrainerMetadata {
  std::string name;
  std::string version;
  double wall_time_seconds = 0.0;

  bool operator==(const TrainerMetadata&) const = default;
};

struct TrainerResponse {
  std::vector<std::string> classes;
  ObjectiveMatrix matrix;  // classes x epochs
  TrainerMetadata trainer;

  bool operator==(const TrainerResponse&) const = default;
};

// Throws ConfigInvalid unless epochs > window.last >= window.first >= 0 and
// the objective is on the allow-list.
void validate_request(const TrainerRequest& request);

// Checks a response against the request it answers: class table, matrix
// shape, finiteness, values within [0, 1] and strictly positive inside the
// window.
void validate_response(const TrainerRequest& request, const TrainerResponse& response);

class Trainer {
 public:
  virtual ~Trainer() = default;

  virtual TrainerResponse train(const TrainerRequest& request, const SampledManifest& sample) = 0;
};

}  // namespace distopt
