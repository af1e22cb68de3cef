#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "distopt/sampler.hpp"
#include "distopt/trainer.hpp"

namespace distopt {

// Request bundle layout. The bundle directory path is passed to the external
// trainer as its final argument; the trainer writes kResponseFile into it.
inline constexpr std::string_view kManifestFile = "manifest.csv";
inline constexpr std::string_view kSampleFile = "sample.json";
inline constexpr std::string_view kRequestFile = "request.json";
inline constexpr std::string_view kResponseFile = "response.json";

std::string request_to_json(const TrainerRequest& request);
TrainerRequest request_from_json(std::string_view text);

std::string response_to_json(const TrainerResponse& response);

// Parses a response document. Bare NaN/Infinity tokens, null, and the strings
// "nan", "inf", "-inf" are read as non-finite values so they can be reported
// as NonFiniteObjective instead of a parse failure.
TrainerResponse response_from_json(std::string_view text);

void write_request_bundle(const std::filesystem::path& dir, const TrainerRequest& request,
                          const SampledManifest& sample);

}  // namespace distopt
