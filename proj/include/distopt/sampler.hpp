#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "distopt/manifest.hpp"

namespace distopt {

// Round half to even.
double round_half_even(double x);

// max(1, round_half_even(max_samples * factor)), never more than max_samples.
std::size_t compute_quota(std::size_t max_samples, double factor);

struct QuotaVector {
  std::vector<std::size_t> counts;
  int iteration = 0;
};

// The training subset handed to a trainer for one iteration.
struct SampledManifest {
  std::vector<std::string> classes;
  std::vector<SampleRecord> samples;  // locator order
  std::vector<std::size_t> quotas;
  std::uint64_t seed = 0;
  int iteration = 0;

  std::vector<std::size_t> class_counts() const;

  // Same `locator,label` table as DatasetManifest::to_csv().
  std::string to_csv() const;

  // Sidecar JSON: {"seed", "iteration", "classes", "quotas"}.
  std::string metadata_json() const;
};

// Draws a uniform random subset of exactly quotas.counts[c] samples from each
// class. Class c uses an independent stream seeded by
// mix_seed(base_seed, iteration, c) and a partial Fisher-Yates shuffle of the
// class members in locator order.
SampledManifest sample_subset(const DatasetManifest& manifest, const QuotaVector& quotas,
                              std::uint64_t base_seed);

}  // namespace distopt
