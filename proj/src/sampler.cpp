#include "distopt/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "distopt/error.hpp"
#include "distopt/random.hpp"
#include "distopt/text_io.hpp"

namespace distopt {

double round_half_even(double x) {
  const double lo = std::floor(x);
  const double diff = x - lo;
  if (diff > 0.5) return lo + 1.0;
  if (diff < 0.5) return lo;
  return std::fmod(lo, 2.0) == 0.0 ? lo : lo + 1.0;
}

std::size_t compute_quota(std::size_t max_samples, double factor) {
  const double raw = round_half_even(static_cast<double>(max_samples) * factor);
  const auto d = raw < 1.0 ? std::size_t{1} : static_cast<std::size_t>(raw);
  return std::min(d, std::max<std::size_t>(max_samples, 1));
}

std::vector<std::size_t> SampledManifest::class_counts() const {
  std::vector<std::size_t> counts(classes.size(), 0);
  for (const auto& s : samples) ++counts[static_cast<std::size_t>(s.class_id)];
  return counts;
}

std::string SampledManifest::to_csv() const {
  std::string out = "locator,label\n";
  for (const auto& s : samples) {
    out += csv_escape(s.locator);
    out += ',';
    out += csv_escape(s.class_name);
    out += '\n';
  }
  return out;
}

std::string SampledManifest::metadata_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["iteration"] = iteration;
  j["classes"] = classes;
  j["quotas"] = quotas;
  return j.dump(2) + "\n";
}

SampledManifest sample_subset(const DatasetManifest& manifest, const QuotaVector& quotas,
                              std::uint64_t base_seed) {
  const std::size_t n = manifest.num_classes();
  if (quotas.counts.size() != n) {
    throw Error(ErrorCode::kQuotaExceedsAvailability, "quota vector length does not match class count");
  }

  std::vector<std::size_t> chosen;
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t want = quotas.counts[c];
    const auto& members = manifest.members(static_cast<int>(c));
    if (want > members.size()) {
      throw Error(ErrorCode::kQuotaExceedsAvailability,
                  manifest.classes()[c] + ": quota " + std::to_string(want) + " > available " +
                      std::to_string(members.size()));
    }
    std::vector<std::size_t> pool = members;
    Rng rng(mix_seed(base_seed, static_cast<std::uint64_t>(quotas.iteration), c));
    for (std::size_t i = 0; i < want; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    chosen.insert(chosen.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(want));
  }
  std::sort(chosen.begin(), chosen.end());

  SampledManifest out;
  out.classes = manifest.classes();
  out.quotas = quotas.counts;
  out.seed = base_seed;
  out.iteration = quotas.iteration;
  out.samples.reserve(chosen.size());
  for (std::size_t idx : chosen) out.samples.push_back(manifest.samples()[idx]);
  return out;
}

}  // namespace distopt
