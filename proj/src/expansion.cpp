#include <cmath>

#include "distopt/error.hpp"
#include "distopt/orchestrator.hpp"
#include "distopt/sampler.hpp"

namespace distopt {

ExpansionResult expand_distribution(std::span<const double> factors, std::span<const std::size_t> availability,
                                    int anchor) {
  if (factors.size() != availability.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one availability per factor required");
  }
  if (anchor < 0 || static_cast<std::size_t>(anchor) >= factors.size()) {
    throw Error(ErrorCode::kConfigInvalid, "anchor class out of range");
  }
  const auto a = static_cast<std::size_t>(anchor);
  if (!(factors[a] > 0.0)) throw Error(ErrorCode::kZeroAnchorFactor, "anchor factor must be positive");

  ExpansionResult out;
  out.quotas.resize(factors.size());
  out.capped.assign(factors.size(), false);
  const double anchor_count = static_cast<double>(availability[a]);
  for (std::size_t c = 0; c < factors.size(); ++c) {
    if (c == a) {
      out.quotas[c] = availability[a];
      continue;
    }
    const double raw = round_half_even(factors[c] / factors[a] * anchor_count);
    std::size_t q = raw < 1.0 ? 1 : static_cast<std::size_t>(raw);
    if (q > availability[c]) {
      out.warnings.push_back("class " + std::to_string(c) + ": expanded quota " + std::to_string(q) +
                             " capped at availability " + std::to_string(availability[c]));
      q = availability[c];
      out.capped[c] = true;
    }
    out.quotas[c] = q;
  }
  return out;
}

}  // namespace distopt
