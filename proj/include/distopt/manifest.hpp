#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace distopt {

struct SampleRecord {
  std::string locator;
  int class_id = 0;
  std::string class_name;

  bool operator==(const SampleRecord&) const = default;
};

// The canonical list of training samples. Classes are ordered
// lexicographically by name and samples lexicographically by locator, so the
// same set of rows always produces the same manifest regardless of input
// order. Immutable once built.
class DatasetManifest {
 public:
  // Builds a manifest from (locator, label) pairs.
  static DatasetManifest from_rows(std::vector<std::pair<std::string, std::string>> rows);

  std::size_t num_classes() const { return classes_.size(); }
  std::size_t size() const { return samples_.size(); }
  const std::vector<std::string>& classes() const { return classes_; }
  const std::vector<SampleRecord>& samples() const { return samples_; }
  const std::vector<std::size_t>& availability() const { return availability_; }

  // Indices into samples() for one class, in locator order.
  const std::vector<std::size_t>& members(int class_id) const;

  std::optional<int> class_index(std::string_view name) const;

  // Canonical `locator,label` table, LF line endings.
  std::string to_csv() const;

  // Hex FNV-1a of to_csv(); used to detect a manifest changing under a
  // checkpointed run.
  std::string content_hash() const;

  bool operator==(const DatasetManifest& other) const { return samples_ == other.samples_ && classes_ == other.classes_; }

 private:
  DatasetManifest() = default;

  std::vector<std::string> classes_;
  std::vector<SampleRecord> samples_;
  std::vector<std::size_t> availability_;
  std::vector<std::vector<std::size_t>> members_;
};

// Reads a `locator,label` table (header required).
DatasetManifest parse_manifest_csv(std::string_view text);

// Accepts either a manifest table or a directory laid out as
// <root>/<class_name>/<file>.
DatasetManifest ingest_manifest(const std::filesystem::path& source);

// Synthetic ids `<class>/<index>` with a fixed count per class; used by the
// built-in trainers, which do not read sample contents.
DatasetManifest synthetic_manifest(const std::vector<std::string>& class_names,
                                   const std::vector<std::size_t>& counts);

// Per-class optimizer parameters. `max_samples` is the amount of data the
// factor is applied to.
struct ClassSpec {
  int class_id = 0;
  std::size_t max_samples = 0;
  double factor = 0.5;
  double lower = 0.05;
  double upper = 0.95;
  double offset = 0.0;

  bool operator==(const ClassSpec&) const = default;
};

// Checks every spec against its invariants and the manifest availability.
// Returns the specs ordered by class id. Nothing is silently adjusted.
std::vector<ClassSpec> validate_config(std::vector<ClassSpec> specs, const DatasetManifest& manifest);

}  // namespace distopt
