#include "distopt/manifest.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "distopt/error.hpp"
#include "distopt/text_io.hpp"

namespace distopt {

DatasetManifest DatasetManifest::from_rows(std::vector<std::pair<std::string, std::string>> rows) {
  std::set<std::string> names;
  for (const auto& [locator, label] : rows) {
    if (locator.empty()) throw Error(ErrorCode::kMissingLabel, "row without locator");
    if (label.empty()) throw Error(ErrorCode::kMissingLabel, "row without label: " + locator);
    names.insert(label);
  }
  if (names.size() < 2) {
    throw Error(ErrorCode::kTooFewClasses,
                "a manifest needs at least two classes, found " + std::to_string(names.size()));
  }

  std::sort(rows.begin(), rows.end());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].first == rows[i - 1].first) {
      throw Error(ErrorCode::kDuplicateLocator, rows[i].first);
    }
  }

  DatasetManifest m;
  m.classes_.assign(names.begin(), names.end());
  std::map<std::string, int, std::less<>> index;
  for (std::size_t c = 0; c < m.classes_.size(); ++c) index.emplace(m.classes_[c], static_cast<int>(c));

  m.availability_.assign(m.classes_.size(), 0);
  m.members_.assign(m.classes_.size(), {});
  m.samples_.reserve(rows.size());
  for (auto& [locator, label] : rows) {
    const int id = index.at(label);
    m.members_[static_cast<std::size_t>(id)].push_back(m.samples_.size());
    ++m.availability_[static_cast<std::size_t>(id)];
    m.samples_.push_back({std::move(locator), id, std::move(label)});
  }
  return m;
}

const std::vector<std::size_t>& DatasetManifest::members(int class_id) const {
  return members_.at(static_cast<std::size_t>(class_id));
}

std::optional<int> DatasetManifest::class_index(std::string_view name) const {
  auto it = std::lower_bound(classes_.begin(), classes_.end(), name);
  if (it == classes_.end() || *it != name) return std::nullopt;
  return static_cast<int>(it - classes_.begin());
}

std::string DatasetManifest::to_csv() const {
  std::string out = "locator,label\n";
  for (const auto& s : samples_) {
    out += csv_escape(s.locator);
    out += ',';
    out += csv_escape(s.class_name);
    out += '\n';
  }
  return out;
}

std::string DatasetManifest::content_hash() const { return to_hex(fnv1a64(to_csv())); }

DatasetManifest parse_manifest_csv(std::string_view text) {
  auto table = parse_csv(text);
  if (table.empty()) throw Error(ErrorCode::kUnreadableSource, "empty manifest");
  const auto& header = table.front();
  if (header.size() < 2 || header[0] != "locator" || header[1] != "label") {
    throw Error(ErrorCode::kUnreadableSource, "manifest header must be 'locator,label'");
  }
  std::vector<std::pair<std::string, std::string>> rows;
  rows.reserve(table.size() - 1);
  for (std::size_t i = 1; i < table.size(); ++i) {
    auto& row = table[i];
    if (row.size() < 2 || row[1].empty()) {
      throw Error(ErrorCode::kMissingLabel, "line " + std::to_string(i + 1) + " has no label");
    }
    rows.emplace_back(std::move(row[0]), std::move(row[1]));
  }
  return DatasetManifest::from_rows(std::move(rows));
}

namespace {

DatasetManifest ingest_directory(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  std::vector<std::pair<std::string, std::string>> rows;
  std::error_code ec;
  for (const auto& class_dir : fs::directory_iterator(root, ec)) {
    if (!class_dir.is_directory()) continue;
    const std::string label = class_dir.path().filename().string();
    if (label.starts_with('.')) continue;
    std::size_t found = 0;
    for (const auto& entry : fs::recursive_directory_iterator(class_dir.path())) {
      if (!entry.is_regular_file()) continue;
      if (entry.path().filename().string().starts_with('.')) continue;
      rows.emplace_back(entry.path().generic_string(), label);
      ++found;
    }
    if (found == 0) throw Error(ErrorCode::kEmptyClass, "class directory '" + label + "' is empty");
  }
  if (ec) throw Error(ErrorCode::kUnreadableSource, root.string() + ": " + ec.message());
  return DatasetManifest::from_rows(std::move(rows));
}

}  // namespace

DatasetManifest ingest_manifest(const std::filesystem::path& source) {
  std::error_code ec;
  if (std::filesystem::is_directory(source, ec)) return ingest_directory(source);
  if (!std::filesystem::is_regular_file(source, ec)) {
    throw Error(ErrorCode::kUnreadableSource, "no such manifest: " + source.string());
  }
  return parse_manifest_csv(read_text_file(source));
}

DatasetManifest synthetic_manifest(const std::vector<std::string>& class_names,
                                   const std::vector<std::size_t>& counts) {
  if (class_names.size() != counts.size()) {
    throw Error(ErrorCode::kConfigInvalid, "synthetic manifest: one count per class required");
  }
  std::vector<std::pair<std::string, std::string>> rows;
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    if (counts[c] == 0) throw Error(ErrorCode::kEmptyClass, class_names[c]);
    for (std::size_t i = 0; i < counts[c]; ++i) {
      // Zero-padded so lexicographic order matches numeric order.
      std::string idx = std::to_string(i);
      idx.insert(0, idx.size() < 7 ? 7 - idx.size() : 0, '0');
      rows.emplace_back(class_names[c] + "/" + idx, class_names[c]);
    }
  }
  return DatasetManifest::from_rows(std::move(rows));
}

std::vector<ClassSpec> validate_config(std::vector<ClassSpec> specs, const DatasetManifest& manifest) {
  const std::size_t n = manifest.num_classes();
  std::vector<bool> seen(n, false);
  for (const auto& s : specs) {
    if (s.class_id < 0 || static_cast<std::size_t>(s.class_id) >= n) {
      throw Error(ErrorCode::kConfigInvalid, "class id " + std::to_string(s.class_id) + " not in manifest");
    }
    if (seen[static_cast<std::size_t>(s.class_id)]) {
      throw Error(ErrorCode::kConfigInvalid, "duplicate spec for class " + std::to_string(s.class_id));
    }
    seen[static_cast<std::size_t>(s.class_id)] = true;
  }
  for (std::size_t c = 0; c < n; ++c) {
    if (!seen[c]) throw Error(ErrorCode::kMissingClassSpec, manifest.classes()[c]);
  }
  std::sort(specs.begin(), specs.end(),
            [](const ClassSpec& a, const ClassSpec& b) { return a.class_id < b.class_id; });

  for (const auto& s : specs) {
    const auto c = static_cast<std::size_t>(s.class_id);
    const std::string& name = manifest.classes()[c];
    if (!(s.lower > 0.0 && s.lower <= s.upper && s.upper <= 1.0)) {
      throw Error(ErrorCode::kLimitOrder, name + ": limits must satisfy 0 < lower <= upper <= 1");
    }
    if (!(s.factor > 0.0 && s.factor <= 1.0 && s.factor >= s.lower && s.factor <= s.upper)) {
      throw Error(ErrorCode::kFactorOutOfRange, name + ": factor must lie in [lower, upper]");
    }
    if (!(s.offset >= -1.0 && s.offset <= 1.0)) {
      throw Error(ErrorCode::kOffsetOutOfRange, name + ": offset must lie in [-1, 1]");
    }
    if (s.max_samples == 0) throw Error(ErrorCode::kConfigInvalid, name + ": max samples must be >= 1");
    if (s.max_samples > manifest.availability()[c]) {
      throw Error(ErrorCode::kAvailabilityExceeded,
                  name + ": max samples " + std::to_string(s.max_samples) + " > available " +
                      std::to_string(manifest.availability()[c]));
    }
  }
  return specs;
}

}  // namespace distopt
