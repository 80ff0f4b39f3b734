#pragma once

#include <cstddef>
#include <filesystem>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "iflow/model.hpp"

namespace iflow {

// Run file format v1 is JSON with top-level keys
//   version, classes, epochs, metadata (optional), instances
// and one object per instance: {id, label, predictions, image?}.
// Predictions may be label strings or integer class indices.
RunDocument parse_run_document(std::string_view text);

// Compact JSON with keys in the documented order, metadata keys sorted,
// instances in input order and predictions as integer indices.
std::string canonical_json(const RunDocument& doc);

// Hex SHA-256 of canonical_json(doc).
std::string content_digest(const RunDocument& doc);

RunDocument to_document(const TrainingRun& run);

// Parses and validates in one step; the run id is the content digest.
TrainingRun load_run_text(std::string_view text);

struct RunSummary {
  std::string run_id;
  Metadata metadata;
  std::size_t instances = 0;  // m
  std::size_t classes = 0;    // n
  std::size_t epochs = 0;     // E
};

// Content-addressed run storage: one `<run_id>.json` per run plus an
// `index.json` recording creation order. Reads may run concurrently with
// each other; writes are serialized.
class RunStore {
 public:
  explicit RunStore(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }

  // Validates the document, persists it and returns its id. Storing the
  // same canonical document again returns the existing id.
  std::string store_run(const RunDocument& doc);
  TrainingRun load_run(const std::string& run_id) const;
  std::vector<RunSummary> list_runs() const;
  RunSummary summary(const std::string& run_id) const;

 private:
  std::filesystem::path run_path(const std::string& run_id) const;
  void write_index() const;

  std::filesystem::path root_;
  mutable std::shared_mutex mutex_;
  std::vector<RunSummary> index_;
};

}  // namespace iflow
