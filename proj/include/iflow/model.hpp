#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace iflow {

// 0-based index into TrainingRun::class_labels().
using ClassId = std::uint16_t;

using Metadata = std::map<std::string, std::string>;

// Parsed but not yet validated run file. Predictions are already resolved
// to class indices; range and shape checks happen in build_run.
struct RunDocument {
  struct Instance {
    std::string id;
    std::int64_t label = 0;
    std::vector<std::int64_t> predictions;
    std::optional<std::string> image;
  };

  int format_version = 1;
  std::vector<std::string> classes;
  std::int64_t epochs = 0;
  Metadata metadata;
  std::vector<Instance> instances;
};

struct InstanceRecord {
  std::string instance_id;
  ClassId true_class = 0;
  std::vector<ClassId> predictions;  // one per recorded epoch
  std::optional<std::string> payload_ref;
};

// Immutable snapshot of one training run's per-epoch predictions.
class TrainingRun {
 public:
  const std::string& run_id() const noexcept { return run_id_; }
  const std::vector<std::string>& class_labels() const noexcept { return labels_; }
  const std::vector<InstanceRecord>& instances() const noexcept { return instances_; }
  const Metadata& metadata() const noexcept { return metadata_; }

  std::size_t class_count() const noexcept { return labels_.size(); }
  std::size_t instance_count() const noexcept { return instances_.size(); }
  std::size_t epoch_count() const noexcept { return epoch_count_; }

  const InstanceRecord& instance(std::size_t i) const { return instances_.at(i); }
  std::span<const ClassId> predictions(std::size_t i) const noexcept {
    return instances_[i].predictions;
  }

  std::optional<std::size_t> find_instance(std::string_view id) const;
  std::optional<ClassId> find_class(std::string_view label) const;
  const std::string& label(ClassId c) const { return labels_.at(c); }

 private:
  friend TrainingRun build_run(const RunDocument& raw, std::string run_id);

  std::string run_id_;
  std::vector<std::string> labels_;
  std::vector<InstanceRecord> instances_;
  std::size_t epoch_count_ = 0;
  Metadata metadata_;
  std::unordered_map<std::string, std::size_t> instance_index_;
  std::unordered_map<std::string, ClassId> class_index_;
};

// Validates every TrainingRun invariant; throws ValidationError naming the
// first violation found.
TrainingRun build_run(const RunDocument& raw, std::string run_id);

// Inclusive 0-based window [first, last] over the recorded epochs.
class EpochRange {
 public:
  EpochRange(std::size_t first, std::size_t last, std::size_t epoch_count);
  static EpochRange full(const TrainingRun& run);

  std::size_t first() const noexcept { return first_; }
  std::size_t last() const noexcept { return last_; }
  std::size_t length() const noexcept { return last_ - first_ + 1; }  // k
  bool contains(std::size_t epoch) const noexcept {
    return epoch >= first_ && epoch <= last_;
  }

  friend bool operator==(const EpochRange&, const EpochRange&) = default;

 private:
  std::size_t first_;
  std::size_t last_;
};

// A vertical region of the flow view: one selected class, or Other.
struct BinId {
  bool other = false;
  ClassId cls = 0;

  static constexpr BinId of_class(ClassId c) noexcept { return {false, c}; }
  static constexpr BinId other_bin() noexcept { return {true, 0}; }

  friend bool operator==(const BinId& a, const BinId& b) noexcept {
    return a.other == b.other && (a.other || a.cls == b.cls);
  }
};

class ClassSelection {
 public:
  // Throws ValidationError for empty, duplicated, or out-of-range indices.
  // Dropping the Other bin is only allowed when every class is selected,
  // otherwise some predictions would have no bin to land in.
  ClassSelection(std::vector<ClassId> selected, bool include_other, std::size_t class_count);
  static ClassSelection all(const TrainingRun& run, bool include_other = true);

  const std::vector<ClassId>& selected() const noexcept { return selected_; }
  bool include_other() const noexcept { return include_other_; }
  std::size_t class_count() const noexcept { return position_.size(); }
  bool is_selected(ClassId c) const noexcept { return position_[c] != kNotSelected; }

  // Bins in display order: selected classes in selection order, Other last.
  std::vector<BinId> bins() const;
  std::size_t bin_count() const noexcept { return selected_.size() + (include_other_ ? 1 : 0); }

  // Position of the class's bin within bins().
  std::size_t bin_index(ClassId c) const noexcept {
    return position_[c] == kNotSelected ? selected_.size() : position_[c];
  }
  // Position of `bin` within bins(), or nullopt if the bin is not part of
  // this selection.
  std::optional<std::size_t> index_of(const BinId& bin) const noexcept;

 private:
  static constexpr std::size_t kNotSelected = static_cast<std::size_t>(-1);

  std::vector<ClassId> selected_;
  bool include_other_;
  std::vector<std::size_t> position_;  // per class
};

BinId bin_of(ClassId class_idx, const ClassSelection& sel);

// Throws ValidationError unless `sel` and `range` were built for `run`.
void check_frame(const TrainingRun& run, const ClassSelection& sel, const EpochRange& range);

}  // namespace iflow
