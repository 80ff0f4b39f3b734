#include "iflow/model.hpp"

#include <limits>
#include <unordered_set>

#include "iflow/errors.hpp"

namespace iflow {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Schema: return "SchemaError";
    case ErrorKind::Storage: return "StorageError";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::UnknownInstance: return "UnknownInstance";
    case ErrorKind::InvalidTransition: return "InvalidTransition";
    case ErrorKind::InvalidWeights: return "InvalidWeights";
    case ErrorKind::InvalidRegex: return "InvalidRegex";
    case ErrorKind::UnknownAttribute: return "UnknownAttribute";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

std::optional<std::size_t> TrainingRun::find_instance(std::string_view id) const {
  auto it = instance_index_.find(std::string(id));
  if (it == instance_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<ClassId> TrainingRun::find_class(std::string_view label) const {
  auto it = class_index_.find(std::string(label));
  if (it == class_index_.end()) return std::nullopt;
  return it->second;
}

TrainingRun build_run(const RunDocument& raw, std::string run_id) {
  if (raw.format_version != 1) {
    throw ValidationError("unsupported format version " + std::to_string(raw.format_version),
                          "version");
  }
  const auto n = raw.classes.size();
  if (n < 2) throw ValidationError("a run needs at least 2 classes", "classes");
  if (n > std::numeric_limits<ClassId>::max()) {
    throw ValidationError("too many classes", "classes");
  }
  if (raw.epochs < 1) throw ValidationError("epoch count must be at least 1", "epochs");
  if (raw.instances.empty()) throw ValidationError("a run needs at least 1 instance", "instances");

  TrainingRun run;
  run.run_id_ = std::move(run_id);
  run.labels_ = raw.classes;
  run.metadata_ = raw.metadata;
  run.epoch_count_ = static_cast<std::size_t>(raw.epochs);

  for (std::size_t c = 0; c < n; ++c) {
    const auto& label = raw.classes[c];
    const auto path = "classes[" + std::to_string(c) + "]";
    if (label.empty()) throw ValidationError("class label is empty", path);
    if (!run.class_index_.emplace(label, static_cast<ClassId>(c)).second) {
      throw ValidationError("duplicate class label '" + label + "'", path);
    }
  }

  auto valid_class = [n](std::int64_t v) { return v >= 0 && static_cast<std::uint64_t>(v) < n; };

  run.instances_.reserve(raw.instances.size());
  run.instance_index_.reserve(raw.instances.size());
  for (std::size_t i = 0; i < raw.instances.size(); ++i) {
    const auto& src = raw.instances[i];
    const auto path = "instances[" + std::to_string(i) + "]";
    if (!run.instance_index_.emplace(src.id, i).second) {
      throw ValidationError("duplicate instance id '" + src.id + "'", path + ".id");
    }
    if (!valid_class(src.label)) {
      throw ValidationError("class index " + std::to_string(src.label) + " out of range",
                            path + ".label");
    }
    if (src.predictions.size() != run.epoch_count_) {
      throw ValidationError("ragged prediction row: expected " +
                                std::to_string(run.epoch_count_) + " predictions, got " +
                                std::to_string(src.predictions.size()),
                            path + ".predictions");
    }
    InstanceRecord rec;
    rec.instance_id = src.id;
    rec.true_class = static_cast<ClassId>(src.label);
    rec.payload_ref = src.image;
    rec.predictions.reserve(src.predictions.size());
    for (std::size_t j = 0; j < src.predictions.size(); ++j) {
      const auto p = src.predictions[j];
      if (!valid_class(p)) {
        throw ValidationError("class index " + std::to_string(p) + " out of range",
                              path + ".predictions[" + std::to_string(j) + "]");
      }
      rec.predictions.push_back(static_cast<ClassId>(p));
    }
    run.instances_.push_back(std::move(rec));
  }
  return run;
}

EpochRange::EpochRange(std::size_t first, std::size_t last, std::size_t epoch_count)
    : first_(first), last_(last) {
  if (first > last || last >= epoch_count) {
    throw ValidationError("invalid epoch range [" + std::to_string(first) + ", " +
                              std::to_string(last) + "] for " + std::to_string(epoch_count) +
                              " epochs",
                          "range");
  }
}

EpochRange EpochRange::full(const TrainingRun& run) {
  return EpochRange(0, run.epoch_count() - 1, run.epoch_count());
}

ClassSelection::ClassSelection(std::vector<ClassId> selected, bool include_other,
                               std::size_t class_count)
    : selected_(std::move(selected)),
      include_other_(include_other),
      position_(class_count, kNotSelected) {
  if (selected_.empty()) throw ValidationError("class selection is empty", "classes");
  for (std::size_t k = 0; k < selected_.size(); ++k) {
    const auto c = selected_[k];
    if (c >= class_count) {
      throw ValidationError("selected class index " + std::to_string(c) + " out of range",
                            "classes");
    }
    if (position_[c] != kNotSelected) {
      throw ValidationError("class index " + std::to_string(c) + " selected twice", "classes");
    }
    position_[c] = k;
  }
  if (!include_other_ && selected_.size() != class_count) {
    throw ValidationError("the Other bin can only be dropped when every class is selected",
                          "classes");
  }
}

ClassSelection ClassSelection::all(const TrainingRun& run, bool include_other) {
  std::vector<ClassId> ids(run.class_count());
  for (std::size_t c = 0; c < ids.size(); ++c) ids[c] = static_cast<ClassId>(c);
  return ClassSelection(std::move(ids), include_other, run.class_count());
}

std::vector<BinId> ClassSelection::bins() const {
  std::vector<BinId> out;
  out.reserve(bin_count());
  for (auto c : selected_) out.push_back(BinId::of_class(c));
  if (include_other_) out.push_back(BinId::other_bin());
  return out;
}

std::optional<std::size_t> ClassSelection::index_of(const BinId& bin) const noexcept {
  if (bin.other) {
    if (!include_other_) return std::nullopt;
    return selected_.size();
  }
  if (bin.cls >= position_.size() || position_[bin.cls] == kNotSelected) return std::nullopt;
  return position_[bin.cls];
}

BinId bin_of(ClassId class_idx, const ClassSelection& sel) {
  return sel.is_selected(class_idx) ? BinId::of_class(class_idx) : BinId::other_bin();
}

void check_frame(const TrainingRun& run, const ClassSelection& sel, const EpochRange& range) {
  if (sel.class_count() != run.class_count()) {
    throw ValidationError("class selection does not match the run's classes", "classes");
  }
  if (range.last() >= run.epoch_count()) {
    throw ValidationError("epoch range exceeds the run's " + std::to_string(run.epoch_count()) +
                              " epochs",
                          "range");
  }
}

}  // namespace iflow
