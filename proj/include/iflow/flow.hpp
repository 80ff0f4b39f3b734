#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "iflow/metrics.hpp"
#include "iflow/model.hpp"

namespace iflow {

// Optional restriction to a subset of instance ids; nullopt means "all".
using InstanceFilter = std::optional<std::vector<std::string>>;

// Resolves a filter to instance indices in run order, dropping duplicates.
// Throws UnknownInstance for ids the run does not contain.
std::vector<std::size_t> resolve_instances(const TrainingRun& run, const InstanceFilter& filter);

struct BinCounts {
  std::size_t correct = 0;
  std::size_t incorrect = 0;
  std::size_t total() const noexcept { return correct + incorrect; }
  friend bool operator==(const BinCounts&, const BinCounts&) = default;
};

// Square bin-to-bin count matrix for one epoch transition.
class FlowMatrix {
 public:
  FlowMatrix() = default;
  explicit FlowMatrix(std::size_t bins) : bins_(bins), counts_(bins * bins, 0) {}

  std::size_t bins() const noexcept { return bins_; }
  std::size_t at(std::size_t from, std::size_t to) const { return counts_.at(from * bins_ + to); }
  std::size_t& at(std::size_t from, std::size_t to) { return counts_.at(from * bins_ + to); }
  std::size_t row_sum(std::size_t from) const;
  std::size_t col_sum(std::size_t to) const;
  std::size_t total() const;

  friend bool operator==(const FlowMatrix&, const FlowMatrix&) = default;

 private:
  std::size_t bins_ = 0;
  std::vector<std::size_t> counts_;
};

struct FlowFrame {
  EpochRange range;
  std::vector<BinId> bins;        // Other last when present
  std::size_t instance_count = 0; // size of the filtered set
  // distributions[e][b]: epoch range.first()+e, bin b.
  std::vector<std::vector<BinCounts>> distributions;
  // transitions[e]: epoch range.first()+e to the following epoch.
  std::vector<FlowMatrix> transitions;
};

FlowFrame compute_flow(const TrainingRun& run, const ClassSelection& sel, const EpochRange& range,
                       const InstanceFilter& filter = std::nullopt);

// Instances counted by the band `from -> to` between `epoch` and `epoch+1`,
// in run order. Throws InvalidTransition if epoch+1 leaves the range and
// InvalidArgument for bins outside the selection.
std::vector<std::string> band_members(const TrainingRun& run, const ClassSelection& sel,
                                      const EpochRange& range, std::size_t epoch,
                                      const BinId& from, const BinId& to,
                                      const InstanceFilter& filter = std::nullopt);

enum class GlyphCategory { Stable, Incoming, Outgoing, InOut };
enum class GlyphSlot { Left, Center, Right };

GlyphCategory categorize(std::size_t prev_bin, std::size_t bin, std::size_t next_bin) noexcept;
GlyphSlot slot_of(GlyphCategory category) noexcept;
const char* to_string(GlyphCategory category) noexcept;
const char* to_string(GlyphSlot slot) noexcept;

struct GlyphInfo {
  std::string instance_id;
  std::size_t epoch = 0;
  BinId bin;
  GlyphCategory category = GlyphCategory::Stable;
  Rational rank_measure;
  GlyphSlot slot = GlyphSlot::Center;
  std::size_t vertical_order = 0;  // 0 = top of its (epoch, bin, slot) stack
};

// glyph_layout(...)[e] holds every glyph of epoch range.first()+e, sorted
// by bin, slot and vertical order. Neighbours outside the range count as
// the current bin, so edge glyphs are never Incoming/Outgoing at the edge.
std::vector<std::vector<GlyphInfo>> glyph_layout(const TrainingRun& run, const ClassSelection& sel,
                                                 const EpochRange& range,
                                                 Measure rank_by = Measure::Misclassification,
                                                 const InstanceFilter& filter = std::nullopt);

enum class Correctness { Correct, Incorrect };

struct TraceSegment {
  std::string instance_id;
  std::size_t from_epoch = 0;
  BinId from_bin;
  BinId to_bin;
  Correctness correctness = Correctness::Correct;  // of the destination prediction
};

// k-1 segments per requested id, grouped by id in request order.
std::vector<TraceSegment> trace(const TrainingRun& run, const ClassSelection& sel,
                                const EpochRange& range, const std::vector<std::string>& ids);

}  // namespace iflow
