#include "iflow/flow.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "iflow/errors.hpp"

namespace iflow {

std::vector<std::size_t> resolve_instances(const TrainingRun& run, const InstanceFilter& filter) {
  std::vector<std::size_t> out;
  if (!filter) {
    out.resize(run.instance_count());
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
  }
  out.reserve(filter->size());
  for (const auto& id : *filter) {
    auto idx = run.find_instance(id);
    if (!idx) throw UnknownInstance("unknown instance '" + id + "'", "filter");
    out.push_back(*idx);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t FlowMatrix::row_sum(std::size_t from) const {
  std::size_t s = 0;
  for (std::size_t b = 0; b < bins_; ++b) s += at(from, b);
  return s;
}

std::size_t FlowMatrix::col_sum(std::size_t to) const {
  std::size_t s = 0;
  for (std::size_t a = 0; a < bins_; ++a) s += at(a, to);
  return s;
}

std::size_t FlowMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

FlowFrame compute_flow(const TrainingRun& run, const ClassSelection& sel, const EpochRange& range,
                       const InstanceFilter& filter) {
  check_frame(run, sel, range);
  const auto members = resolve_instances(run, filter);
  const auto nbins = sel.bin_count();
  const auto k = range.length();

  FlowFrame frame{range, sel.bins(), members.size(), {}, {}};
  frame.distributions.assign(k, std::vector<BinCounts>(nbins));
  frame.transitions.assign(k - 1, FlowMatrix(nbins));

  // class -> bin position, hoisted out of the hot loop
  std::vector<std::size_t> bin(run.class_count());
  for (std::size_t c = 0; c < bin.size(); ++c) bin[c] = sel.bin_index(static_cast<ClassId>(c));

  for (auto i : members) {
    const auto preds = run.predictions(i);
    const auto truth = run.instance(i).true_class;
    for (std::size_t e = 0; e < k; ++e) {
      const auto p = preds[range.first() + e];
      auto& cell = frame.distributions[e][bin[p]];
      if (p == truth) {
        ++cell.correct;
      } else {
        ++cell.incorrect;
      }
      if (e + 1 < k) ++frame.transitions[e].at(bin[p], bin[preds[range.first() + e + 1]]);
    }
  }
  return frame;
}

std::vector<std::string> band_members(const TrainingRun& run, const ClassSelection& sel,
                                      const EpochRange& range, std::size_t epoch,
                                      const BinId& from, const BinId& to,
                                      const InstanceFilter& filter) {
  check_frame(run, sel, range);
  if (!range.contains(epoch) || !range.contains(epoch + 1)) {
    throw InvalidTransition("transition from epoch " + std::to_string(epoch) +
                                " does not lie inside the selected range",
                            "epoch");
  }
  const auto a = sel.index_of(from);
  const auto b = sel.index_of(to);
  if (!a) throw InvalidArgument("source bin is not part of the class selection", "fromBin");
  if (!b) throw InvalidArgument("target bin is not part of the class selection", "toBin");

  std::vector<std::string> out;
  for (auto i : resolve_instances(run, filter)) {
    const auto preds = run.predictions(i);
    if (sel.bin_index(preds[epoch]) == *a && sel.bin_index(preds[epoch + 1]) == *b) {
      out.push_back(run.instance(i).instance_id);
    }
  }
  return out;
}

GlyphCategory categorize(std::size_t prev_bin, std::size_t bin, std::size_t next_bin) noexcept {
  const bool arrived = prev_bin != bin;
  const bool leaves = next_bin != bin;
  if (arrived && leaves) return GlyphCategory::InOut;
  if (arrived) return GlyphCategory::Incoming;
  if (leaves) return GlyphCategory::Outgoing;
  return GlyphCategory::Stable;
}

GlyphSlot slot_of(GlyphCategory category) noexcept {
  switch (category) {
    case GlyphCategory::Incoming:
    case GlyphCategory::InOut: return GlyphSlot::Left;
    case GlyphCategory::Outgoing: return GlyphSlot::Right;
    case GlyphCategory::Stable: break;
  }
  return GlyphSlot::Center;
}

const char* to_string(GlyphCategory category) noexcept {
  switch (category) {
    case GlyphCategory::Stable: return "stable";
    case GlyphCategory::Incoming: return "incoming";
    case GlyphCategory::Outgoing: return "outgoing";
    case GlyphCategory::InOut: return "inout";
  }
  return "stable";
}

const char* to_string(GlyphSlot slot) noexcept {
  switch (slot) {
    case GlyphSlot::Left: return "left";
    case GlyphSlot::Center: return "center";
    case GlyphSlot::Right: return "right";
  }
  return "center";
}

std::vector<std::vector<GlyphInfo>> glyph_layout(const TrainingRun& run, const ClassSelection& sel,
                                                 const EpochRange& range, Measure rank_by,
                                                 const InstanceFilter& filter) {
  check_frame(run, sel, range);
  const auto members = resolve_instances(run, filter);
  const auto scores = score_all(run, range);
  const auto k = range.length();

  std::vector<std::vector<GlyphInfo>> out(k);
  for (std::size_t e = 0; e < k; ++e) {
    const auto epoch = range.first() + e;
    auto& glyphs = out[e];
    glyphs.reserve(members.size());
    std::vector<std::size_t> bin_pos;
    bin_pos.reserve(members.size());
    for (auto i : members) {
      const auto preds = run.predictions(i);
      const auto cur = sel.bin_index(preds[epoch]);
      const auto prev = epoch > range.first() ? sel.bin_index(preds[epoch - 1]) : cur;
      const auto next = epoch < range.last() ? sel.bin_index(preds[epoch + 1]) : cur;

      GlyphInfo g;
      g.instance_id = run.instance(i).instance_id;
      g.epoch = epoch;
      g.bin = bin_of(preds[epoch], sel);
      g.category = categorize(prev, cur, next);
      g.slot = slot_of(g.category);
      g.rank_measure = scores[i].get(rank_by);
      glyphs.push_back(std::move(g));
      bin_pos.push_back(cur);
    }

    std::vector<std::size_t> order(glyphs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      const auto& gx = glyphs[x];
      const auto& gy = glyphs[y];
      if (bin_pos[x] != bin_pos[y]) return bin_pos[x] < bin_pos[y];
      if (gx.slot != gy.slot) return gx.slot < gy.slot;
      if (gx.rank_measure != gy.rank_measure) return gx.rank_measure > gy.rank_measure;
      return gx.instance_id < gy.instance_id;
    });

    std::vector<GlyphInfo> sorted;
    sorted.reserve(glyphs.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
      auto g = std::move(glyphs[order[r]]);
      const bool new_stack = sorted.empty() || bin_pos[order[r - 1]] != bin_pos[order[r]] ||
                             sorted.back().slot != g.slot;
      g.vertical_order = new_stack ? 0 : sorted.back().vertical_order + 1;
      sorted.push_back(std::move(g));
    }
    glyphs = std::move(sorted);
  }
  return out;
}

std::vector<TraceSegment> trace(const TrainingRun& run, const ClassSelection& sel,
                                const EpochRange& range, const std::vector<std::string>& ids) {
  check_frame(run, sel, range);
  std::vector<TraceSegment> out;
  for (const auto& id : ids) {
    const auto idx = run.find_instance(id);
    if (!idx) throw UnknownInstance("unknown instance '" + id + "'", "ids");
    const auto preds = run.predictions(*idx);
    const auto truth = run.instance(*idx).true_class;
    for (auto j = range.first(); j < range.last(); ++j) {
      out.push_back(TraceSegment{
          id, j, bin_of(preds[j], sel), bin_of(preds[j + 1], sel),
          preds[j + 1] == truth ? Correctness::Correct : Correctness::Incorrect});
    }
  }
  return out;
}

}  // namespace iflow
