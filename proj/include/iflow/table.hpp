#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "iflow/metrics.hpp"
#include "iflow/model.hpp"

namespace iflow {

enum class Attribute {
  InstanceId,
  TrueClass,
  Misclassification,  // S
  Variability,        // V
  Frequency,          // F
  PredictionSequence,
  CorrectnessHistogram,
};

// Accepts the column names used on the wire: instance_id, true_class, S, V,
// F, prediction_sequence, correctness_histogram. Throws UnknownAttribute.
Attribute parse_attribute(std::string_view name);
const char* to_string(Attribute attribute) noexcept;

struct SortKey {
  Attribute attribute = Attribute::Misclassification;
  Direction direction = Direction::Descending;
};

// Inclusive bounds. Valid on S, V, F and true_class (class index).
struct NumericRange {
  Attribute attribute = Attribute::Misclassification;
  double lo = 0.0;
  double hi = 1.0;
};
struct ClassEquals {
  Attribute attribute = Attribute::TrueClass;
  ClassId cls = 0;
};
// ECMAScript pattern searched in the comma-joined label sequence, e.g.
// "B,A,A"; anchor with ^ and $ for whole-sequence matches.
struct SequenceRegex {
  std::string pattern;
};
// Matches when any of the classes is predicted at least once in range.
struct EverPredicted {
  std::vector<ClassId> classes;
};
// true: at least one wrong prediction in range; false: never wrong.
struct HasIncorrect {
  bool flag = true;
};

using Filter = std::variant<NumericRange, ClassEquals, SequenceRegex, EverPredicted, HasIncorrect>;

enum class TableMode { Full, Condensed, GroupSummary };

struct TableSpec {
  EpochRange range;
  ClassSelection sel;
  std::vector<SortKey> sort;
  // Non-empty: rank by combined_score instead of `sort`.
  std::vector<MeasureWeight> combined;
  std::vector<Filter> filters;
  std::optional<Attribute> group_by;
  TableMode mode = TableMode::Full;
  // Row modes add HasIncorrect{true} unless the filters already constrain
  // HasIncorrect. Group summaries always aggregate the explicitly filtered set.
  bool default_filter = true;
  std::size_t offset = 0;
  std::optional<std::size_t> limit;
};

enum class Mark { Correct, IncorrectSelected, Other };

struct TableRow {
  std::string instance_id;
  std::optional<std::string> payload_ref;
  ClassId true_class = 0;
  InstanceScores scores;
  std::vector<ClassId> prediction_sequence;
  std::vector<Mark> correctness_sequence;
  std::array<std::size_t, 3> correctness_histogram{};  // indexed by Mark
  std::optional<double> combined;  // set when ranked by combined score
};

struct BoxStats {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

struct GroupSummary {
  ClassId key = 0;  // true class
  std::size_t size = 0;
  // (instance, epoch) pairs per predicted class; sums to size * k.
  std::vector<std::size_t> prediction_histogram;
  std::array<BoxStats, 3> measures{};  // S, V, F
};

struct TablePage {
  std::size_t total_rows = 0;  // after filtering, before pagination
  std::vector<TableRow> rows;
  std::size_t total_groups = 0;
  std::vector<GroupSummary> groups;
};

TablePage query_table(const TrainingRun& run, const TableSpec& spec);

// Comma-joined class labels over the range; the string regex filters see.
std::string sequence_string(const TrainingRun& run, std::size_t instance, const EpochRange& range);

std::vector<std::string> filter_sequence_regex(const TrainingRun& run, const EpochRange& range,
                                               const std::string& pattern);

// Row-major n x n matrix: [truth * n + predicted], summed over the range.
struct ConfusionMatrix {
  std::size_t classes = 0;
  std::vector<std::size_t> counts;
  std::size_t at(std::size_t truth, std::size_t predicted) const {
    return counts.at(truth * classes + predicted);
  }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix confusion_summary(const TrainingRun& run, const EpochRange& range);

// Linear-interpolation quartiles of a non-empty sample.
BoxStats box_stats(std::vector<double> values);

}  // namespace iflow
