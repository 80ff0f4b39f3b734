#include "iflow/table.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <regex>

#include "iflow/errors.hpp"

namespace iflow {

namespace {

struct AttributeName {
  Attribute attribute;
  const char* name;
};

constexpr std::array<AttributeName, 7> kAttributeNames{{
    {Attribute::InstanceId, "instance_id"},
    {Attribute::TrueClass, "true_class"},
    {Attribute::Misclassification, "S"},
    {Attribute::Variability, "V"},
    {Attribute::Frequency, "F"},
    {Attribute::PredictionSequence, "prediction_sequence"},
    {Attribute::CorrectnessHistogram, "correctness_histogram"},
}};

std::optional<Measure> measure_of(Attribute a) {
  switch (a) {
    case Attribute::Misclassification: return Measure::Misclassification;
    case Attribute::Variability: return Measure::Variability;
    case Attribute::Frequency: return Measure::Frequency;
    default: return std::nullopt;
  }
}

std::regex compile(const std::string& pattern) {
  try {
    return std::regex(pattern, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw InvalidRegex("invalid regular expression '" + pattern + "': " + e.what(), "pattern");
  }
}

template <class T>
int three_way(const T& a, const T& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

// Everything a filter or comparator may need about the current query.
class Context {
 public:
  Context(const TrainingRun& run, const EpochRange& range, const DifficultyScores& scores)
      : run_(run), range_(range), scores_(scores) {}

  bool has_incorrect(std::size_t i) const {
    const auto preds = run_.predictions(i);
    const auto truth = run_.instance(i).true_class;
    for (auto j = range_.first(); j <= range_.last(); ++j) {
      if (preds[j] != truth) return true;
    }
    return false;
  }

  std::size_t correct_count(std::size_t i) const {
    const auto preds = run_.predictions(i);
    const auto truth = run_.instance(i).true_class;
    std::size_t n = 0;
    for (auto j = range_.first(); j <= range_.last(); ++j) n += preds[j] == truth;
    return n;
  }

  int compare(Attribute a, std::size_t x, std::size_t y) const {
    if (auto m = measure_of(a)) return three_way(scores_[x].get(*m), scores_[y].get(*m));
    switch (a) {
      case Attribute::InstanceId:
        return three_way(run_.instance(x).instance_id, run_.instance(y).instance_id);
      case Attribute::TrueClass:
        return three_way(run_.instance(x).true_class, run_.instance(y).true_class);
      case Attribute::PredictionSequence: {
        const auto px = run_.predictions(x).subspan(range_.first(), range_.length());
        const auto py = run_.predictions(y).subspan(range_.first(), range_.length());
        const auto c = std::lexicographical_compare_three_way(px.begin(), px.end(), py.begin(),
                                                              py.end());
        return c < 0 ? -1 : (c > 0 ? 1 : 0);
      }
      case Attribute::CorrectnessHistogram:
        return three_way(correct_count(x), correct_count(y));
      default: return 0;
    }
  }

  const TrainingRun& run() const { return run_; }
  const EpochRange& range() const { return range_; }
  const DifficultyScores& scores() const { return scores_; }

 private:
  const TrainingRun& run_;
  const EpochRange& range_;
  const DifficultyScores& scores_;
};

// Filter with any regex compiled up front.
struct CompiledFilter {
  Filter filter;
  std::optional<std::regex> regex;
};

CompiledFilter compile_filter(const TrainingRun& run, const Filter& f) {
  CompiledFilter out{f, std::nullopt};
  if (const auto* r = std::get_if<NumericRange>(&f)) {
    if (!measure_of(r->attribute) && r->attribute != Attribute::TrueClass) {
      throw UnknownAttribute(std::string("'") + to_string(r->attribute) +
                                 "' is not a numeric attribute",
                             "filters");
    }
  } else if (const auto* c = std::get_if<ClassEquals>(&f)) {
    if (c->attribute != Attribute::TrueClass) {
      throw UnknownAttribute(std::string("'") + to_string(c->attribute) +
                                 "' is not a class attribute",
                             "filters");
    }
    if (c->cls >= run.class_count()) throw InvalidArgument("class index out of range", "filters");
  } else if (const auto* s = std::get_if<SequenceRegex>(&f)) {
    out.regex = compile(s->pattern);
  } else if (const auto* e = std::get_if<EverPredicted>(&f)) {
    for (auto cls : e->classes) {
      if (cls >= run.class_count()) throw InvalidArgument("class index out of range", "filters");
    }
  }
  return out;
}

bool passes(const Context& ctx, const CompiledFilter& cf, std::size_t i) {
  const auto& run = ctx.run();
  const auto& range = ctx.range();
  return std::visit(
      [&](const auto& f) -> bool {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, NumericRange>) {
          double v = 0.0;
          if (auto m = measure_of(f.attribute)) {
            v = ctx.scores()[i].get(*m).to_double();
          } else {
            v = run.instance(i).true_class;
          }
          return v >= f.lo && v <= f.hi;
        } else if constexpr (std::is_same_v<T, ClassEquals>) {
          return run.instance(i).true_class == f.cls;
        } else if constexpr (std::is_same_v<T, SequenceRegex>) {
          return std::regex_search(sequence_string(run, i, range), *cf.regex);
        } else if constexpr (std::is_same_v<T, EverPredicted>) {
          const auto preds = run.predictions(i);
          for (auto j = range.first(); j <= range.last(); ++j) {
            if (std::find(f.classes.begin(), f.classes.end(), preds[j]) != f.classes.end()) {
              return true;
            }
          }
          return false;
        } else {
          return ctx.has_incorrect(i) == f.flag;
        }
      },
      cf.filter);
}

TableRow make_row(const Context& ctx, const ClassSelection& sel, std::size_t i) {
  const auto& run = ctx.run();
  const auto& range = ctx.range();
  const auto& rec = run.instance(i);
  TableRow row;
  row.instance_id = rec.instance_id;
  row.payload_ref = rec.payload_ref;
  row.true_class = rec.true_class;
  row.scores = ctx.scores()[i];
  for (auto j = range.first(); j <= range.last(); ++j) {
    const auto p = rec.predictions[j];
    Mark m = Mark::Correct;
    if (p != rec.true_class) m = sel.is_selected(p) ? Mark::IncorrectSelected : Mark::Other;
    row.prediction_sequence.push_back(p);
    row.correctness_sequence.push_back(m);
    ++row.correctness_histogram[static_cast<std::size_t>(m)];
  }
  return row;
}

std::vector<GroupSummary> summarize(const Context& ctx, const std::vector<std::size_t>& members) {
  const auto& run = ctx.run();
  const auto& range = ctx.range();
  std::map<ClassId, std::vector<std::size_t>> groups;
  for (auto i : members) groups[run.instance(i).true_class].push_back(i);

  std::vector<GroupSummary> out;
  out.reserve(groups.size());
  for (const auto& [key, ids] : groups) {
    GroupSummary g;
    g.key = key;
    g.size = ids.size();
    g.prediction_histogram.assign(run.class_count(), 0);
    std::array<std::vector<double>, 3> samples;
    for (auto i : ids) {
      const auto preds = run.predictions(i);
      for (auto j = range.first(); j <= range.last(); ++j) ++g.prediction_histogram[preds[j]];
      const auto& s = ctx.scores()[i];
      samples[0].push_back(s.misclassification.to_double());
      samples[1].push_back(s.variability.to_double());
      samples[2].push_back(s.frequency.to_double());
    }
    for (std::size_t m = 0; m < 3; ++m) g.measures[m] = box_stats(std::move(samples[m]));
    out.push_back(std::move(g));
  }
  return out;
}

template <class T>
std::vector<T> paginate(std::vector<T> items, std::size_t offset, std::optional<std::size_t> limit) {
  if (offset >= items.size()) return {};
  auto first = items.begin() + static_cast<std::ptrdiff_t>(offset);
  auto last = items.end();
  if (limit && *limit < static_cast<std::size_t>(last - first)) {
    last = first + static_cast<std::ptrdiff_t>(*limit);
  }
  return std::vector<T>(std::make_move_iterator(first), std::make_move_iterator(last));
}

}  // namespace

Attribute parse_attribute(std::string_view name) {
  for (const auto& [attr, n] : kAttributeNames) {
    if (name == n) return attr;
  }
  throw UnknownAttribute("unknown attribute '" + std::string(name) + "'", "attribute");
}

const char* to_string(Attribute attribute) noexcept {
  for (const auto& [attr, n] : kAttributeNames) {
    if (attr == attribute) return n;
  }
  return "?";
}

std::string sequence_string(const TrainingRun& run, std::size_t instance, const EpochRange& range) {
  const auto preds = run.predictions(instance);
  std::string out;
  for (auto j = range.first(); j <= range.last(); ++j) {
    if (j != range.first()) out.push_back(',');
    out += run.label(preds[j]);
  }
  return out;
}

std::vector<std::string> filter_sequence_regex(const TrainingRun& run, const EpochRange& range,
                                               const std::string& pattern) {
  const auto re = compile(pattern);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < run.instance_count(); ++i) {
    if (std::regex_search(sequence_string(run, i, range), re)) {
      out.push_back(run.instance(i).instance_id);
    }
  }
  return out;
}

ConfusionMatrix confusion_summary(const TrainingRun& run, const EpochRange& range) {
  ConfusionMatrix cm{run.class_count(), std::vector<std::size_t>(run.class_count() * run.class_count())};
  for (std::size_t i = 0; i < run.instance_count(); ++i) {
    const auto preds = run.predictions(i);
    const auto row = static_cast<std::size_t>(run.instance(i).true_class) * cm.classes;
    for (auto j = range.first(); j <= range.last(); ++j) ++cm.counts[row + preds[j]];
  }
  return cm;
}

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) return {};
  std::sort(values.begin(), values.end());
  auto quantile = [&](double p) {
    const double h = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return BoxStats{values.front(), quantile(0.25), quantile(0.5), quantile(0.75), values.back()};
}

TablePage query_table(const TrainingRun& run, const TableSpec& spec) {
  if (spec.group_by && *spec.group_by != Attribute::TrueClass) {
    throw UnknownAttribute(std::string("cannot group by '") + to_string(*spec.group_by) + "'",
                           "group_by");
  }
  check_frame(run, spec.sel, spec.range);

  const auto scores = score_all(run, spec.range);
  const Context ctx(run, spec.range, scores);

  std::vector<CompiledFilter> filters;
  bool constrains_incorrect = false;
  for (const auto& f : spec.filters) {
    constrains_incorrect |= std::holds_alternative<HasIncorrect>(f);
    filters.push_back(compile_filter(run, f));
  }
  const bool summary_mode = spec.mode == TableMode::GroupSummary;
  if (spec.default_filter && !constrains_incorrect && !summary_mode) {
    filters.push_back(CompiledFilter{HasIncorrect{true}, std::nullopt});
  }

  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < run.instance_count(); ++i) {
    const bool keep = std::all_of(filters.begin(), filters.end(),
                                  [&](const CompiledFilter& cf) { return passes(ctx, cf, i); });
    if (keep) members.push_back(i);
  }

  TablePage page;
  page.total_rows = members.size();

  if (summary_mode) {
    auto groups = summarize(ctx, members);
    page.total_groups = groups.size();
    page.groups = paginate(std::move(groups), spec.offset, spec.limit);
    return page;
  }

  std::vector<double> combined;
  if (!spec.combined.empty()) {
    DifficultyScores subset;
    subset.reserve(members.size());
    for (auto i : members) subset.push_back(scores[i]);
    const auto values = combined_score(subset, spec.combined);
    combined.assign(run.instance_count(), 0.0);
    for (std::size_t r = 0; r < members.size(); ++r) combined[members[r]] = values[r];
  }

  std::stable_sort(members.begin(), members.end(), [&](std::size_t x, std::size_t y) {
    if (spec.group_by) {
      if (int c = ctx.compare(Attribute::TrueClass, x, y)) return c < 0;
    }
    if (!combined.empty()) {
      if (combined[x] != combined[y]) return combined[x] > combined[y];
    } else {
      for (const auto& key : spec.sort) {
        int c = ctx.compare(key.attribute, x, y);
        if (c != 0) return key.direction == Direction::Ascending ? c < 0 : c > 0;
      }
    }
    return run.instance(x).instance_id < run.instance(y).instance_id;
  });

  if (spec.group_by) {
    page.groups = summarize(ctx, members);
    page.total_groups = page.groups.size();
  }
  for (auto i : paginate(members, spec.offset, spec.limit)) {
    auto row = make_row(ctx, spec.sel, i);
    if (!combined.empty()) row.combined = combined[i];
    page.rows.push_back(std::move(row));
  }
  return page;
}

}  // namespace iflow
