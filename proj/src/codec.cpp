#include "iflow/codec.hpp"

#include <sstream>

#include "iflow/errors.hpp"

namespace iflow::codec {

namespace {

const json& field(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw InvalidArgument(std::string("missing field '") + key + "'", path);
  return *it;
}

Direction decode_direction(const json& j, const std::string& path) {
  if (!j.is_string()) throw InvalidArgument("direction must be a string", path);
  const auto s = j.get<std::string>();
  if (s == "asc" || s == "ascending") return Direction::Ascending;
  if (s == "desc" || s == "descending") return Direction::Descending;
  throw InvalidArgument("direction must be 'asc' or 'desc'", path);
}

const char* direction_name(Direction d) { return d == Direction::Ascending ? "asc" : "desc"; }

const char* mark_name(Mark m) {
  switch (m) {
    case Mark::Correct: return "correct";
    case Mark::IncorrectSelected: return "incorrect";
    case Mark::Other: return "other";
  }
  return "correct";
}

const char* mode_name(TableMode m) {
  switch (m) {
    case TableMode::Full: return "full";
    case TableMode::Condensed: return "condensed";
    case TableMode::GroupSummary: return "group_summary";
  }
  return "full";
}

TableMode decode_mode(const std::string& s) {
  if (s == "full") return TableMode::Full;
  if (s == "condensed") return TableMode::Condensed;
  if (s == "group_summary") return TableMode::GroupSummary;
  throw InvalidArgument("unknown table mode '" + s + "'", "mode");
}

Measure measure_for(Attribute a) {
  switch (a) {
    case Attribute::Misclassification: return Measure::Misclassification;
    case Attribute::Variability: return Measure::Variability;
    case Attribute::Frequency: return Measure::Frequency;
    default: throw UnknownAttribute(std::string("'") + to_string(a) + "' is not a difficulty measure",
                                    "combined");
  }
}

Attribute attribute_for(Measure m) {
  switch (m) {
    case Measure::Variability: return Attribute::Variability;
    case Measure::Frequency: return Attribute::Frequency;
    case Measure::Misclassification: break;
  }
  return Attribute::Misclassification;
}

json encode_labels(const TrainingRun& run, std::span<const ClassId> classes) {
  json out = json::array();
  for (auto c : classes) out.push_back(run.label(c));
  return out;
}

json encode_box(const BoxStats& b) {
  return json{{"min", b.min}, {"q1", b.q1}, {"median", b.median}, {"q3", b.q3}, {"max", b.max}};
}

std::optional<long long> optional_int(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer()) throw InvalidArgument(std::string(key) + " must be an integer", path);
  return it->get<long long>();
}

Filter decode_filter(const TrainingRun& run, const json& j, const std::string& path) {
  if (!j.is_object()) throw InvalidArgument("filter must be an object", path);
  const auto type = field(j, "type", path).get<std::string>();
  if (type == "numeric_range") {
    NumericRange f;
    f.attribute = parse_attribute(field(j, "attribute", path).get<std::string>());
    f.lo = field(j, "lo", path).get<double>();
    f.hi = field(j, "hi", path).get<double>();
    return f;
  }
  if (type == "class_equals") {
    ClassEquals f;
    f.attribute = parse_attribute(j.value("attribute", std::string("true_class")));
    f.cls = decode_class(run, field(j, "class", path).get<std::string>());
    return f;
  }
  if (type == "sequence_regex") return SequenceRegex{field(j, "pattern", path).get<std::string>()};
  if (type == "ever_predicted") {
    EverPredicted f;
    const auto& classes = field(j, "classes", path);
    if (!classes.is_array()) throw InvalidArgument("classes must be an array", path);
    for (const auto& c : classes) f.classes.push_back(decode_class(run, c.get<std::string>()));
    return f;
  }
  if (type == "has_incorrect") return HasIncorrect{j.value("value", true)};
  throw InvalidArgument("unknown filter type '" + type + "'", path + ".type");
}

json encode_filter(const TrainingRun& run, const Filter& filter) {
  return std::visit(
      [&](const auto& f) -> json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, NumericRange>) {
          return {{"type", "numeric_range"},
                  {"attribute", to_string(f.attribute)},
                  {"lo", f.lo},
                  {"hi", f.hi}};
        } else if constexpr (std::is_same_v<T, ClassEquals>) {
          return {{"type", "class_equals"},
                  {"attribute", to_string(f.attribute)},
                  {"class", run.label(f.cls)}};
        } else if constexpr (std::is_same_v<T, SequenceRegex>) {
          return {{"type", "sequence_regex"}, {"pattern", f.pattern}};
        } else if constexpr (std::is_same_v<T, EverPredicted>) {
          return {{"type", "ever_predicted"}, {"classes", encode_labels(run, f.classes)}};
        } else {
          return {{"type", "has_incorrect"}, {"value", f.flag}};
        }
      },
      filter);
}

}  // namespace

json encode_bin(const TrainingRun& run, const BinId& bin) {
  if (bin.other) return json{{"label", kOtherToken}, {"other", true}};
  return json{{"label", run.label(bin.cls)}, {"class", bin.cls}};
}

BinId decode_bin(const TrainingRun& run, const std::string& token) {
  if (token == kOtherEscape) return BinId::other_bin();
  if (auto c = run.find_class(token)) return BinId::of_class(*c);
  if (token == kOtherToken) return BinId::other_bin();
  throw InvalidArgument("unknown bin '" + token + "'", "bin");
}

ClassId decode_class(const TrainingRun& run, const std::string& label) {
  if (auto c = run.find_class(label)) return *c;
  throw InvalidArgument("unknown class '" + label + "'", "classes");
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  if (csv.empty()) return out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

ClassSelection decode_selection(const TrainingRun& run, const std::vector<std::string>& labels) {
  if (labels.empty()) return ClassSelection::all(run, true);
  std::vector<ClassId> ids;
  for (const auto& l : labels) ids.push_back(decode_class(run, l));
  try {
    return ClassSelection(std::move(ids), true, run.class_count());
  } catch (const ValidationError& e) {
    throw InvalidArgument(e.what(), "classes");
  }
}

std::string encode_selection(const TrainingRun& run, const ClassSelection& sel) {
  std::string out;
  for (auto c : sel.selected()) {
    if (!out.empty()) out.push_back(',');
    out += run.label(c);
  }
  return out;
}

EpochRange decode_range(const TrainingRun& run, std::optional<long long> from,
                        std::optional<long long> to) {
  const auto e = static_cast<long long>(run.epoch_count());
  const auto first = from.value_or(1);
  const auto last = to.value_or(e);
  if (first < 1 || last > e || first > last) {
    throw InvalidArgument("epoch range " + std::to_string(first) + ".." + std::to_string(last) +
                              " outside 1.." + std::to_string(e),
                          "from/to");
  }
  return EpochRange(static_cast<std::size_t>(first - 1), static_cast<std::size_t>(last - 1),
                    run.epoch_count());
}

json encode_range(const EpochRange& range) {
  return json{{"from", range.first() + 1}, {"to", range.last() + 1}};
}

Measure decode_measure(const std::string& name) {
  if (name == "S") return Measure::Misclassification;
  if (name == "V") return Measure::Variability;
  if (name == "F") return Measure::Frequency;
  throw UnknownAttribute("unknown difficulty measure '" + name + "'", "rankBy");
}

const char* measure_name(Measure m) noexcept {
  switch (m) {
    case Measure::Variability: return "V";
    case Measure::Frequency: return "F";
    case Measure::Misclassification: break;
  }
  return "S";
}

json encode_scores(const TrainingRun& run, const EpochRange& range, const DifficultyScores& scores) {
  json rows = json::array();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto& s = scores[i];
    rows.push_back({{"id", run.instance(i).instance_id},
                    {"S", s.misclassification.to_double()},
                    {"V", s.variability.to_double()},
                    {"F", s.frequency.to_double()}});
  }
  return json{{"range", encode_range(range)}, {"scores", std::move(rows)}};
}

json encode_flow(const TrainingRun& run, const FlowFrame& frame) {
  json bins = json::array();
  for (const auto& b : frame.bins) bins.push_back(encode_bin(run, b));

  json epochs = json::array();
  for (std::size_t e = 0; e < frame.distributions.size(); ++e) {
    json cells = json::array();
    for (const auto& c : frame.distributions[e]) {
      cells.push_back({{"correct", c.correct}, {"incorrect", c.incorrect}});
    }
    epochs.push_back({{"epoch", frame.range.first() + e + 1}, {"bins", std::move(cells)}});
  }

  json transitions = json::array();
  for (std::size_t e = 0; e < frame.transitions.size(); ++e) {
    const auto& m = frame.transitions[e];
    json matrix = json::array();
    for (std::size_t a = 0; a < m.bins(); ++a) {
      json row = json::array();
      for (std::size_t b = 0; b < m.bins(); ++b) row.push_back(m.at(a, b));
      matrix.push_back(std::move(row));
    }
    const auto from = frame.range.first() + e + 1;
    transitions.push_back({{"from_epoch", from}, {"to_epoch", from + 1}, {"flow", std::move(matrix)}});
  }

  return json{{"range", encode_range(frame.range)},
              {"bins", std::move(bins)},
              {"instances", frame.instance_count},
              {"distributions", std::move(epochs)},
              {"transitions", std::move(transitions)}};
}

FlowFrame decode_flow(const TrainingRun& run, const json& j) {
  const auto& r = j.at("range");
  FlowFrame frame{decode_range(run, r.at("from").get<long long>(), r.at("to").get<long long>()),
                  {}, j.at("instances").get<std::size_t>(), {}, {}};
  for (const auto& b : j.at("bins")) {
    frame.bins.push_back(b.value("other", false) ? BinId::other_bin()
                                                 : BinId::of_class(b.at("class").get<ClassId>()));
  }
  for (const auto& e : j.at("distributions")) {
    std::vector<BinCounts> cells;
    for (const auto& c : e.at("bins")) {
      cells.push_back({c.at("correct").get<std::size_t>(), c.at("incorrect").get<std::size_t>()});
    }
    frame.distributions.push_back(std::move(cells));
  }
  for (const auto& t : j.at("transitions")) {
    const auto& rows = t.at("flow");
    FlowMatrix m(rows.size());
    for (std::size_t a = 0; a < rows.size(); ++a) {
      for (std::size_t b = 0; b < rows[a].size(); ++b) m.at(a, b) = rows[a][b].get<std::size_t>();
    }
    frame.transitions.push_back(std::move(m));
  }
  return frame;
}

json encode_glyphs(const TrainingRun& run, const EpochRange& range, Measure rank_by,
                   const std::vector<std::vector<GlyphInfo>>& glyphs) {
  json epochs = json::array();
  for (std::size_t e = 0; e < glyphs.size(); ++e) {
    json items = json::array();
    for (const auto& g : glyphs[e]) {
      items.push_back({{"id", g.instance_id},
                       {"bin", encode_bin(run, g.bin)},
                       {"category", to_string(g.category)},
                       {"slot", to_string(g.slot)},
                       {"rank", g.rank_measure.to_double()},
                       {"order", g.vertical_order}});
    }
    epochs.push_back({{"epoch", range.first() + e + 1}, {"glyphs", std::move(items)}});
  }
  return json{{"range", encode_range(range)},
              {"rank_by", measure_name(rank_by)},
              {"epochs", std::move(epochs)}};
}

json encode_traces(const TrainingRun& run, const std::vector<TraceSegment>& segments) {
  json out = json::array();
  for (const auto& s : segments) {
    out.push_back({{"id", s.instance_id},
                   {"from_epoch", s.from_epoch + 1},
                   {"to_epoch", s.from_epoch + 2},
                   {"from_bin", encode_bin(run, s.from_bin)},
                   {"to_bin", encode_bin(run, s.to_bin)},
                   {"correct", s.correctness == Correctness::Correct}});
  }
  return json{{"segments", std::move(out)}};
}

json encode_confusion(const TrainingRun& run, const EpochRange& range, const ConfusionMatrix& cm) {
  json matrix = json::array();
  for (std::size_t t = 0; t < cm.classes; ++t) {
    json row = json::array();
    for (std::size_t p = 0; p < cm.classes; ++p) row.push_back(cm.at(t, p));
    matrix.push_back(std::move(row));
  }
  return json{{"range", encode_range(range)},
              {"classes", run.class_labels()},
              {"matrix", std::move(matrix)}};
}

ConfusionMatrix decode_confusion(const TrainingRun& run, const json& j) {
  ConfusionMatrix cm{run.class_count(), {}};
  for (const auto& row : j.at("matrix")) {
    for (const auto& v : row) cm.counts.push_back(v.get<std::size_t>());
  }
  if (cm.counts.size() != cm.classes * cm.classes) {
    throw InvalidArgument("confusion matrix has the wrong shape", "matrix");
  }
  return cm;
}

TableSpec decode_table_spec(const TrainingRun& run, const json& j) {
  if (!j.is_object()) throw InvalidArgument("table spec must be an object", "$");
  try {
    std::vector<std::string> labels;
    if (auto it = j.find("classes"); it != j.end() && !it->is_null()) {
      labels = it->get<std::vector<std::string>>();
    }
    TableSpec spec{decode_range(run, optional_int(j, "from", "$"), optional_int(j, "to", "$")),
                   decode_selection(run, labels)};

    if (auto it = j.find("sort"); it != j.end()) {
      for (std::size_t k = 0; k < it->size(); ++k) {
        const auto path = "$.sort[" + std::to_string(k) + "]";
        const auto& s = (*it)[k];
        spec.sort.push_back({parse_attribute(field(s, "attribute", path).get<std::string>()),
                             decode_direction(s.value("direction", json("desc")), path)});
      }
    }
    if (auto it = j.find("combined"); it != j.end()) {
      for (std::size_t k = 0; k < it->size(); ++k) {
        const auto path = "$.combined[" + std::to_string(k) + "]";
        const auto& w = (*it)[k];
        spec.combined.push_back(
            {measure_for(parse_attribute(field(w, "attribute", path).get<std::string>())),
             field(w, "weight", path).get<double>(),
             decode_direction(w.value("direction", json("desc")), path)});
      }
    }
    if (auto it = j.find("filters"); it != j.end()) {
      for (std::size_t k = 0; k < it->size(); ++k) {
        spec.filters.push_back(decode_filter(run, (*it)[k], "$.filters[" + std::to_string(k) + "]"));
      }
    }
    if (auto it = j.find("group_by"); it != j.end() && !it->is_null()) {
      spec.group_by = parse_attribute(it->get<std::string>());
    }
    spec.mode = decode_mode(j.value("mode", std::string("full")));
    spec.default_filter = j.value("default_filter", true);
    spec.offset = j.value("offset", std::size_t{0});
    if (auto it = j.find("limit"); it != j.end() && !it->is_null()) {
      spec.limit = it->get<std::size_t>();
    }
    return spec;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed table spec: ") + e.what(), "$");
  }
}

json encode_table_spec(const TrainingRun& run, const TableSpec& spec) {
  json j = encode_range(spec.range);
  j["classes"] = encode_labels(run, spec.sel.selected());
  json sort = json::array();
  for (const auto& s : spec.sort) {
    sort.push_back({{"attribute", to_string(s.attribute)}, {"direction", direction_name(s.direction)}});
  }
  j["sort"] = std::move(sort);
  json combined = json::array();
  for (const auto& w : spec.combined) {
    combined.push_back({{"attribute", to_string(attribute_for(w.measure))},
                        {"weight", w.weight},
                        {"direction", direction_name(w.direction)}});
  }
  j["combined"] = std::move(combined);
  json filters = json::array();
  for (const auto& f : spec.filters) filters.push_back(encode_filter(run, f));
  j["filters"] = std::move(filters);
  j["group_by"] = spec.group_by ? json(to_string(*spec.group_by)) : json(nullptr);
  j["mode"] = mode_name(spec.mode);
  j["default_filter"] = spec.default_filter;
  j["offset"] = spec.offset;
  j["limit"] = spec.limit ? json(*spec.limit) : json(nullptr);
  return j;
}

json encode_table_page(const TrainingRun& run, const TablePage& page) {
  json rows = json::array();
  for (const auto& r : page.rows) {
    json marks = json::array();
    for (auto m : r.correctness_sequence) marks.push_back(mark_name(m));
    json row{{"id", r.instance_id},
             {"image", r.payload_ref ? json(*r.payload_ref) : json(nullptr)},
             {"true_class", run.label(r.true_class)},
             {"S", r.scores.misclassification.to_double()},
             {"V", r.scores.variability.to_double()},
             {"F", r.scores.frequency.to_double()},
             {"predictions", encode_labels(run, r.prediction_sequence)},
             {"marks", std::move(marks)},
             {"histogram",
              {{"correct", r.correctness_histogram[0]},
               {"incorrect", r.correctness_histogram[1]},
               {"other", r.correctness_histogram[2]}}}};
    if (r.combined) row["combined"] = *r.combined;
    rows.push_back(std::move(row));
  }

  json groups = json::array();
  for (const auto& g : page.groups) {
    json hist = json::object();
    for (std::size_t c = 0; c < g.prediction_histogram.size(); ++c) {
      hist[run.label(static_cast<ClassId>(c))] = g.prediction_histogram[c];
    }
    groups.push_back({{"key", run.label(g.key)},
                      {"size", g.size},
                      {"prediction_histogram", std::move(hist)},
                      {"measures",
                       {{"S", encode_box(g.measures[0])},
                        {"V", encode_box(g.measures[1])},
                        {"F", encode_box(g.measures[2])}}}});
  }
  return json{{"total_rows", page.total_rows},
              {"rows", std::move(rows)},
              {"total_groups", page.total_groups},
              {"groups", std::move(groups)}};
}

}  // namespace iflow::codec
