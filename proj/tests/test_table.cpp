#include "doctest.h"

#include <algorithm>
#include <regex>
#include <set>

#include "iflow/errors.hpp"
#include "iflow/fixtures.hpp"
#include "iflow/table.hpp"
#include "oracle.hpp"

using namespace iflow;

namespace {

const TrainingRun& worked() {
  static const auto run = fixtures::worked_run();
  return run;
}

TableSpec base_spec(const TrainingRun& run) {
  return TableSpec{EpochRange::full(run), ClassSelection::all(run)};
}

std::vector<std::string> ids_of(const TablePage& page) {
  std::vector<std::string> out;
  for (const auto& row : page.rows) out.push_back(row.instance_id);
  return out;
}

using Ids = std::vector<std::string>;

}  // namespace

TEST_CASE("default spec hides always-correct instances") {
  const auto page = query_table(worked(), base_spec(worked()));
  CHECK(page.total_rows == 3);
  CHECK(ids_of(page) == Ids{"i2", "i3", "i4"});

  auto spec = base_spec(worked());
  spec.default_filter = false;
  CHECK(query_table(worked(), spec).total_rows == 4);

  spec.filters = {HasIncorrect{false}};
  CHECK(ids_of(query_table(worked(), spec)) == Ids{"i1"});
}

TEST_CASE("sort keys with id tie-break") {
  auto spec = base_spec(worked());
  spec.sort = {{Attribute::Misclassification, Direction::Descending},
               {Attribute::Variability, Direction::Ascending}};
  CHECK(ids_of(query_table(worked(), spec)) == Ids{"i4", "i2", "i3"});

  spec.sort = {{Attribute::Frequency, Direction::Ascending}};
  CHECK(ids_of(query_table(worked(), spec)) == Ids{"i2", "i3", "i4"});

  spec.sort = {{Attribute::InstanceId, Direction::Descending}};
  CHECK(ids_of(query_table(worked(), spec)) == Ids{"i4", "i3", "i2"});
}

TEST_CASE("row contents") {
  const auto page = query_table(worked(), base_spec(worked()));
  const auto& i4 = page.rows[2];
  CHECK(i4.instance_id == "i4");
  CHECK(i4.payload_ref == std::nullopt);
  CHECK(i4.true_class == 2);
  CHECK(i4.scores.misclassification == Rational(2, 3));
  CHECK(i4.prediction_sequence == std::vector<ClassId>{0, 1, 2});
  CHECK(i4.correctness_sequence ==
        std::vector<Mark>{Mark::IncorrectSelected, Mark::IncorrectSelected, Mark::Correct});
  CHECK(i4.correctness_histogram == std::array<std::size_t, 3>{1, 2, 0});

  // with only C selected, the wrong predictions land in Other
  auto spec = base_spec(worked());
  spec.sel = ClassSelection({2}, true, 3);
  const auto narrowed = query_table(worked(), spec);
  CHECK(narrowed.rows[2].correctness_histogram == std::array<std::size_t, 3>{1, 0, 2});
}

TEST_CASE("group summary on the worked run") {
  auto spec = base_spec(worked());
  spec.group_by = Attribute::TrueClass;
  spec.mode = TableMode::GroupSummary;
  const auto page = query_table(worked(), spec);
  REQUIRE(page.groups.size() == 3);
  CHECK(page.total_groups == 3);
  CHECK(page.rows.empty());
  const auto& a = page.groups[0];
  CHECK(a.key == 0);
  CHECK(a.size == 2);
  CHECK(a.prediction_histogram == std::vector<std::size_t>{5, 1, 0});
  CHECK(a.measures[0].min == 0.0);
  CHECK(a.measures[0].max == doctest::Approx(1.0 / 3));
  CHECK(page.groups[1].prediction_histogram == std::vector<std::size_t>{0, 2, 1});
  CHECK(page.groups[2].prediction_histogram == std::vector<std::size_t>{1, 1, 1});
}

TEST_CASE("grouped rows are ordered by group first") {
  const auto run = fixtures::random_run(8, 40, 4, 5);
  auto spec = base_spec(run);
  spec.group_by = Attribute::TrueClass;
  spec.sort = {{Attribute::Misclassification, Direction::Descending}};
  const auto page = query_table(run, spec);
  CHECK_FALSE(page.groups.empty());
  for (std::size_t r = 1; r < page.rows.size(); ++r) {
    const auto& p = page.rows[r - 1];
    const auto& c = page.rows[r];
    CHECK(p.true_class <= c.true_class);
    if (p.true_class == c.true_class) {
      CHECK(p.scores.misclassification >= c.scores.misclassification);
    }
  }
}

TEST_CASE("sequence regex filter") {
  const auto range = EpochRange::full(worked());
  CHECK(sequence_string(worked(), 1, range) == "B,A,A");
  CHECK(filter_sequence_regex(worked(), range, "^B") == Ids{"i2", "i3"});
  CHECK(filter_sequence_regex(worked(), range, "^Z").empty());
  CHECK(filter_sequence_regex(worked(), range, "C$") == Ids{"i4"});
  CHECK(filter_sequence_regex(worked(), EpochRange(1, 2, 3), "^A,A$") == Ids{"i1", "i2"});
  CHECK_THROWS_AS(filter_sequence_regex(worked(), range, "(["), InvalidRegex);

  auto spec = base_spec(worked());
  spec.filters = {SequenceRegex{"["}};
  CHECK_THROWS_AS(query_table(worked(), spec), InvalidRegex);
}

TEST_CASE("confusion summary on the worked run") {
  const auto m = confusion_summary(worked(), EpochRange::full(worked()));
  CHECK(m.classes == 3);
  CHECK(m.counts == std::vector<std::size_t>{5, 1, 0, 0, 2, 1, 1, 1, 1});
  CHECK(confusion_summary(worked(), EpochRange(0, 0, 3)).at(0, 1) == 1);
}

TEST_CASE("unknown attributes are rejected") {
  CHECK_THROWS_AS(parse_attribute("loss"), UnknownAttribute);
  CHECK(parse_attribute("S") == Attribute::Misclassification);
  CHECK(parse_attribute("prediction_sequence") == Attribute::PredictionSequence);

  auto spec = base_spec(worked());
  spec.group_by = Attribute::Frequency;
  CHECK_THROWS_AS(query_table(worked(), spec), UnknownAttribute);

  spec = base_spec(worked());
  spec.filters = {NumericRange{Attribute::PredictionSequence, 0, 1}};
  CHECK_THROWS_AS(query_table(worked(), spec), UnknownAttribute);

  spec.filters = {ClassEquals{Attribute::Variability, 0}};
  CHECK_THROWS_AS(query_table(worked(), spec), UnknownAttribute);
}

TEST_CASE("condensed mode carries the same rows as full") {
  const auto run = fixtures::random_run(13, 30, 5, 6);
  auto spec = base_spec(run);
  spec.sort = {{Attribute::Variability, Direction::Descending}};
  const auto full = query_table(run, spec);
  spec.mode = TableMode::Condensed;
  const auto condensed = query_table(run, spec);
  CHECK(ids_of(full) == ids_of(condensed));
  CHECK(full.total_rows == condensed.total_rows);
}

TEST_CASE("filters agree with a naive rescan") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const std::size_t n = 2 + seed % 4;
    const std::size_t e = 2 + seed % 6;
    const auto run = fixtures::random_run(seed, 25, n, e);
    const auto plain = oracle::copy(run);
    const EpochRange range(seed % 2, e - 1, e);
    const auto a = range.first(), b = range.last();
    const ClassId target = static_cast<ClassId>(seed % n);
    const std::string pattern = "^" + run.label(target);

    auto spec = base_spec(run);
    spec.range = range;
    spec.default_filter = seed % 3 != 0;
    spec.filters = {NumericRange{Attribute::Misclassification, 0.2, 0.8},
                    EverPredicted{{target}}, SequenceRegex{pattern}};
    const auto page = query_table(run, spec);

    std::set<std::string> expected;
    const std::regex re(pattern);
    for (std::size_t i = 0; i < plain.ids.size(); ++i) {
      const auto s = oracle::misclassification(plain, i, a, b);
      const double sv = static_cast<double>(s.num) / static_cast<double>(s.den);
      if (sv < 0.2 || sv > 0.8) continue;
      bool ever = false;
      for (auto j = a; j <= b; ++j) ever |= plain.preds[i][j] == target;
      if (!ever) continue;
      if (!std::regex_search(oracle::sequence(plain, i, a, b), re)) continue;
      if (spec.default_filter && s.num == 0) continue;
      expected.insert(plain.ids[i]);
    }
    const auto got = ids_of(page);
    CHECK(std::set<std::string>(got.begin(), got.end()) == expected);
    CHECK(got.size() == expected.size());
    CHECK(page.total_rows == expected.size());
  }
}

TEST_CASE("true class filters") {
  const auto run = fixtures::random_run(4, 30, 3, 4);
  auto spec = base_spec(run);
  spec.default_filter = false;
  spec.filters = {ClassEquals{Attribute::TrueClass, 1}};
  for (const auto& row : query_table(run, spec).rows) CHECK(row.true_class == 1);
  spec.filters = {NumericRange{Attribute::TrueClass, 1, 2}};
  for (const auto& row : query_table(run, spec).rows) CHECK(row.true_class >= 1);
}

TEST_CASE("pagination slices the sorted table") {
  const auto run = fixtures::random_run(31, 50, 4, 6);
  auto spec = base_spec(run);
  spec.sort = {{Attribute::Frequency, Direction::Descending}};
  const auto all = ids_of(query_table(run, spec));
  spec.offset = 5;
  spec.limit = 7;
  const auto page = query_table(run, spec);
  CHECK(page.total_rows == all.size());
  REQUIRE(page.rows.size() == std::min<std::size_t>(7, all.size() - 5));
  for (std::size_t r = 0; r < page.rows.size(); ++r) CHECK(page.rows[r].instance_id == all[5 + r]);

  spec.offset = all.size() + 3;
  CHECK(query_table(run, spec).rows.empty());
}

TEST_CASE("combined ranking in the table") {
  auto spec = base_spec(worked());
  spec.combined = {{Measure::Misclassification, 1, Direction::Descending},
                   {Measure::Variability, 1, Direction::Ascending}};
  const auto page = query_table(worked(), spec);
  CHECK(ids_of(page) == Ids{"i2", "i3", "i4"});
  for (const auto& row : page.rows) {
    REQUIRE(row.combined);
    CHECK(*row.combined == doctest::Approx(0.5));
  }
  spec.combined = {{Measure::Frequency, 0, Direction::Descending}};
  CHECK_THROWS_AS(query_table(worked(), spec), InvalidWeights);
}

TEST_CASE("group histograms stack to the confusion matrix") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const auto run = fixtures::random_run(seed, 30, 2 + seed % 4, 1 + seed % 6);
    auto spec = base_spec(run);
    spec.group_by = Attribute::TrueClass;
    spec.mode = TableMode::GroupSummary;
    const auto page = query_table(run, spec);
    const auto m = confusion_summary(run, spec.range);
    const auto expected = oracle::confusion(oracle::copy(run), spec.range.first(), spec.range.last());
    for (const auto& g : page.groups) {
      for (std::size_t p = 0; p < run.class_count(); ++p) {
        CHECK(g.prediction_histogram[p] == m.at(g.key, p));
        auto it = expected.find({g.key, static_cast<int>(p)});
        CHECK(m.at(g.key, p) == (it == expected.end() ? 0 : it->second));
      }
    }
  }
}

TEST_CASE("box stats use linear interpolation") {
  const auto s = box_stats({4, 1, 3, 2});
  CHECK(s.min == 1);
  CHECK(s.q1 == doctest::Approx(1.75));
  CHECK(s.median == doctest::Approx(2.5));
  CHECK(s.q3 == doctest::Approx(3.25));
  CHECK(s.max == 4);
  const auto one = box_stats({0.5});
  CHECK(one.q1 == 0.5);
  CHECK(one.q3 == 0.5);
}
