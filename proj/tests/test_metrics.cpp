#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "iflow/errors.hpp"
#include "iflow/fixtures.hpp"
#include "iflow/ingest.hpp"
#include "iflow/metrics.hpp"
#include "oracle.hpp"

using namespace iflow;

namespace {

const TrainingRun& worked() {
  static const auto run = fixtures::worked_run();
  return run;
}

std::size_t idx(const char* id) { return *worked().find_instance(id); }

}  // namespace

TEST_CASE("misclassification score on the worked run") {
  const auto full = EpochRange::full(worked());
  CHECK(misclassification_score(worked(), idx("i1"), full) == Rational(0, 1));
  CHECK(misclassification_score(worked(), idx("i4"), full) == Rational(2, 3));
  // epochs 2-3 (1-based) only
  CHECK(misclassification_score(worked(), idx("i2"), EpochRange(1, 2, 3)) == Rational(0, 1));
}

TEST_CASE("variability on the worked run") {
  const auto full = EpochRange::full(worked());
  CHECK(variability(worked(), idx("i1"), full) == Rational(1, 3));
  CHECK(variability(worked(), idx("i4"), full) == Rational(1, 1));
  CHECK(variability(worked(), idx("i3"), full) == Rational(2, 3));
}

TEST_CASE("frequency on the worked run") {
  const auto full = EpochRange::full(worked());
  CHECK(frequency(worked(), idx("i1"), full) == Rational(0, 1));
  CHECK(frequency(worked(), idx("i3"), full) == Rational(1, 1));
  CHECK(frequency(worked(), idx("i2"), full) == Rational(1, 2));
  // single epoch: no transitions
  CHECK(frequency(worked(), idx("i4"), EpochRange(1, 1, 3)) == Rational(0, 1));
}

TEST_CASE("score_all on the worked run") {
  const auto scores = score_all(worked(), EpochRange::full(worked()));
  REQUIRE(scores.size() == 4);
  const Rational expected[4][3] = {{{0, 1}, {1, 3}, {0, 1}},
                                   {{1, 3}, {2, 3}, {1, 2}},
                                   {{1, 3}, {2, 3}, {1, 1}},
                                   {{2, 3}, {1, 1}, {1, 1}}};
  for (std::size_t i = 0; i < 4; ++i) {
    CAPTURE(i);
    CHECK(scores[i].misclassification == expected[i][0]);
    CHECK(scores[i].variability == expected[i][1]);
    CHECK(scores[i].frequency == expected[i][2]);
  }
}

TEST_CASE("score_all edge cases") {
  SUBCASE("single-epoch range zeroes frequency") {
    const auto run = fixtures::random_run(3, 12, 4, 5);
    for (const auto& s : score_all(run, EpochRange(2, 2, 5))) CHECK(s.frequency == Rational(0, 1));
  }
  SUBCASE("always-correct run") {
    auto doc = fixtures::random_document(5, 10, 4, 6);
    for (auto& inst : doc.instances) std::fill(inst.predictions.begin(), inst.predictions.end(), inst.label);
    const auto run = build_run(doc, "r");
    for (const auto& s : score_all(run, EpochRange::full(run))) {
      CHECK(s.misclassification == Rational(0, 1));
      CHECK(s.variability == Rational(1, 4));
      CHECK(s.frequency == Rational(0, 1));
    }
  }
}

TEST_CASE("measures match brute force on random runs and every sub-range") {
  for (std::uint64_t seed = 100; seed < 160; ++seed) {
    const auto m = 1 + seed % 20;
    const auto n = 2 + seed % 5;
    const auto e = 1 + seed % 8;
    const auto run = fixtures::random_run(seed, m, n, e);
    const auto plain = oracle::copy(run);
    for (std::size_t a = 0; a < e; ++a) {
      for (std::size_t b = a; b < e; ++b) {
        const EpochRange range(a, b, e);
        const auto scores = score_all(run, range);
        for (std::size_t i = 0; i < m; ++i) {
          CHECK(oracle::same(oracle::misclassification(plain, i, a, b), scores[i].misclassification));
          CHECK(oracle::same(oracle::variability(plain, i, a, b), scores[i].variability));
          CHECK(oracle::same(oracle::frequency(plain, i, a, b), scores[i].frequency));
          CHECK(scores[i].misclassification == misclassification_score(run, i, range));
        }
      }
    }
  }
}

TEST_CASE("measures only see predictions inside the range") {
  auto doc = fixtures::random_document(7, 15, 5, 8);
  const auto before = build_run(doc, "r");
  const EpochRange range(2, 5, 8);
  for (auto& inst : doc.instances) {
    inst.predictions[0] = (inst.predictions[0] + 1) % 5;
    inst.predictions[7] = (inst.predictions[7] + 3) % 5;
  }
  const auto after = build_run(doc, "r");
  const auto s1 = score_all(before, range);
  const auto s2 = score_all(after, range);
  for (std::size_t i = 0; i < s1.size(); ++i) {
    CHECK(s1[i].misclassification == s2[i].misclassification);
    CHECK(s1[i].variability == s2[i].variability);
    CHECK(s1[i].frequency == s2[i].frequency);
  }
}

TEST_CASE("constant predictions <=> F = 0 <=> V = 1/n") {
  for (std::uint64_t seed = 1; seed < 40; ++seed) {
    // few classes and short runs so constant rows actually occur
    const auto run = fixtures::random_run(seed, 20, 2, 3);
    const auto plain = oracle::copy(run);
    const auto scores = score_all(run, EpochRange::full(run));
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const auto& p = plain.preds[i];
      const bool constant = std::all_of(p.begin(), p.end(), [&](int c) { return c == p[0]; });
      CHECK((scores[i].frequency == Rational(0, 1)) == constant);
      CHECK((scores[i].variability == Rational(1, 2)) == constant);
    }
  }
}

TEST_CASE("label permutation leaves measures unchanged") {
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto doc = fixtures::random_document(seed, 12, 5, 6);
    const auto original = build_run(doc, "a");
    std::vector<std::int64_t> perm(5);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (auto& inst : doc.instances) {
      inst.label = perm[static_cast<std::size_t>(inst.label)];
      for (auto& p : inst.predictions) p = perm[static_cast<std::size_t>(p)];
    }
    const auto permuted = build_run(doc, "b");
    const auto s1 = score_all(original, EpochRange::full(original));
    const auto s2 = score_all(permuted, EpochRange::full(permuted));
    for (std::size_t i = 0; i < s1.size(); ++i) {
      CHECK(s1[i].misclassification == s2[i].misclassification);
      CHECK(s1[i].variability == s2[i].variability);
      CHECK(s1[i].frequency == s2[i].frequency);
    }
  }
}

TEST_CASE("combined score") {
  const auto scores = score_all(worked(), EpochRange::full(worked()));

  SUBCASE("S desc + V asc on the worked run") {
    // S normalized: 0, .5, .5, 1; V normalized and flipped: 1, .5, .5, 0
    const auto values = combined_score(
        scores, {{Measure::Misclassification, 1, Direction::Descending},
                 {Measure::Variability, 1, Direction::Ascending}});
    for (auto v : values) CHECK(v == doctest::Approx(0.5));
    const auto order = rank_by_combined(
        worked(), scores,
        {{Measure::Misclassification, 1, Direction::Descending},
         {Measure::Variability, 1, Direction::Ascending}});
    const auto pos2 = std::find(order.begin(), order.end(), idx("i2"));
    const auto pos3 = std::find(order.begin(), order.end(), idx("i3"));
    CHECK(pos2 < pos3);
  }

  SUBCASE("single attribute reduces to a plain sort") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto run = fixtures::random_run(seed, 20, 4, 6);
      const auto s = score_all(run, EpochRange::full(run));
      const auto order = rank_by_combined(run, s, {{Measure::Frequency, 1, Direction::Descending}});
      std::vector<std::size_t> expected(s.size());
      std::iota(expected.begin(), expected.end(), std::size_t{0});
      std::stable_sort(expected.begin(), expected.end(), [&](std::size_t a, std::size_t b) {
        return s[a].frequency > s[b].frequency;
      });
      CHECK(order == expected);
    }
  }

  SUBCASE("identical scores keep instance id order") {
    auto doc = fixtures::random_document(9, 6, 3, 4);
    for (auto& inst : doc.instances) {
      inst.label = 0;
      inst.predictions = {0, 1, 1, 0};
    }
    std::reverse(doc.instances.begin(), doc.instances.end());
    const auto run = build_run(doc, "r");
    const auto s = score_all(run, EpochRange::full(run));
    const auto values = combined_score(s, {{Measure::Misclassification, 2, Direction::Descending}});
    for (auto v : values) CHECK(v == 0.0);
    const auto order = rank_by_combined(run, s, {{Measure::Misclassification, 1, Direction::Descending}});
    for (std::size_t r = 1; r < order.size(); ++r) {
      CHECK(run.instance(order[r - 1]).instance_id < run.instance(order[r]).instance_id);
    }
  }

  SUBCASE("invalid weights") {
    CHECK_THROWS_AS(combined_score(scores, {}), InvalidWeights);
    CHECK_THROWS_AS(combined_score(scores, {{Measure::Variability, 0, Direction::Descending}}),
                    InvalidWeights);
    CHECK_THROWS_AS(combined_score(scores, {{Measure::Variability, -1, Direction::Descending},
                                            {Measure::Frequency, 2, Direction::Descending}}),
                    InvalidWeights);
  }
}
