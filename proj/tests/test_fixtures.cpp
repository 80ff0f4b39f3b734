#include "doctest.h"

#include <algorithm>
#include <set>

#include "iflow/fixtures.hpp"
#include "iflow/ingest.hpp"
#include "iflow/metrics.hpp"
#include "iflow/table.hpp"

using namespace iflow;

TEST_CASE("random fixtures are deterministic per seed") {
  CHECK(canonical_json(fixtures::random_document(3, 10, 4, 5)) ==
        canonical_json(fixtures::random_document(3, 10, 4, 5)));
  CHECK(content_digest(fixtures::random_document(3, 10, 4, 5)) !=
        content_digest(fixtures::random_document(4, 10, 4, 5)));
  const auto doc = fixtures::random_document(9, 12, 3, 2);
  CHECK(doc.instances.size() == 12);
  CHECK(doc.instances[7].id == "i0007");
  CHECK(doc.classes.size() == 3);
}

TEST_CASE("worked fixture matches its description") {
  const auto run = fixtures::worked_run();
  CHECK(run.class_labels() == std::vector<std::string>{"A", "B", "C"});
  const auto p = run.predictions(3);
  CHECK(std::vector<ClassId>(p.begin(), p.end()) == std::vector<ClassId>{0, 1, 2});
}

TEST_CASE("cifar scenario plants its cohorts") {
  const auto scenario = fixtures::cifar_scenario(1);
  CHECK(content_digest(scenario.document) == content_digest(fixtures::cifar_scenario(1).document));
  const auto run = build_run(scenario.document, "cifar");
  CHECK(run.instance_count() == fixtures::CifarScenario::kInstances);
  CHECK(run.class_count() == 10);
  CHECK(run.epoch_count() == 50);
  CHECK(scenario.flip_cohort.size() == fixtures::CifarScenario::kFlipCohort);
  CHECK(scenario.recover_cohort.size() == fixtures::CifarScenario::kRecoverCohort);

  const ClassId automobile = *run.find_class("Auto");
  const ClassId truck = *run.find_class("Truck");
  const auto range = EpochRange::full(run);

  std::set<std::string> cohort(scenario.flip_cohort.begin(), scenario.flip_cohort.end());
  for (const auto& id : scenario.recover_cohort) CHECK_FALSE(cohort.count(id));

  for (const auto& id : scenario.flip_cohort) {
    const auto i = *run.find_instance(id);
    CHECK(run.instance(i).true_class == automobile);
    CHECK(misclassification_score(run, i, range) > Rational(1, 2));
    CHECK(variability(run, i, range) == Rational(2, 10));
    CHECK(run.predictions(i)[0] == automobile);
    CHECK(run.predictions(i)[49] == truck);
  }
  for (const auto& id : scenario.recover_cohort) {
    const auto i = *run.find_instance(id);
    CHECK(run.instance(i).true_class == automobile);
    CHECK(run.predictions(i)[0] != automobile);
    CHECK(run.predictions(i)[49] == automobile);
  }

  const auto cm = confusion_summary(run, range);
  std::size_t best = 0, bt = 0, bp = 0;
  for (std::size_t t = 0; t < 10; ++t) {
    for (std::size_t p = 0; p < 10; ++p) {
      if (t != p && cm.at(t, p) > best) {
        best = cm.at(t, p);
        bt = t;
        bp = p;
      }
    }
  }
  CHECK(bt == automobile);
  CHECK(bp == truck);
}
