#include "iflow/fixtures.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "iflow/ingest.hpp"

namespace iflow::fixtures {

namespace {

// mt19937_64 output is fully specified by the standard; the distributions
// are not, so sampling is done by hand to keep runs bit-identical across
// standard libraries.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t bound) { return engine_() % bound; }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }
  // Number of failures before the first success with probability p.
  std::size_t geometric(double p) {
    const double u = 1.0 - unit();  // (0, 1]
    return static_cast<std::size_t>(std::floor(std::log(u) / std::log1p(-p)));
  }

 private:
  std::mt19937_64 engine_;
};

std::string padded(const char* prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
  return buf;
}

constexpr std::int64_t kAirplane = 0, kAuto = 1, kBird = 2, kCat = 3, kDeer = 4, kDog = 5,
                       kFrog = 6, kHorse = 7, kShip = 8, kTruck = 9;

std::int64_t partner_of(std::int64_t c) {
  switch (c) {
    case kAuto: return kTruck;
    case kTruck: return kAuto;
    case kCat: return kDog;
    case kDog: return kCat;
    case kDeer: return kHorse;
    case kHorse: return kDeer;
    case kAirplane: return kShip;
    case kShip: return kAirplane;
    case kBird: return kFrog;
    default: return kBird;  // frog
  }
}

}  // namespace

RunDocument worked_document() {
  RunDocument doc;
  doc.classes = {"A", "B", "C"};
  doc.epochs = 3;
  doc.metadata = {{"dataset", "worked-example"}};
  doc.instances = {
      {"i1", 0, {0, 0, 0}, std::nullopt},
      {"i2", 0, {1, 0, 0}, std::nullopt},
      {"i3", 1, {1, 2, 1}, std::nullopt},
      {"i4", 2, {0, 1, 2}, std::nullopt},
  };
  return doc;
}

TrainingRun worked_run() {
  const auto doc = worked_document();
  return build_run(doc, content_digest(doc));
}

RunDocument random_document(std::uint64_t seed, std::size_t m, std::size_t n, std::size_t epochs) {
  Sampler rng(seed);
  RunDocument doc;
  for (std::size_t c = 0; c < n; ++c) doc.classes.push_back(padded("c", c, 2));
  doc.epochs = static_cast<std::int64_t>(epochs);
  doc.metadata = {{"dataset", "random"}, {"seed", std::to_string(seed)}};
  doc.instances.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    RunDocument::Instance inst;
    inst.id = padded("i", i, 4);
    inst.label = static_cast<std::int64_t>(rng.below(n));
    for (std::size_t j = 0; j < epochs; ++j) {
      inst.predictions.push_back(static_cast<std::int64_t>(rng.below(n)));
    }
    doc.instances.push_back(std::move(inst));
  }
  return doc;
}

TrainingRun random_run(std::uint64_t seed, std::size_t m, std::size_t n, std::size_t epochs) {
  const auto doc = random_document(seed, m, n, epochs);
  return build_run(doc, content_digest(doc));
}

const std::vector<std::string>& cifar_classes() {
  static const std::vector<std::string> names{"Airplane", "Auto", "Bird",  "Cat",  "Deer",
                                              "Dog",      "Frog", "Horse", "Ship", "Truck"};
  return names;
}

CifarScenario cifar_scenario(std::uint64_t seed) {
  using S = CifarScenario;
  Sampler rng(seed);

  CifarScenario out;
  auto& doc = out.document;
  doc.classes = cifar_classes();
  doc.epochs = static_cast<std::int64_t>(S::kEpochs);
  doc.metadata = {{"dataset", "cifar10-synthetic"},
                  {"seed", std::to_string(seed)},
                  {"split", "train"}};

  // Planted cohorts are drawn from the Auto instances (truth = i % 10).
  std::vector<std::size_t> autos;
  for (std::size_t i = kAuto; i < S::kInstances; i += S::kClasses) autos.push_back(i);
  for (std::size_t r = autos.size() - 1; r > 0; --r) std::swap(autos[r], autos[rng.below(r + 1)]);
  enum class Role { Background, Flip, Recover };
  std::vector<Role> role(S::kInstances, Role::Background);
  for (std::size_t r = 0; r < S::kFlipCohort; ++r) role[autos[r]] = Role::Flip;
  for (std::size_t r = 0; r < S::kRecoverCohort; ++r) role[autos[S::kFlipCohort + r]] = Role::Recover;

  auto wrong_class = [&](std::int64_t truth) {
    const double partner_share = truth == kAuto ? 0.8 : 0.6;
    if (rng.chance(partner_share)) return partner_of(truth);
    auto c = static_cast<std::int64_t>(rng.below(S::kClasses - 1));
    return c >= truth ? c + 1 : c;
  };

  doc.instances.reserve(S::kInstances);
  for (std::size_t i = 0; i < S::kInstances; ++i) {
    RunDocument::Instance inst;
    inst.id = padded("img", i, 5);
    const auto truth = static_cast<std::int64_t>(i % S::kClasses);
    inst.label = truth;
    auto& preds = inst.predictions;
    preds.reserve(S::kEpochs);

    switch (role[i]) {
      case Role::Flip: {
        const auto flip_at = 6 + rng.below(15);  // epochs 6..20
        for (std::size_t j = 0; j < S::kEpochs; ++j) preds.push_back(j < flip_at ? kAuto : kTruck);
        out.flip_cohort.push_back(inst.id);
        break;
      }
      case Role::Recover: {
        const auto settle_at = 2 + rng.below(5);  // epochs 2..6
        for (std::size_t j = 0; j < S::kEpochs; ++j) {
          preds.push_back(j < settle_at ? wrong_class(truth) : truth);
        }
        out.recover_cohort.push_back(inst.id);
        break;
      }
      case Role::Background: {
        const bool confusable = truth == kAuto || truth == kTruck;
        const bool hard = rng.chance(confusable ? 0.015 : 0.005);
        const double mean_learn = hard ? 10.0 : (confusable ? 5.0 : 3.0);
        const auto learned_at = rng.geometric(1.0 / (mean_learn + 1.0));
        const double late_error = hard ? 0.10 : 0.03;
        for (std::size_t j = 0; j < S::kEpochs; ++j) {
          const double p_wrong = j < learned_at ? 0.75 : late_error;
          preds.push_back(rng.chance(p_wrong) ? wrong_class(truth) : truth);
        }
        break;
      }
    }
    doc.instances.push_back(std::move(inst));
  }
  return out;
}

TrainingRun cifar_scenario_run(std::uint64_t seed) {
  const auto scenario = cifar_scenario(seed);
  return build_run(scenario.document, content_digest(scenario.document));
}

}  // namespace iflow::fixtures
