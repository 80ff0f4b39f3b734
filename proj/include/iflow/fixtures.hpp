#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "iflow/model.hpp"

namespace iflow::fixtures {

// 4 instances, classes {A, B, C}, 3 epochs:
//   i1 truth A: A A A     i2 truth A: B A A
//   i3 truth B: B C B     i4 truth C: A B C
RunDocument worked_document();
TrainingRun worked_run();

// Uniform truths and predictions from a seeded mt19937_64. Instance ids
// are zero-padded ("i0007") so id order equals generation order.
RunDocument random_document(std::uint64_t seed, std::size_t m, std::size_t n, std::size_t epochs);
TrainingRun random_run(std::uint64_t seed, std::size_t m, std::size_t n, std::size_t epochs);

// Synthetic stand-in for a CIFAR-10 training log: 60,000 instances,
// 10 classes, 50 epochs. Two cohorts of "Auto" images are planted:
//  - flip cohort: correct early, then switches to "Truck" for good;
//  - recover cohort: wrong for the first few epochs, then stably correct.
struct CifarScenario {
  static constexpr std::size_t kInstances = 60000;
  static constexpr std::size_t kClasses = 10;
  static constexpr std::size_t kEpochs = 50;
  static constexpr std::size_t kFlipCohort = 120;
  static constexpr std::size_t kRecoverCohort = 120;

  RunDocument document;
  std::vector<std::string> flip_cohort;
  std::vector<std::string> recover_cohort;
};

CifarScenario cifar_scenario(std::uint64_t seed);
TrainingRun cifar_scenario_run(std::uint64_t seed);

// Class names in CIFAR-10 order with "Auto" for automobile.
const std::vector<std::string>& cifar_classes();

}  // namespace iflow::fixtures
