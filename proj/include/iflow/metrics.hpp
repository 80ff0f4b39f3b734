#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "iflow/model.hpp"
#include "iflow/rational.hpp"

namespace iflow {

enum class Measure { Misclassification, Variability, Frequency };

// Difficulty of one instance over an epoch range, kept as exact fractions.
struct InstanceScores {
  Rational misclassification;  // S: share of epochs predicted wrong
  Rational variability;        // V: distinct predicted classes / class count
  Rational frequency;          // F: share of transitions that change class

  const Rational& get(Measure m) const noexcept {
    switch (m) {
      case Measure::Variability: return variability;
      case Measure::Frequency: return frequency;
      case Measure::Misclassification: break;
    }
    return misclassification;
  }
};

// One entry per run instance, in run order.
using DifficultyScores = std::vector<InstanceScores>;

Rational misclassification_score(const TrainingRun& run, std::size_t instance,
                                 const EpochRange& range);
Rational variability(const TrainingRun& run, std::size_t instance, const EpochRange& range);
// Zero for single-epoch ranges: there is no transition to count.
Rational frequency(const TrainingRun& run, std::size_t instance, const EpochRange& range);

DifficultyScores score_all(const TrainingRun& run, const EpochRange& range);

enum class Direction { Ascending, Descending };

struct MeasureWeight {
  Measure measure = Measure::Misclassification;
  double weight = 1.0;
  Direction direction = Direction::Descending;
};

// LineUp-style combined value in [0, 1]; higher ranks first. Each measure
// is min-max normalized over `scores` (constant columns become 0), flipped
// for ascending direction and mixed with weights normalized to sum 1.
// Throws InvalidWeights when a weight is negative or all are zero.
std::vector<double> combined_score(const DifficultyScores& scores,
                                   const std::vector<MeasureWeight>& weights);

// Instance indices ordered by descending combined value, ties by ascending
// instance id.
std::vector<std::size_t> rank_by_combined(const TrainingRun& run, const DifficultyScores& scores,
                                          const std::vector<MeasureWeight>& weights);

}  // namespace iflow
