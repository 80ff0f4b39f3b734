#include "iflow/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "iflow/errors.hpp"

namespace iflow {

namespace {

// Shared kernel so score_all and the per-instance calls cannot drift apart.
// `seen` is a per-class scratch stamp array, `stamp` a value unique to this call.
InstanceScores score_one(const TrainingRun& run, std::size_t instance, const EpochRange& range,
                         std::vector<std::size_t>& seen, std::size_t stamp) {
  const auto preds = run.predictions(instance);
  const auto truth = run.instance(instance).true_class;
  const auto k = static_cast<std::int64_t>(range.length());

  std::int64_t wrong = 0;
  std::int64_t distinct = 0;
  std::int64_t jumps = 0;
  for (auto j = range.first(); j <= range.last(); ++j) {
    const auto p = preds[j];
    if (p != truth) ++wrong;
    if (seen[p] != stamp) {
      seen[p] = stamp;
      ++distinct;
    }
    if (j > range.first() && preds[j - 1] != p) ++jumps;
  }

  InstanceScores s;
  s.misclassification = Rational(wrong, k);
  s.variability = Rational(distinct, static_cast<std::int64_t>(run.class_count()));
  s.frequency = k > 1 ? Rational(jumps, k - 1) : Rational(0, 1);
  return s;
}

InstanceScores score_single(const TrainingRun& run, std::size_t instance, const EpochRange& range) {
  if (instance >= run.instance_count()) {
    throw UnknownInstance("instance index " + std::to_string(instance) + " out of range");
  }
  std::vector<std::size_t> seen(run.class_count(), 0);
  return score_one(run, instance, range, seen, 1);
}

// (x - lo) / (hi - lo), exactly; requires lo < hi.
Rational normalized(const Rational& x, const Rational& lo, const Rational& hi) {
  const auto num = (x.num() * lo.den() - lo.num() * x.den()) * hi.den();
  const auto den = (hi.num() * lo.den() - lo.num() * hi.den()) * x.den();
  return Rational(num, den);
}

}  // namespace

Rational misclassification_score(const TrainingRun& run, std::size_t instance,
                                 const EpochRange& range) {
  return score_single(run, instance, range).misclassification;
}

Rational variability(const TrainingRun& run, std::size_t instance, const EpochRange& range) {
  return score_single(run, instance, range).variability;
}

Rational frequency(const TrainingRun& run, std::size_t instance, const EpochRange& range) {
  return score_single(run, instance, range).frequency;
}

DifficultyScores score_all(const TrainingRun& run, const EpochRange& range) {
  DifficultyScores out;
  out.reserve(run.instance_count());
  std::vector<std::size_t> seen(run.class_count(), 0);
  for (std::size_t i = 0; i < run.instance_count(); ++i) {
    out.push_back(score_one(run, i, range, seen, i + 1));
  }
  return out;
}

std::vector<double> combined_score(const DifficultyScores& scores,
                                   const std::vector<MeasureWeight>& weights) {
  double total = 0.0;
  for (const auto& w : weights) {
    if (!(w.weight >= 0.0)) throw InvalidWeights("weights must be non-negative");
    total += w.weight;
  }
  if (weights.empty() || total <= 0.0) throw InvalidWeights("at least one weight must be positive");

  std::vector<double> out(scores.size(), 0.0);
  if (scores.empty()) return out;

  for (const auto& w : weights) {
    if (w.weight == 0.0) continue;
    const auto share = w.weight / total;
    auto [lo_it, hi_it] = std::minmax_element(
        scores.begin(), scores.end(),
        [&](const auto& a, const auto& b) { return a.get(w.measure) < b.get(w.measure); });
    const auto lo = lo_it->get(w.measure);
    const auto hi = hi_it->get(w.measure);
    if (lo == hi) continue;  // constant column contributes 0
    for (std::size_t i = 0; i < scores.size(); ++i) {
      auto v = normalized(scores[i].get(w.measure), lo, hi).to_double();
      if (w.direction == Direction::Ascending) v = 1.0 - v;
      out[i] += share * v;
    }
  }
  return out;
}

std::vector<std::size_t> rank_by_combined(const TrainingRun& run, const DifficultyScores& scores,
                                          const std::vector<MeasureWeight>& weights) {
  const auto values = combined_score(scores, weights);
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] > values[b];
    return run.instance(a).instance_id < run.instance(b).instance_id;
  });
  return order;
}

}  // namespace iflow
