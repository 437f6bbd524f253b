#include "lakecausal/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lakecausal/core/error.hpp"

namespace lakecausal::eval {

Metrics compute_metrics(std::span<const Label> predictions, std::span<const Label> truth) {
  if (predictions.size() != truth.size()) throw DomainError("metrics: predictions and labels differ in length");
  if (truth.empty()) throw DomainError("metrics: no samples");
  Metrics m;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++m.confusion[index_of(truth[i])][index_of(predictions[i])];
    ++m.support[index_of(truth[i])];
    if (truth[i] == predictions[i]) ++correct;
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const std::size_t tp = m.confusion[c][c];
    std::size_t predicted = 0;
    for (std::size_t t = 0; t < kNumClasses; ++t) predicted += m.confusion[t][c];
    const double precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    const double recall = m.support[c] ? static_cast<double>(tp) / static_cast<double>(m.support[c]) : 0.0;
    const double f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    m.macro_precision += precision / kNumClasses;
    m.macro_recall += recall / kNumClasses;
    m.macro_f1 += f1 / kNumClasses;
  }
  return m;
}

double gain_points(double causal_accuracy, double baseline_accuracy) {
  return std::round((causal_accuracy - baseline_accuracy) * 100.0 * 100.0) / 100.0;
}

Split stratified_split(const Dataset& ds, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw DomainError("split ratio must lie strictly between 0 and 1");
  std::array<std::vector<std::size_t>, kNumClasses> members;
  for (std::size_t i = 0; i < ds.size(); ++i) members[index_of(ds[i].label)].push_back(i);

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    auto& idx = members[c];
    if (idx.empty()) continue;
    if (idx.size() < 2) {
      throw InsufficientSamples("class " + std::string(to_string(kLabels[c])) + " has fewer than two lakes");
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(idx.size())));
    train.insert(train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    test.insert(test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {ds.subset(train), ds.subset(test)};
}

}  // namespace lakecausal::eval
