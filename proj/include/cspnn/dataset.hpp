#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "cspnn/core_model.hpp"

namespace cspnn {

struct Sample {
  FeatureVector features;
  Label label;
  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Ordered (pattern, label) pairs of a common dimension. Presentation order
/// is part of the value: construction depends on it.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  explicit LabeledDataset(std::size_t dimension) : dimension_(dimension) {}
  LabeledDataset(std::size_t dimension, std::vector<Sample> samples);

  void add(FeatureVector features, Label label);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  const std::vector<Sample>& samples() const noexcept { return samples_; }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  auto begin() const noexcept { return samples_.begin(); }
  auto end() const noexcept { return samples_.end(); }

  /// Labels in order of first appearance.
  std::vector<Label> distinct_labels() const;

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;

 private:
  std::size_t dimension_ = 0;
  std::vector<Sample> samples_;
};

struct ClassTally {
  std::size_t count = 0;
  std::size_t correct = 0;
  friend bool operator==(const ClassTally&, const ClassTally&) = default;
};

struct Prediction {
  Label truth;
  Label predicted;
  friend bool operator==(const Prediction&, const Prediction&) = default;
};

/// Outcome of classifying a labelled set with a fixed network.
struct EvalReport {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::map<Label, ClassTally> per_class;
  std::vector<Prediction> predictions;
  std::size_t hidden_count = 0;
  double seconds = 0.0;  ///< wall time; not part of equality

  /// Percentage of correctly classified samples; 0 for an empty set.
  double accuracy() const noexcept {
    return total == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(total);
  }

  friend bool operator==(const EvalReport& a, const EvalReport& b) {
    return a.total == b.total && a.correct == b.correct && a.per_class == b.per_class &&
           a.predictions == b.predictions && a.hidden_count == b.hidden_count;
  }
};

}  // namespace cspnn
