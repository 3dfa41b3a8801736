#include "cspnn/dataset.hpp"

#include <algorithm>

#include "cspnn/error.hpp"

namespace cspnn {

LabeledDataset::LabeledDataset(std::size_t dimension, std::vector<Sample> samples) : dimension_(dimension) {
  samples_.reserve(samples.size());
  for (auto& s : samples) add(std::move(s.features), std::move(s.label));
}

void LabeledDataset::add(FeatureVector features, Label label) {
  if (dimension_ == 0) dimension_ = features.size();
  if (features.size() != dimension_) {
    throw ContractError("sample dimension " + std::to_string(features.size()) + " != dataset dimension " +
                        std::to_string(dimension_));
  }
  samples_.push_back(Sample{std::move(features), std::move(label)});
}

std::vector<Label> LabeledDataset::distinct_labels() const {
  std::vector<Label> out;
  for (const auto& s : samples_) {
    if (std::find(out.begin(), out.end(), s.label) == out.end()) out.push_back(s.label);
  }
  return out;
}

}  // namespace cspnn
