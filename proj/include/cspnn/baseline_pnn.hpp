#pragma once

#include <optional>

#include "cspnn/core_model.hpp"
#include "cspnn/dataset.hpp"

namespace cspnn {

/// The original PNN: every training pattern is a centroid and the radius is
/// fixed at D_max / N_c, D_max being the largest pairwise training distance.
class StaticPnnModel {
 public:
  const CsPnnModel& network() const noexcept { return network_; }
  double max_pair_distance() const noexcept { return d_max_; }
  double sigma() const noexcept { return sigma_; }
  std::size_t hidden_count() const noexcept { return network_.hidden_count(); }

 private:
  friend StaticPnnModel build_static(const LabeledDataset& data);

  CsPnnModel network_;
  double d_max_ = 0.0;
  double sigma_ = 0.0;
};

/// Largest Euclidean distance over all sample pairs. Streams over the pairs;
/// no distance matrix is formed.
double max_pairwise_distance(const LabeledDataset& data);

/// Throws ContractError on an empty dataset.
StaticPnnModel build_static(const LabeledDataset& data);

/// Classifies with the radius frozen at build time (or `sigma_override`).
EvalReport evaluate_static(const StaticPnnModel& model, const LabeledDataset& data,
                           std::optional<double> sigma_override = std::nullopt);

}  // namespace cspnn
