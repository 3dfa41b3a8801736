#include "cspnn/baseline_pnn.hpp"

#include <algorithm>
#include <cmath>

#include "cspnn/error.hpp"
#include "cspnn/learning.hpp"

namespace cspnn {

double max_pairwise_distance(const LabeledDataset& data) {
  const auto& samples = data.samples();
  double best = 0.0;
  for (std::size_t a = 0; a < samples.size(); ++a) {
    const double* xa = samples[a].features.data();
    for (std::size_t b = a + 1; b < samples.size(); ++b) {
      const double* xb = samples[b].features.data();
      double sum = 0.0;
      for (std::size_t i = 0; i < data.dimension(); ++i) {
        const double diff = xa[i] - xb[i];
        sum += diff * diff;
      }
      best = std::max(best, sum);
    }
  }
  return std::sqrt(best);
}

StaticPnnModel build_static(const LabeledDataset& data) {
  if (data.empty()) throw ContractError("build_static: empty training set");
  StaticPnnModel m;
  m.network_ = CsPnnModel(data.dimension());
  for (const auto& [x, label] : data) {
    auto k = m.network_.find_output(label);
    if (!k) k = m.network_.add_output(label);
    m.network_.add_unit(*k, x);
  }
  m.d_max_ = max_pairwise_distance(data);
  m.sigma_ = m.d_max_ / static_cast<double>(m.network_.class_count());
  return m;
}

EvalReport evaluate_static(const StaticPnnModel& model, const LabeledDataset& data,
                           std::optional<double> sigma_override) {
  return evaluate(model.network(), data, FixedRadius{sigma_override.value_or(model.sigma())});
}

}  // namespace cspnn
