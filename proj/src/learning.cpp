#include "cspnn/learning.hpp"

#include <chrono>

#include "cspnn/error.hpp"

namespace cspnn {

ConstructStats construct(CsPnnModel& model, const LabeledDataset& data) {
  ConstructStats stats;
  if (data.empty()) return stats;
  if (model.dimension() != 0 && model.dimension() != data.dimension()) {
    throw ContractError("construct: data dimension " + std::to_string(data.dimension()) +
                        " != model dimension " + std::to_string(model.dimension()));
  }

  for (const auto& [x, label] : data) {
    ++stats.presented;
    auto target = model.find_output(label);
    if (!target) {
      target = model.add_output(label);
      ++stats.classes_added;
      model.add_unit(*target, x);
      ++stats.units_added;
      continue;
    }
    // Output units can outlive their RBFs after instance-wise unlearning.
    if (model.empty()) {
      model.add_unit(*target, x);
      ++stats.units_added;
      continue;
    }

    const ForwardResult r = forward(model, x);
    if (r.winner != *target || r.best_unit == kNoUnit) {
      model.add_unit(*target, x);
      ++stats.units_added;
    } else {
      model.move_to_midpoint(r.best_unit, x);
      ++stats.centroid_updates;
    }
  }
  return stats;
}

void unlearn_units(CsPnnModel& model, std::span<const UnitId> ids) { model.remove_units(ids); }

void unlearn_classes(CsPnnModel& model, std::span<const Label> labels) { model.remove_classes(labels); }

EvalReport evaluate(const CsPnnModel& model, const LabeledDataset& data, const RadiusRule& rule) {
  if (model.empty()) throw ModelEmptyError("cannot evaluate a network without hidden units");
  if (!data.empty() && data.dimension() != model.dimension()) {
    throw ContractError("evaluate: data dimension " + std::to_string(data.dimension()) + " != model dimension " +
                        std::to_string(model.dimension()));
  }

  const auto start = std::chrono::steady_clock::now();
  EvalReport report;
  report.hidden_count = model.hidden_count();
  report.predictions.reserve(data.size());
  for (const auto& [x, label] : data) {
    const ForwardResult r = forward(model, x, rule);
    const Label& predicted = model.outputs()[r.winner].label;
    const bool hit = predicted == label;
    ++report.total;
    auto& tally = report.per_class[label];
    ++tally.count;
    if (hit) {
      ++report.correct;
      ++tally.correct;
    }
    report.predictions.push_back(Prediction{label, predicted});
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace cspnn
