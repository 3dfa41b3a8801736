#pragma once

#include <span>

#include "cspnn/core_model.hpp"
#include "cspnn/dataset.hpp"

namespace cspnn {

struct ConstructStats {
  std::size_t presented = 0;
  std::size_t units_added = 0;
  std::size_t classes_added = 0;
  std::size_t centroid_updates = 0;
};

/// One-pass construction, or reconstruction when `model` already holds
/// units. Each pattern is presented once, in dataset order:
///
///  - an unseen label gets a new output unit and an RBF at the pattern;
///  - otherwise the pattern is classified with sigma = d_max / k. A miss adds
///    an RBF at the pattern to the subnet of its true label; a hit moves the
///    most activated RBF of that subnet to the midpoint with the pattern.
///
/// An empty model is seeded by the first pattern. No hyperparameters.
ConstructStats construct(CsPnnModel& model, const LabeledDataset& data);

/// Instance-wise unlearning: drops the named hidden units. Output units are
/// kept even when their subnet becomes empty. Throws NotFoundError (model
/// unchanged) on an unknown id.
void unlearn_units(CsPnnModel& model, std::span<const UnitId> ids);

/// Class-wise unlearning: drops each named subnet with all of its units.
/// Throws NotFoundError (model unchanged) on an unknown label.
void unlearn_classes(CsPnnModel& model, std::span<const Label> labels);

/// Classifies every sample without touching the model. With the default
/// rule d_max and sigma are recomputed per sample.
EvalReport evaluate(const CsPnnModel& model, const LabeledDataset& data, const RadiusRule& rule = AdaptiveRadius{});

}  // namespace cspnn
