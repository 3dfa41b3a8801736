#include "cspnn/core_model.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <set>
#include <type_traits>

#include "cspnn/error.hpp"

namespace cspnn {
namespace {

double squared_distance(FeatureView a, FeatureView b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return sum;
}

std::size_t first_argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

bool all_finite(FeatureView x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

std::optional<std::size_t> CsPnnModel::find_output(const Label& label) const {
  for (std::size_t k = 0; k < outputs_.size(); ++k) {
    if (outputs_[k].label == label) return k;
  }
  return std::nullopt;
}

std::optional<std::size_t> CsPnnModel::find_unit(UnitId id) const {
  for (std::size_t j = 0; j < hidden_.size(); ++j) {
    if (hidden_[j].id == id) return j;
  }
  return std::nullopt;
}

std::vector<Label> CsPnnModel::labels() const {
  std::vector<Label> out;
  out.reserve(outputs_.size());
  for (const auto& o : outputs_) out.push_back(o.label);
  return out;
}

std::size_t CsPnnModel::add_output(Label label) {
  if (find_output(label)) throw ContractError("duplicate output label '" + label + "'");
  outputs_.push_back(OutputUnit{std::move(label)});
  return outputs_.size() - 1;
}

UnitId CsPnnModel::add_unit(std::size_t subnet, FeatureVector centroid) {
  if (subnet >= outputs_.size()) throw ContractError("unit wired to a missing output unit");
  if (centroid.empty()) throw ContractError("centroid must have at least one feature");
  if (dimension_ == 0) dimension_ = centroid.size();
  check_dimension(centroid);
  const UnitId id{next_id_++};
  hidden_.push_back(RbfUnit{id, subnet, std::move(centroid)});
  return id;
}

void CsPnnModel::move_to_midpoint(std::size_t unit_index, FeatureView x) {
  if (unit_index >= hidden_.size()) throw ContractError("unit index out of range");
  check_dimension(x);
  auto& c = hidden_[unit_index].centroid;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = (c[i] + x[i]) / 2.0;
}

void CsPnnModel::remove_units(std::span<const UnitId> ids) {
  std::set<UnitId> doomed;
  for (UnitId id : ids) {
    if (!find_unit(id)) throw NotFoundError("no hidden unit with id " + std::to_string(id.value));
    if (!doomed.insert(id).second) throw ContractError("unit id " + std::to_string(id.value) + " listed twice");
  }
  std::erase_if(hidden_, [&](const RbfUnit& u) { return doomed.count(u.id) != 0; });
}

void CsPnnModel::remove_classes(std::span<const Label> labels) {
  std::vector<bool> doomed(outputs_.size(), false);
  for (const Label& label : labels) {
    const auto k = find_output(label);
    if (!k) throw NotFoundError("no output unit for class '" + label + "'");
    if (doomed[*k]) throw ContractError("class '" + label + "' listed twice");
    doomed[*k] = true;
  }

  std::vector<std::size_t> remap(outputs_.size(), 0);
  std::vector<OutputUnit> kept;
  for (std::size_t k = 0; k < outputs_.size(); ++k) {
    if (doomed[k]) continue;
    remap[k] = kept.size();
    kept.push_back(std::move(outputs_[k]));
  }
  std::erase_if(hidden_, [&](const RbfUnit& u) { return doomed[u.subnet]; });
  for (auto& u : hidden_) u.subnet = remap[u.subnet];
  outputs_ = std::move(kept);
}

CsPnnModel CsPnnModel::restore(std::size_t dimension, std::vector<OutputUnit> outputs,
                               std::vector<RbfUnit> hidden, std::uint64_t next_unit_id) {
  CsPnnModel m(dimension);
  for (auto& o : outputs) m.add_output(std::move(o.label));
  std::set<UnitId> seen;
  for (auto& u : hidden) {
    if (u.subnet >= m.outputs_.size()) throw ContractError("unit wired to a missing output unit");
    if (u.id.value >= next_unit_id) throw ContractError("unit id not below the id counter");
    if (!seen.insert(u.id).second) throw ContractError("duplicate unit id");
    if (m.dimension_ == 0) m.dimension_ = u.centroid.size();
    m.check_dimension(u.centroid);
    m.hidden_.push_back(std::move(u));
  }
  m.next_id_ = next_unit_id;
  return m;
}

void CsPnnModel::check_dimension(FeatureView x) const {
  if (x.size() != dimension_) {
    throw ContractError("dimension mismatch: expected " + std::to_string(dimension_) + ", got " +
                        std::to_string(x.size()));
  }
  if (!all_finite(x)) throw ContractError("non-finite feature value");
}

double activation(FeatureView x, FeatureView c, double sigma) {
  if (x.size() != c.size()) throw ContractError("activation: dimension mismatch");
  if (!(sigma > 0.0)) throw ContractError("activation: radius must be positive");
  return std::exp(-squared_distance(x, c) / (sigma * sigma));
}

double max_centroid_distance(const CsPnnModel& model, FeatureView x) {
  if (model.empty()) throw ModelEmptyError("network has no hidden units");
  if (x.size() != model.dimension()) throw ContractError("max_centroid_distance: dimension mismatch");
  double best = 0.0;
  for (const auto& u : model.hidden()) best = std::max(best, squared_distance(x, u.centroid));
  return std::sqrt(best);
}

std::optional<double> unique_radius(double d_max, std::size_t class_count) {
  if (class_count == 0) throw ContractError("unique_radius: class count must be positive");
  if (!(d_max >= 0.0)) throw ContractError("unique_radius: d_max must be non-negative");
  if (d_max <= kDegenerateDistance) return std::nullopt;
  return d_max / static_cast<double>(class_count);
}

ForwardResult forward(const CsPnnModel& model, FeatureView x, const RadiusRule& rule) {
  if (model.empty()) throw ModelEmptyError("network has no hidden units");
  if (x.size() != model.dimension()) {
    throw ContractError("forward: dimension mismatch: expected " + std::to_string(model.dimension()) +
                        ", got " + std::to_string(x.size()));
  }

  const auto& hidden = model.hidden();
  std::vector<double> d2(hidden.size());
  double max_d2 = 0.0;
  double min_d2 = INFINITY;
  for (std::size_t j = 0; j < hidden.size(); ++j) {
    d2[j] = squared_distance(x, hidden[j].centroid);
    max_d2 = std::max(max_d2, d2[j]);
    min_d2 = std::min(min_d2, d2[j]);
  }

  ForwardResult r;
  r.d_max = std::sqrt(max_d2);
  r.sigma = std::visit(
      [&](const auto& rr) -> std::optional<double> {
        using R = std::decay_t<decltype(rr)>;
        if constexpr (std::is_same_v<R, AdaptiveRadius>) {
          return unique_radius(r.d_max, model.class_count());
        } else if constexpr (std::is_same_v<R, ScaledRadius>) {
          if (!(rr.fraction > 0.0)) throw ContractError("radius fraction must be positive");
          if (r.d_max <= kDegenerateDistance) return std::nullopt;
          return rr.fraction * r.d_max;
        } else {
          if (!(rr.sigma >= 0.0)) throw ContractError("fixed radius must be non-negative");
          if (rr.sigma <= kDegenerateDistance) return std::nullopt;
          return rr.sigma;
        }
      },
      rule);

  r.scores.assign(model.class_count(), 0.0);
  if (r.sigma) {
    const double s2 = *r.sigma * *r.sigma;
    for (std::size_t j = 0; j < hidden.size(); ++j) r.scores[hidden[j].subnet] += std::exp(-d2[j] / s2);
  } else {
    for (std::size_t j = 0; j < hidden.size(); ++j) {
      if (d2[j] == 0.0) r.scores[hidden[j].subnet] += 1.0;
    }
  }
  r.winner = first_argmax(r.scores);

  if (r.sigma && r.scores[r.winner] < DBL_MIN) {
    // Every sum underflowed. Rank the sums rescaled by exp(min_d2 / sigma^2)
    // instead; the common factor leaves the ordering unchanged.
    const double s2 = *r.sigma * *r.sigma;
    std::vector<double> rescaled(model.class_count(), 0.0);
    for (std::size_t j = 0; j < hidden.size(); ++j) {
      rescaled[hidden[j].subnet] += std::exp(-(d2[j] - min_d2) / s2);
    }
    r.winner = first_argmax(rescaled);
  }

  for (std::size_t j = 0; j < hidden.size(); ++j) {
    if (hidden[j].subnet != r.winner) continue;
    if (r.best_unit == kNoUnit || d2[j] < d2[r.best_unit]) r.best_unit = j;
  }
  return r;
}

}  // namespace cspnn
