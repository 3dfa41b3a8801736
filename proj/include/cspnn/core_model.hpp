#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace cspnn {

/// Class labels are opaque tokens compared by equality.
using Label = std::string;
using FeatureVector = std::vector<double>;
using FeatureView = std::span<const double>;

/// Stable identifier of a hidden unit. Assigned monotonically, never reused.
struct UnitId {
  std::uint64_t value = 0;
  friend auto operator<=>(const UnitId&, const UnitId&) = default;
};

/// One RBF in the hidden layer. `subnet` is the index of the single output
/// unit it feeds with weight one.
struct RbfUnit {
  UnitId id;
  std::size_t subnet = 0;
  FeatureVector centroid;
  friend bool operator==(const RbfUnit&, const RbfUnit&) = default;
};

struct OutputUnit {
  Label label;
  friend bool operator==(const OutputUnit&, const OutputUnit&) = default;
};

/// Distances at or below this are treated as zero when forming the radius.
inline constexpr double kDegenerateDistance = 1e-12;

/// A probabilistic neural network as a collection of per-class subnets.
///
/// Holds the centroid matrix and the binary hidden-to-output wiring. The
/// hidden count is `hidden().size()` and the accommodated class count is
/// `outputs().size()`. Every unit refers to an existing output unit and
/// output labels are unique; the mutators below maintain both invariants.
///
/// Reads are safe from many threads; mutation needs exclusive access.
class CsPnnModel {
 public:
  CsPnnModel() = default;
  explicit CsPnnModel(std::size_t dimension) : dimension_(dimension) {}

  /// Feature dimension. Zero until the first unit fixes it.
  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<RbfUnit>& hidden() const noexcept { return hidden_; }
  const std::vector<OutputUnit>& outputs() const noexcept { return outputs_; }
  std::size_t hidden_count() const noexcept { return hidden_.size(); }
  std::size_t class_count() const noexcept { return outputs_.size(); }
  bool empty() const noexcept { return hidden_.empty(); }
  std::uint64_t next_unit_id() const noexcept { return next_id_; }

  std::optional<std::size_t> find_output(const Label& label) const;
  std::optional<std::size_t> find_unit(UnitId id) const;
  std::vector<Label> labels() const;

  /// Appends an output unit; throws ContractError on a duplicate label.
  std::size_t add_output(Label label);

  /// Appends a hidden unit wired to output `subnet`.
  UnitId add_unit(std::size_t subnet, FeatureVector centroid);

  /// Moves a centroid to the midpoint between itself and `x`.
  void move_to_midpoint(std::size_t unit_index, FeatureView x);

  /// Removes the named units. All ids are validated before anything is
  /// removed; an unknown or repeated id leaves the model untouched.
  void remove_units(std::span<const UnitId> ids);

  /// Removes whole subnets (output unit plus every unit it owns) and
  /// renumbers the remaining subnets, keeping their relative order.
  void remove_classes(std::span<const Label> labels);

  /// Rebuilds a model from persisted parts, checking every invariant.
  static CsPnnModel restore(std::size_t dimension, std::vector<OutputUnit> outputs,
                            std::vector<RbfUnit> hidden, std::uint64_t next_unit_id);

  friend bool operator==(const CsPnnModel&, const CsPnnModel&) = default;

 private:
  void check_dimension(FeatureView x) const;

  std::size_t dimension_ = 0;
  std::vector<RbfUnit> hidden_;
  std::vector<OutputUnit> outputs_;
  std::uint64_t next_id_ = 0;
};

/// Gaussian RBF response exp(-|x - c|^2 / sigma^2).
double activation(FeatureView x, FeatureView c, double sigma);

/// Largest Euclidean (not squared) distance from `x` to any centroid.
double max_centroid_distance(const CsPnnModel& model, FeatureView x);

/// Shared radius d_max / k. Returns nullopt when d_max is degenerate
/// (at most kDegenerateDistance), in which case the nearest-centroid limit
/// applies.
std::optional<double> unique_radius(double d_max, std::size_t class_count);

/// sigma = d_max / k, recomputed for every presented pattern.
struct AdaptiveRadius {};
/// sigma = fraction * d_max; used to probe the small-radius limit.
struct ScaledRadius {
  double fraction;
};
/// A radius fixed ahead of time, as in the original PNN. A degenerate value
/// (all training patterns coincide) takes the nearest-centroid path.
struct FixedRadius {
  double sigma;
};
using RadiusRule = std::variant<AdaptiveRadius, ScaledRadius, FixedRadius>;

inline constexpr std::size_t kNoUnit = static_cast<std::size_t>(-1);

struct ForwardResult {
  std::vector<double> scores;  ///< one summed activation per output unit
  std::size_t winner = 0;      ///< argmax of scores, smallest index on ties
  double d_max = 0.0;
  std::optional<double> sigma;  ///< nullopt on the degenerate path
  /// Index (into hidden()) of the most activated unit of the winning
  /// subnet, or kNoUnit when that subnet has no units.
  std::size_t best_unit = kNoUnit;
};

/// Feeds `x` through the network. Distances, d_max and activations are
/// computed in one pass over the centroids.
ForwardResult forward(const CsPnnModel& model, FeatureView x, const RadiusRule& rule = AdaptiveRadius{});

}  // namespace cspnn
