#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cspnn/dataset.hpp"

namespace cspnn {

enum class Delimiter { kComma, kWhitespace };

struct CsvOptions {
  /// 0-based label column; negative values count from the end (-1 = last).
  int label_column = -1;
  Delimiter delimiter = Delimiter::kComma;
  /// Lines dropped unconditionally before parsing starts.
  std::size_t skip_lines = 0;
};

/// Parses delimited text in file order. Blank lines are ignored and a first
/// row whose feature fields are not all numeric is taken as a header.
/// Throws ParseError (with line number) on ragged rows or bad numbers.
LabeledDataset parse_csv(std::istream& in, const CsvOptions& options = {});
LabeledDataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// MNIST IDX pair: unsigned-byte images (magic 0x00000803) and labels
/// (magic 0x00000801). Images are flattened row-major; labels become their
/// decimal string.
LabeledDataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels);
LabeledDataset parse_idx(std::span<const std::uint8_t> images, std::span<const std::uint8_t> labels);

/// Per-feature min/max of a training split.
struct NormalizationParams {
  std::vector<double> min;
  std::vector<double> max;

  std::size_t dimension() const noexcept { return min.size(); }
  bool empty() const noexcept { return min.empty(); }
  friend bool operator==(const NormalizationParams&, const NormalizationParams&) = default;
};

NormalizationParams fit_normalizer(const LabeledDataset& train);

/// Maps training min to -1 and max to +1, linearly and without clamping.
/// Constant features map to 0.
FeatureVector normalize(const NormalizationParams& params, FeatureView x);
LabeledDataset apply_normalizer(const NormalizationParams& params, const LabeledDataset& data);

/// Samples whose label is in `keep`, original order preserved.
LabeledDataset filter_classes(const LabeledDataset& data, std::span<const Label> keep);

/// The i-th output holds exactly the samples of group i, in their original
/// relative order. Groups must be disjoint.
std::vector<LabeledDataset> split_by_classes(const LabeledDataset& data, const std::vector<std::vector<Label>>& groups);

/// Deterministic shuffle of `labels` driven by Xoshiro256 seeded with `seed`.
std::vector<Label> seeded_class_permutation(std::vector<Label> labels, std::uint64_t seed);

/// One entry of the dataset manifest.
struct DatasetSpec {
  std::string name;
  enum class Format { kCsv, kIdx } format = Format::kCsv;
  // CSV with separate files
  std::filesystem::path train;
  std::filesystem::path test;
  // CSV with one file: the first `train_count` rows train, the rest test
  std::filesystem::path source;
  std::size_t train_count = 0;
  // IDX
  std::filesystem::path train_images, train_labels, test_images, test_labels;
  CsvOptions csv;
  std::size_t classes = 0;
  std::size_t features = 0;
};

/// Reads an INI manifest, one section per dataset. Relative paths resolve
/// against `root` (the manifest's directory when empty).
std::vector<DatasetSpec> load_manifest(const std::filesystem::path& path, const std::filesystem::path& root = {});
std::vector<DatasetSpec> parse_manifest(std::istream& in, const std::filesystem::path& root);
const DatasetSpec& find_dataset(const std::vector<DatasetSpec>& manifest, const std::string& name);

struct DatasetSplits {
  LabeledDataset train;
  LabeledDataset test;
};

/// Loads both splits and checks them against the declared feature and class
/// counts.
DatasetSplits load_dataset(const DatasetSpec& spec);

/// Splits normalized with parameters fitted on the training split.
struct PreparedData {
  std::string name;
  NormalizationParams normalization;
  LabeledDataset train;
  LabeledDataset test;
};

PreparedData prepare(const std::string& name, const DatasetSplits& raw);

/// Converts the raw UCI abalone file into a 3-class, 10-feature CSV: sex
/// one-hot (M, F, I) followed by the seven measurements, label last. Rings
/// 1-8 -> "1", 9-10 -> "2", 11+ -> "3". The raw file has no class column, so
/// this binning is one possible 3-class version, not a canonical one.
void prepare_abalone(const std::filesystem::path& raw, const std::filesystem::path& out);

}  // namespace cspnn
