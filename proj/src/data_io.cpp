#include "cspnn/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <utility>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cspnn/error.hpp"
#include "cspnn/rng.hpp"

namespace cspnn {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line, Delimiter delimiter) {
  std::vector<std::string_view> fields;
  if (delimiter == Delimiter::kComma) {
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      fields.push_back(trim(line.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  } else {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      const std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i > start) fields.push_back(line.substr(start, i - start));
    }
  }
  return fields;
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset, const char* what) {
  if (bytes.size() < offset + 4) throw ParseError(std::string("truncated IDX header in ") + what);
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

std::filesystem::path resolve(const std::filesystem::path& root, const std::string& value) {
  if (value.empty()) return {};
  std::filesystem::path p(value);
  return p.is_absolute() ? p : root / p;
}

}  // namespace

LabeledDataset parse_csv(std::istream& in, const CsvOptions& options) {
  LabeledDataset data;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;  // fixed by the first data row
  bool header_possible = true;

  while (std::getline(in, line)) {
    ++line_no;
    if (line_no <= options.skip_lines) continue;
    if (trim(line).empty()) continue;

    const auto fields = split_fields(line, options.delimiter);
    const bool may_be_header = std::exchange(header_possible, false);
    if (width != 0 && fields.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()),
                       line_no);
    }
    if (fields.size() < 2) throw ParseError("a row needs at least one feature and a label", line_no);

    const int n = static_cast<int>(fields.size());
    const int label_at = options.label_column < 0 ? n + options.label_column : options.label_column;
    if (label_at < 0 || label_at >= n) throw ParseError("label column out of range", line_no);

    FeatureVector x;
    x.reserve(fields.size() - 1);
    bool numeric = true;
    for (int i = 0; i < n && numeric; ++i) {
      if (i == label_at) continue;
      const auto v = parse_number(fields[static_cast<std::size_t>(i)]);
      if (v) {
        x.push_back(*v);
      } else {
        numeric = false;
      }
    }
    if (!numeric) {
      if (may_be_header) continue;
      throw ParseError("non-numeric feature value", line_no);
    }

    const auto label = fields[static_cast<std::size_t>(label_at)];
    if (label.empty()) throw ParseError("empty label", line_no);
    width = fields.size();
    data.add(std::move(x), Label(label));
  }

  if (data.empty()) throw ParseError("no samples found");
  return data;
}

LabeledDataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return parse_csv(in, options);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

LabeledDataset parse_idx(std::span<const std::uint8_t> images, std::span<const std::uint8_t> labels) {
  if (read_be32(images, 0, "images") != 0x00000803U) throw ParseError("bad IDX image magic");
  if (read_be32(labels, 0, "labels") != 0x00000801U) throw ParseError("bad IDX label magic");
  const std::size_t count = read_be32(images, 4, "images");
  const std::size_t rows = read_be32(images, 8, "images");
  const std::size_t cols = read_be32(images, 12, "images");
  const std::size_t label_count = read_be32(labels, 4, "labels");
  if (count != label_count) {
    throw ParseError("image count " + std::to_string(count) + " != label count " + std::to_string(label_count));
  }
  const std::size_t pixels = rows * cols;
  if (pixels == 0) throw ParseError("IDX images have zero size");
  if (images.size() < 16 + count * pixels) throw ParseError("truncated IDX image payload");
  if (labels.size() < 8 + count) throw ParseError("truncated IDX label payload");

  LabeledDataset data(pixels);
  for (std::size_t n = 0; n < count; ++n) {
    const auto* px = images.data() + 16 + n * pixels;
    data.add(FeatureVector(px, px + pixels), std::to_string(labels[8 + n]));
  }
  return data;
}

LabeledDataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  const auto img = read_bytes(images);
  const auto lab = read_bytes(labels);
  try {
    return parse_idx(img, lab);
  } catch (const ParseError& e) {
    throw ParseError(images.string() + ": " + e.what());
  }
}

NormalizationParams fit_normalizer(const LabeledDataset& train) {
  if (train.empty()) throw ContractError("fit_normalizer: empty training set");
  NormalizationParams p;
  p.min = train[0].features;
  p.max = train[0].features;
  for (const auto& s : train) {
    for (std::size_t i = 0; i < s.features.size(); ++i) {
      p.min[i] = std::min(p.min[i], s.features[i]);
      p.max[i] = std::max(p.max[i], s.features[i]);
    }
  }
  return p;
}

FeatureVector normalize(const NormalizationParams& params, FeatureView x) {
  if (x.size() != params.dimension()) throw ContractError("normalize: dimension mismatch");
  FeatureVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double range = params.max[i] - params.min[i];
    out[i] = range > 0.0 ? 2.0 * (x[i] - params.min[i]) / range - 1.0 : 0.0;
  }
  return out;
}

LabeledDataset apply_normalizer(const NormalizationParams& params, const LabeledDataset& data) {
  LabeledDataset out(data.dimension());
  for (const auto& s : data) out.add(normalize(params, s.features), s.label);
  return out;
}

LabeledDataset filter_classes(const LabeledDataset& data, std::span<const Label> keep) {
  const std::set<Label> wanted(keep.begin(), keep.end());
  LabeledDataset out(data.dimension());
  for (const auto& s : data) {
    if (wanted.count(s.label)) out.add(s.features, s.label);
  }
  return out;
}

std::vector<LabeledDataset> split_by_classes(const LabeledDataset& data,
                                             const std::vector<std::vector<Label>>& groups) {
  std::map<Label, std::size_t> owner;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (const auto& label : groups[g]) {
      if (!owner.emplace(label, g).second) throw ContractError("class '" + label + "' appears in two groups");
    }
  }
  std::vector<LabeledDataset> out(groups.size(), LabeledDataset(data.dimension()));
  for (const auto& s : data) {
    const auto it = owner.find(s.label);
    if (it != owner.end()) out[it->second].add(s.features, s.label);
  }
  return out;
}

std::vector<Label> seeded_class_permutation(std::vector<Label> labels, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  rng.shuffle(labels);
  return labels;
}

std::vector<DatasetSpec> parse_manifest(std::istream& in, const std::filesystem::path& root) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError("manifest: " + e.message(), e.line());
  }

  std::vector<DatasetSpec> specs;
  for (const auto& [name, section] : tree) {
    DatasetSpec spec;
    spec.name = name;
    try {
      const auto format = section.get<std::string>("format", "csv");
      if (format == "csv") {
        spec.format = DatasetSpec::Format::kCsv;
      } else if (format == "idx") {
        spec.format = DatasetSpec::Format::kIdx;
      } else {
        throw ParseError("manifest [" + name + "]: unknown format '" + format + "'");
      }
      spec.train = resolve(root, section.get<std::string>("train", ""));
      spec.test = resolve(root, section.get<std::string>("test", ""));
      spec.source = resolve(root, section.get<std::string>("source", ""));
      spec.train_count = section.get<std::size_t>("train_count", 0);
      spec.train_images = resolve(root, section.get<std::string>("train_images", ""));
      spec.train_labels = resolve(root, section.get<std::string>("train_labels", ""));
      spec.test_images = resolve(root, section.get<std::string>("test_images", ""));
      spec.test_labels = resolve(root, section.get<std::string>("test_labels", ""));
      spec.csv.label_column = section.get<int>("label_column", -1);
      spec.csv.skip_lines = section.get<std::size_t>("skip_lines", 0);
      const auto delim = section.get<std::string>("delimiter", "comma");
      if (delim == "comma") {
        spec.csv.delimiter = Delimiter::kComma;
      } else if (delim == "whitespace") {
        spec.csv.delimiter = Delimiter::kWhitespace;
      } else {
        throw ParseError("manifest [" + name + "]: unknown delimiter '" + delim + "'");
      }
      spec.classes = section.get<std::size_t>("classes");
      spec.features = section.get<std::size_t>("features");
    } catch (const pt::ptree_error& e) {
      throw ParseError("manifest [" + name + "]: " + e.what());
    }

    const bool csv_pair = !spec.train.empty() && !spec.test.empty();
    const bool csv_single = !spec.source.empty() && spec.train_count > 0;
    const bool idx = !spec.train_images.empty() && !spec.train_labels.empty() && !spec.test_images.empty() &&
                     !spec.test_labels.empty();
    if (spec.format == DatasetSpec::Format::kCsv && !(csv_pair || csv_single)) {
      throw ParseError("manifest [" + name + "]: csv needs train+test or source+train_count");
    }
    if (spec.format == DatasetSpec::Format::kIdx && !idx) {
      throw ParseError("manifest [" + name + "]: idx needs train/test images and labels");
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<DatasetSpec> load_manifest(const std::filesystem::path& path, const std::filesystem::path& root) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  return parse_manifest(in, root.empty() ? path.parent_path() : root);
}

const DatasetSpec& find_dataset(const std::vector<DatasetSpec>& manifest, const std::string& name) {
  for (const auto& spec : manifest) {
    if (spec.name == name) return spec;
  }
  throw NotFoundError("dataset '" + name + "' is not in the manifest");
}

DatasetSplits load_dataset(const DatasetSpec& spec) {
  DatasetSplits out;
  if (spec.format == DatasetSpec::Format::kIdx) {
    out.train = load_idx(spec.train_images, spec.train_labels);
    out.test = load_idx(spec.test_images, spec.test_labels);
  } else if (!spec.source.empty()) {
    const auto all = load_csv(spec.source, spec.csv);
    if (spec.train_count >= all.size()) {
      throw ParseError(spec.name + ": train_count " + std::to_string(spec.train_count) + " leaves no test rows");
    }
    out.train = LabeledDataset(all.dimension());
    out.test = LabeledDataset(all.dimension());
    for (std::size_t i = 0; i < all.size(); ++i) {
      auto& dst = i < spec.train_count ? out.train : out.test;
      dst.add(all[i].features, all[i].label);
    }
  } else {
    out.train = load_csv(spec.train, spec.csv);
    out.test = load_csv(spec.test, spec.csv);
  }

  for (const auto* split : {&out.train, &out.test}) {
    if (spec.features != 0 && split->dimension() != spec.features) {
      throw ParseError(spec.name + ": expected " + std::to_string(spec.features) + " features, found " +
                       std::to_string(split->dimension()));
    }
  }
  std::set<Label> labels;
  for (const auto* split : {&out.train, &out.test}) {
    for (const auto& s : *split) labels.insert(s.label);
  }
  if (spec.classes != 0 && labels.size() > spec.classes) {
    throw ParseError(spec.name + ": " + std::to_string(labels.size()) + " distinct labels, declared " +
                     std::to_string(spec.classes));
  }
  return out;
}

PreparedData prepare(const std::string& name, const DatasetSplits& raw) {
  PreparedData out;
  out.name = name;
  out.normalization = fit_normalizer(raw.train);
  out.train = apply_normalizer(out.normalization, raw.train);
  out.test = apply_normalizer(out.normalization, raw.test);
  return out;
}

void prepare_abalone(const std::filesystem::path& raw, const std::filesystem::path& out) {
  std::ifstream in(raw);
  if (!in) throw IoError("cannot open " + raw.string());
  std::ostringstream csv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line, Delimiter::kComma);
    if (fields.size() != 9) throw ParseError("abalone rows have 9 fields", line_no);
    const auto sex = fields[0];
    if (sex != "M" && sex != "F" && sex != "I") throw ParseError("unknown sex code", line_no);
    csv << (sex == "M" ? 1 : 0) << ',' << (sex == "F" ? 1 : 0) << ',' << (sex == "I" ? 1 : 0);
    for (std::size_t i = 1; i < 8; ++i) {
      if (!parse_number(fields[i])) throw ParseError("non-numeric measurement", line_no);
      csv << ',' << fields[i];
    }
    const auto rings = parse_number(fields[8]);
    if (!rings) throw ParseError("non-numeric ring count", line_no);
    csv << ',' << (*rings <= 8 ? "1" : *rings <= 10 ? "2" : "3") << '\n';
  }
  std::ofstream o(out);
  if (!o) throw IoError("cannot write " + out.string());
  o << csv.str();
}

}  // namespace cspnn
