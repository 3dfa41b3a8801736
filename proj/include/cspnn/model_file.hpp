#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cspnn/core_model.hpp"
#include "cspnn/data_io.hpp"

namespace cspnn {

/// A network plus what is needed to feed it raw data again.
///
/// Binary layout, all integers little-endian:
///
///     char[4]  magic "CSPN"
///     u32      version (1)
///     u64      dimension d
///     u64      next unit id
///     u64      output count k, then per output: u32 byte length, label bytes
///     u64      hidden count j, then per unit: u64 id, u64 subnet, d x f64
///     u8       1 if normalization follows, else 0
///              [d x f64 min, d x f64 max]
///     u32      byte length, dataset name bytes
///
/// Doubles are stored as their IEEE-754 bit patterns, so a save/load round
/// trip reproduces the network bit for bit.
struct ModelFile {
  CsPnnModel model;
  std::optional<NormalizationParams> normalization;
  std::string dataset;

  friend bool operator==(const ModelFile&, const ModelFile&) = default;
};

inline constexpr std::uint32_t kModelFileVersion = 1;

std::vector<std::uint8_t> encode_model(const ModelFile& file);
/// Throws ParseError on bad magic, unknown version, truncation or trailing bytes.
ModelFile decode_model(std::span<const std::uint8_t> bytes);

/// Writes to a temporary sibling and renames it into place.
void save_model(const std::filesystem::path& path, const ModelFile& file);
ModelFile load_model(const std::filesystem::path& path);

/// Pretty-printed JSON view for inspection; not read back.
std::string model_to_json(const ModelFile& file);

}  // namespace cspnn
