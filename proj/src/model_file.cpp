#include "cspnn/model_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "cspnn/error.hpp"
#include "json.hpp"

namespace cspnn {
namespace {

constexpr char kMagic[4] = {'C', 'S', 'P', 'N'};

class Writer {
 public:
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    bytes_.insert(bytes_.end(), b, b + n);
  }
  template <typename T>
  void le(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v) { le(v); }
  void u64(std::uint64_t v) { le(v); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s.data(), s.size());
  }

  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::span<const std::uint8_t> take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw ParseError("model file truncated at byte " + std::to_string(pos_));
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  template <typename T>
  T le() {
    const auto b = take(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(b[i]) << (8 * i));
    return v;
  }
  std::uint8_t u8() { return take(1)[0]; }
  std::uint32_t u32() { return le<std::uint32_t>(); }
  std::uint64_t u64() { return le<std::uint64_t>(); }
  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }
  std::string str() {
    const auto n = u32();
    const auto b = take(n);
    return {b.begin(), b.end()};
  }
  /// Guards vector reservations against corrupt counts.
  std::uint64_t count(std::size_t min_bytes_each) {
    const auto n = u64();
    if (min_bytes_each != 0 && n > (bytes_.size() - pos_) / min_bytes_each) {
      throw ParseError("model file count exceeds remaining bytes");
    }
    return n;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_model(const ModelFile& file) {
  const auto& m = file.model;
  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.u32(kModelFileVersion);
  w.u64(m.dimension());
  w.u64(m.next_unit_id());
  w.u64(m.class_count());
  for (const auto& o : m.outputs()) w.str(o.label);
  w.u64(m.hidden_count());
  for (const auto& u : m.hidden()) {
    w.u64(u.id.value);
    w.u64(u.subnet);
    for (double v : u.centroid) w.f64(v);
  }
  if (file.normalization) {
    if (file.normalization->dimension() != m.dimension()) {
      throw ContractError("normalization dimension does not match the network");
    }
    w.u8(1);
    for (double v : file.normalization->min) w.f64(v);
    for (double v : file.normalization->max) w.f64(v);
  } else {
    w.u8(0);
  }
  w.str(file.dataset);
  return w.take();
}

ModelFile decode_model(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.take(sizeof kMagic);
  if (std::memcmp(magic.data(), kMagic, sizeof kMagic) != 0) throw ParseError("not a CS-PNN model file");
  const auto version = r.u32();
  if (version != kModelFileVersion) throw ParseError("unsupported model file version " + std::to_string(version));

  const std::size_t dim = r.u64();
  if (dim > bytes.size()) throw ParseError("implausible dimension " + std::to_string(dim));
  const std::uint64_t next_id = r.u64();
  std::vector<OutputUnit> outputs(r.count(4));
  for (auto& o : outputs) o.label = r.str();
  std::vector<RbfUnit> hidden(r.count(16 + 8 * dim));
  for (auto& u : hidden) {
    u.id.value = r.u64();
    u.subnet = r.u64();
    u.centroid.resize(dim);
    for (auto& v : u.centroid) v = r.f64();
  }

  ModelFile file;
  const auto has_norm = r.u8();
  if (has_norm > 1) throw ParseError("bad normalization flag");
  if (has_norm == 1) {
    NormalizationParams p;
    p.min.resize(dim);
    p.max.resize(dim);
    for (auto& v : p.min) v = r.f64();
    for (auto& v : p.max) v = r.f64();
    file.normalization = std::move(p);
  }
  file.dataset = r.str();
  if (!r.done()) throw ParseError("trailing bytes after model file");

  try {
    file.model = CsPnnModel::restore(dim, std::move(outputs), std::move(hidden), next_id);
  } catch (const ContractError& e) {
    throw ParseError(std::string("inconsistent model file: ") + e.what());
  }
  return file;
}

void save_model(const std::filesystem::path& path, const ModelFile& file) {
  const auto bytes = encode_model(file);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model " + path.string());
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  try {
    return decode_model(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string model_to_json(const ModelFile& file) {
  using nlohmann::json;
  const auto& m = file.model;
  json j;
  j["format_version"] = kModelFileVersion;
  j["dimension"] = m.dimension();
  j["next_unit_id"] = m.next_unit_id();
  j["dataset"] = file.dataset;
  auto outputs = json::array();
  for (std::size_t k = 0; k < m.class_count(); ++k) outputs.push_back({{"index", k}, {"label", m.outputs()[k].label}});
  j["outputs"] = outputs;
  auto hidden = json::array();
  for (const auto& u : m.hidden()) hidden.push_back({{"id", u.id.value}, {"subnet", u.subnet}, {"centroid", u.centroid}});
  j["hidden"] = hidden;
  if (file.normalization) {
    j["normalization"] = {{"min", file.normalization->min}, {"max", file.normalization->max}};
  } else {
    j["normalization"] = nullptr;
  }
  return j.dump(2);
}

}  // namespace cspnn
