#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cspnn/data_io.hpp"

namespace cspnn {

enum class Scenario { kStandard, kCil, kCuil };

std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& name);

/// One evaluation point of an experiment run, or the mean over runs when
/// `seed` is empty.
struct StageRecord {
  Scenario scenario = Scenario::kStandard;
  std::string dataset;
  int param = 0;      ///< CIL group size i or CUIL divisor j; 0 for standard
  std::string stage;  ///< "cspnn"/"pnn", CIL step "1".."n", or "Ini."/"2U"/"2C"
  std::vector<Label> classes;  ///< classes present in the evaluated network
  double accuracy = 0.0;
  double hidden_count = 0.0;
  std::optional<std::uint64_t> seed;

  friend bool operator==(const StageRecord&, const StageRecord&) = default;
};

struct ProtocolConfig {
  Scenario scenario = Scenario::kStandard;
  int task = 1;          ///< CIL: classes per increment, 1..4
  int divisor = 2;       ///< CUIL: N_ul = floor(N_c / divisor), 2..4
  int iterations = 4;    ///< CUIL unlearn/relearn rounds
  int runs = 10;
  std::uint64_t seed = 1;
  bool with_baseline = true;  ///< standard: also build the original PNN
};

/// Checks ranges; throws ConfigError.
void validate(const ProtocolConfig& config);

/// Standard task: CS-PNN from the whole training split in file order, plus
/// the original PNN when requested. One record per network.
std::vector<StageRecord> run_standard(const PreparedData& data, const ProtocolConfig& config);

/// Class sizes of the CIL increments for `class_count` classes and group size
/// `task`. Task 1 starts with two classes; otherwise groups of `task`, the
/// last one holding the remainder when it is non-zero.
std::vector<std::size_t> cil_group_sizes(std::size_t class_count, int task);

/// Class-incremental learning over `config.runs` seeded class orders. Each
/// stage reconstructs from that group's training data only and is tested
/// on every class seen so far. Returns the per-run records followed by the
/// per-stage averages.
std::vector<StageRecord> run_cil(const PreparedData& data, const ProtocolConfig& config);

/// Repeated class unlearning and relearning on a network built from the
/// full training split: "Ini.", then "iU" and "iC" for each iteration.
/// Per-run records followed by averages.
std::vector<StageRecord> run_cuil(const PreparedData& data, const ProtocolConfig& config);

std::vector<StageRecord> run_protocol(const PreparedData& data, const ProtocolConfig& config);

/// Averages records sharing (scenario, dataset, param, stage) across seeds,
/// keeping first-appearance order of the stages. The class list is kept only
/// when every run evaluated the same classes.
std::vector<StageRecord> average_by_stage(const std::vector<StageRecord>& per_run);

/// Columns: scenario,dataset,param,stage,seed,accuracy,hidden_count,classes.
/// Averaged rows carry "avg" in the seed column.
void write_records_csv(std::ostream& out, const std::vector<StageRecord>& records);
void write_records_json(std::ostream& out, const std::vector<StageRecord>& records);

/// Human-readable table of the averaged (or seedless) records.
void write_summary(std::ostream& out, const std::vector<StageRecord>& records);

}  // namespace cspnn
