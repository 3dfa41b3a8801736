#include "cspnn/protocols.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "cspnn/baseline_pnn.hpp"
#include "cspnn/error.hpp"
#include "cspnn/learning.hpp"
#include "cspnn/rng.hpp"
#include "json.hpp"

namespace cspnn {
namespace {

std::vector<Label> sorted_labels(const LabeledDataset& data) {
  auto labels = data.distinct_labels();
  std::sort(labels.begin(), labels.end());
  return labels;
}

/// Runs `body(run_index)` for every run, a few at a time, and concatenates
/// the results in run order.
template <typename Body>
std::vector<StageRecord> for_each_run(int runs, Body body) {
  const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
  std::vector<StageRecord> all;
  for (int first = 0; first < runs; first += static_cast<int>(width)) {
    const int last = std::min(runs, first + static_cast<int>(width));
    std::vector<std::future<std::vector<StageRecord>>> batch;
    for (int r = first; r < last; ++r) batch.push_back(std::async(std::launch::async, body, r));
    for (auto& f : batch) {
      auto records = f.get();
      all.insert(all.end(), records.begin(), records.end());
    }
  }
  return all;
}

StageRecord make_record(const ProtocolConfig& config, const PreparedData& data, int param, std::string stage,
                        const CsPnnModel& model, const EvalReport& report, std::uint64_t seed) {
  StageRecord rec;
  rec.scenario = config.scenario;
  rec.dataset = data.name;
  rec.param = param;
  rec.stage = std::move(stage);
  rec.classes = model.labels();
  rec.accuracy = report.accuracy();
  rec.hidden_count = static_cast<double>(model.hidden_count());
  rec.seed = seed;
  return rec;
}

std::string join(const std::vector<Label>& labels, char sep) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += sep;
    out += labels[i];
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::kStandard:
      return "standard";
    case Scenario::kCil:
      return "cil";
    case Scenario::kCuil:
      return "cuil";
  }
  return "?";
}

Scenario parse_scenario(const std::string& name) {
  if (name == "standard") return Scenario::kStandard;
  if (name == "cil") return Scenario::kCil;
  if (name == "cuil") return Scenario::kCuil;
  throw ConfigError("unknown scenario '" + name + "' (expected standard, cil or cuil)");
}

void validate(const ProtocolConfig& config) {
  if (config.runs < 1) throw ConfigError("run count must be at least 1");
  if (config.scenario == Scenario::kCil && (config.task < 1 || config.task > 4)) {
    throw ConfigError("CIL task must be in 1..4, got " + std::to_string(config.task));
  }
  if (config.scenario == Scenario::kCuil) {
    if (config.divisor < 2 || config.divisor > 4) {
      throw ConfigError("CUIL divisor must be in 2..4, got " + std::to_string(config.divisor));
    }
    if (config.iterations < 1) throw ConfigError("CUIL needs at least one iteration");
  }
}

std::vector<StageRecord> run_standard(const PreparedData& data, const ProtocolConfig& config) {
  validate(config);
  std::vector<StageRecord> out;

  CsPnnModel model;
  construct(model, data.train);
  out.push_back(make_record(config, data, 0, "cspnn", model, evaluate(model, data.test), config.seed));

  if (config.with_baseline) {
    const StaticPnnModel pnn = build_static(data.train);
    out.push_back(make_record(config, data, 0, "pnn", pnn.network(), evaluate_static(pnn, data.test), config.seed));
  }
  return out;
}

std::vector<std::size_t> cil_group_sizes(std::size_t class_count, int task) {
  if (task < 1 || task > 4) throw ConfigError("CIL task must be in 1..4, got " + std::to_string(task));
  if (class_count < 2) throw ConfigError("CIL needs at least two classes");
  std::vector<std::size_t> sizes;
  const auto step = static_cast<std::size_t>(task);
  std::size_t left = class_count;
  if (task == 1) {
    sizes.push_back(2);
    left -= 2;
  }
  while (left >= step) {
    sizes.push_back(step);
    left -= step;
  }
  if (left > 0) sizes.push_back(left);
  return sizes;
}

std::vector<StageRecord> run_cil(const PreparedData& data, const ProtocolConfig& config) {
  validate(config);
  const auto labels = sorted_labels(data.train);
  const auto sizes = cil_group_sizes(labels.size(), config.task);

  auto per_run = for_each_run(config.runs, [&](int run) {
    const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(run));
    const auto order = seeded_class_permutation(labels, seed);
    std::vector<StageRecord> records;
    CsPnnModel model;
    std::vector<Label> seen;
    std::size_t next = 0;
    for (std::size_t g = 0; g < sizes.size(); ++g) {
      const std::vector<Label> group(order.begin() + static_cast<std::ptrdiff_t>(next),
                                     order.begin() + static_cast<std::ptrdiff_t>(next + sizes[g]));
      next += sizes[g];
      seen.insert(seen.end(), group.begin(), group.end());
      construct(model, filter_classes(data.train, group));
      const auto report = evaluate(model, filter_classes(data.test, seen));
      records.push_back(make_record(config, data, config.task, std::to_string(g + 1), model, report, seed));
    }
    return records;
  });

  auto averaged = average_by_stage(per_run);
  per_run.insert(per_run.end(), averaged.begin(), averaged.end());
  return per_run;
}

std::vector<StageRecord> run_cuil(const PreparedData& data, const ProtocolConfig& config) {
  validate(config);
  const auto class_count = sorted_labels(data.train).size();
  const std::size_t n_unlearn = class_count / static_cast<std::size_t>(config.divisor);
  if (n_unlearn == 0) {
    throw ConfigError("CUIL with divisor " + std::to_string(config.divisor) + " needs at least that many classes");
  }

  auto per_run = for_each_run(config.runs, [&](int run) {
    const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(run));
    Xoshiro256 rng(seed);
    std::vector<StageRecord> records;

    CsPnnModel model;
    construct(model, data.train);
    records.push_back(make_record(config, data, config.divisor, "Ini.", model, evaluate(model, data.test), seed));

    for (int it = 1; it <= config.iterations; ++it) {
      auto pool = model.labels();
      std::sort(pool.begin(), pool.end());
      rng.shuffle(pool);
      const std::vector<Label> chosen(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_unlearn));

      unlearn_classes(model, chosen);
      const auto remaining = model.labels();
      records.push_back(make_record(config, data, config.divisor, std::to_string(it) + "U", model,
                                    evaluate(model, filter_classes(data.test, remaining)), seed));

      construct(model, filter_classes(data.train, chosen));
      records.push_back(make_record(config, data, config.divisor, std::to_string(it) + "C", model,
                                    evaluate(model, data.test), seed));
    }
    return records;
  });

  auto averaged = average_by_stage(per_run);
  per_run.insert(per_run.end(), averaged.begin(), averaged.end());
  return per_run;
}

std::vector<StageRecord> run_protocol(const PreparedData& data, const ProtocolConfig& config) {
  switch (config.scenario) {
    case Scenario::kStandard:
      return run_standard(data, config);
    case Scenario::kCil:
      return run_cil(data, config);
    case Scenario::kCuil:
      return run_cuil(data, config);
  }
  throw ConfigError("unknown scenario");
}

std::vector<StageRecord> average_by_stage(const std::vector<StageRecord>& per_run) {
  std::vector<StageRecord> out;
  std::vector<std::size_t> counts;
  for (const auto& rec : per_run) {
    if (!rec.seed) continue;
    auto it = std::find_if(out.begin(), out.end(), [&](const StageRecord& a) {
      return a.scenario == rec.scenario && a.dataset == rec.dataset && a.param == rec.param && a.stage == rec.stage;
    });
    if (it == out.end()) {
      StageRecord avg = rec;
      avg.seed.reset();
      avg.accuracy = 0.0;
      avg.hidden_count = 0.0;
      out.push_back(std::move(avg));
      counts.push_back(0);
      it = out.end() - 1;
    } else if (it->classes != rec.classes) {
      it->classes.clear();  // class sets differ between runs
    }
    it->accuracy += rec.accuracy;
    it->hidden_count += rec.hidden_count;
    ++counts[static_cast<std::size_t>(it - out.begin())];
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].accuracy /= static_cast<double>(counts[i]);
    out[i].hidden_count /= static_cast<double>(counts[i]);
  }
  return out;
}

void write_records_csv(std::ostream& out, const std::vector<StageRecord>& records) {
  out << "scenario,dataset,param,stage,seed,accuracy,hidden_count,classes\n";
  for (const auto& r : records) {
    fmt::print(out, "{},{},{},{},{},{:.6f},{:.4f},{}\n", to_string(r.scenario), csv_field(r.dataset), r.param,
               csv_field(r.stage), r.seed ? std::to_string(*r.seed) : "avg", r.accuracy, r.hidden_count,
               csv_field(join(r.classes, ';')));
  }
}

void write_records_json(std::ostream& out, const std::vector<StageRecord>& records) {
  auto rows = nlohmann::json::array();
  for (const auto& r : records) {
    rows.push_back({{"scenario", to_string(r.scenario)},
                    {"dataset", r.dataset},
                    {"param", r.param},
                    {"stage", r.stage},
                    {"seed", r.seed ? nlohmann::json(std::to_string(*r.seed)) : nlohmann::json("avg")},
                    {"accuracy", r.accuracy},
                    {"hidden_count", r.hidden_count},
                    {"classes", r.classes}});
  }
  out << rows.dump(2) << '\n';
}

void write_summary(std::ostream& out, const std::vector<StageRecord>& records) {
  fmt::print(out, "{:<20} {:<9} {:>5} {:>7} {:>10} {:>9}\n", "Dataset", "Scenario", "Param", "Stage", "N_h",
             "Acc. (%)");
  for (const auto& r : records) {
    if (r.seed && r.scenario != Scenario::kStandard) continue;
    fmt::print(out, "{:<20} {:<9} {:>5} {:>7} {:>10.1f} {:>9.2f}\n", r.dataset, to_string(r.scenario), r.param,
               r.stage, r.hidden_count, r.accuracy);
  }
}

}  // namespace cspnn
