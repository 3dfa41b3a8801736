#include "cspnn/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "cspnn/error.hpp"
#include "cspnn/learning.hpp"
#include "cspnn/model_file.hpp"
#include "cspnn/protocols.hpp"
#include "json.hpp"

namespace cspnn::cli {
namespace {

namespace fs = std::filesystem;

/// Where data comes from: a manifest entry or ad-hoc CSV files.
struct SourceOptions {
  std::string manifest;
  std::string dataset;
  std::string train_csv;
  std::string test_csv;
  int label_column = -1;
  std::string delimiter = "comma";
  std::string name;

  void add_to(CLI::App& app) {
    app.add_option("--manifest", manifest, "Dataset manifest (default: $CSPNN_DATA_DIR/datasets.ini)");
    app.add_option("--dataset", dataset, "Dataset name in the manifest");
    app.add_option("--train-csv", train_csv, "Training CSV (instead of --dataset)");
    app.add_option("--test-csv", test_csv, "Test CSV (instead of --dataset)");
    app.add_option("--label-column", label_column, "Label column for --*-csv; negative counts from the end");
    app.add_option("--delimiter", delimiter, "Field separator for --*-csv")
        ->check(CLI::IsMember({"comma", "whitespace"}));
    app.add_option("--name", name, "Dataset name recorded for --*-csv input");
  }

  std::string display_name() const {
    if (!dataset.empty()) return dataset;
    if (!name.empty()) return name;
    return fs::path(train_csv.empty() ? test_csv : train_csv).stem().string();
  }

  /// Loads whichever splits are configured. A missing split stays empty.
  DatasetSplits load(bool need_train, bool need_test) const {
    if (!dataset.empty()) {
      fs::path path = manifest;
      if (path.empty()) {
        const char* root = std::getenv("CSPNN_DATA_DIR");
        path = fs::path(root ? root : ".") / "datasets.ini";
      }
      return load_dataset(find_dataset(load_manifest(path), dataset));
    }
    CsvOptions csv;
    csv.label_column = label_column;
    csv.delimiter = delimiter == "whitespace" ? Delimiter::kWhitespace : Delimiter::kComma;
    if (need_train && train_csv.empty()) throw ConfigError("need --dataset or --train-csv");
    if (need_test && test_csv.empty()) throw ConfigError("need --dataset or --test-csv");
    DatasetSplits out;
    if (!train_csv.empty()) out.train = load_csv(train_csv, csv);
    if (!test_csv.empty()) out.test = load_csv(test_csv, csv);
    return out;
  }
};

std::vector<Label> split_list(const std::string& s) {
  std::vector<Label> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

LabeledDataset restrict(const LabeledDataset& data, const std::string& classes) {
  if (classes.empty()) return data;
  const auto keep = split_list(classes);
  return filter_classes(data, keep);
}

void write_text(const fs::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

// --- train -----------------------------------------------------------------

struct TrainOptions {
  SourceOptions source;
  std::string model_in;
  std::string model_out;
  std::string classes;
};

int cmd_train(const TrainOptions& o, std::ostream& out) {
  const auto raw = o.source.load(true, false);
  ModelFile file;
  if (!o.model_in.empty()) {
    file = load_model(o.model_in);
  } else {
    file.dataset = o.source.display_name();
  }
  if (!file.normalization) file.normalization = fit_normalizer(raw.train);
  const auto train = apply_normalizer(*file.normalization, restrict(raw.train, o.classes));

  const auto before_units = file.model.hidden_count();
  const auto stats = construct(file.model, train);
  save_model(o.model_out, file);

  fmt::print(out, "presented: {}\n", stats.presented);
  fmt::print(out, "units added: {}, centroid updates: {}\n", stats.units_added, stats.centroid_updates);
  fmt::print(out, "N_h: {} (was {})\n", file.model.hidden_count(), before_units);
  fmt::print(out, "classes: {}\n", file.model.class_count());
  return kOk;
}

// --- test ------------------------------------------------------------------

struct TestOptions {
  SourceOptions source;
  std::string model_in;
  std::string split = "test";
  std::string classes;
  std::string predictions;
  std::string format = "text";
};

int cmd_test(const TestOptions& o, std::ostream& out) {
  const auto file = load_model(o.model_in);
  const bool use_train = o.split == "train";
  const auto raw = o.source.load(use_train, !use_train);
  auto data = restrict(use_train ? raw.train : raw.test, o.classes);
  if (file.normalization) data = apply_normalizer(*file.normalization, data);
  const auto report = evaluate(file.model, data);

  if (!o.predictions.empty()) {
    std::ostringstream csv;
    csv << "index,truth,predicted\n";
    for (std::size_t i = 0; i < report.predictions.size(); ++i) {
      csv << i << ',' << report.predictions[i].truth << ',' << report.predictions[i].predicted << '\n';
    }
    write_text(o.predictions, csv.str());
  }

  if (o.format == "json") {
    nlohmann::json j;
    j["total"] = report.total;
    j["correct"] = report.correct;
    j["accuracy"] = report.accuracy();
    j["hidden_count"] = report.hidden_count;
    auto per_class = nlohmann::json::object();
    for (const auto& [label, t] : report.per_class) per_class[label] = {{"count", t.count}, {"correct", t.correct}};
    j["per_class"] = per_class;
    out << j.dump(2) << '\n';
  } else if (o.format == "csv") {
    out << "class,count,correct,accuracy\n";
    for (const auto& [label, t] : report.per_class) {
      fmt::print(out, "{},{},{},{:.4f}\n", label, t.count, t.correct,
                 t.count ? 100.0 * static_cast<double>(t.correct) / static_cast<double>(t.count) : 0.0);
    }
    fmt::print(out, "all,{},{},{:.4f}\n", report.total, report.correct, report.accuracy());
  } else {
    fmt::print(out, "accuracy: {:.2f}% ({}/{})\n", report.accuracy(), report.correct, report.total);
    fmt::print(out, "N_h: {}, classes: {}\n", report.hidden_count, file.model.class_count());
    fmt::print(out, "{:<16} {:>8} {:>8} {:>9}\n", "class", "count", "correct", "acc. (%)");
    for (const auto& [label, t] : report.per_class) {
      fmt::print(out, "{:<16} {:>8} {:>8} {:>9.2f}\n", label, t.count, t.correct,
                 t.count ? 100.0 * static_cast<double>(t.correct) / static_cast<double>(t.count) : 0.0);
    }
  }
  return kOk;
}

// --- unlearn ---------------------------------------------------------------

struct UnlearnOptions {
  std::string model_in;
  std::string model_out;
  std::string classes;
  std::string units;
};

int cmd_unlearn(const UnlearnOptions& o, std::ostream& out) {
  if (o.classes.empty() == o.units.empty()) throw ConfigError("give exactly one of --classes or --units");
  auto file = load_model(o.model_in);
  const auto j_before = file.model.hidden_count();
  const auto k_before = file.model.class_count();

  if (!o.classes.empty()) {
    unlearn_classes(file.model, split_list(o.classes));
  } else {
    std::vector<UnitId> ids;
    for (const auto& token : split_list(o.units)) {
      std::uint64_t v = 0;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
      if (ec != std::errc{} || ptr != token.data() + token.size()) throw ConfigError("bad unit id '" + token + "'");
      ids.push_back(UnitId{v});
    }
    unlearn_units(file.model, ids);
  }
  save_model(o.model_out, file);

  fmt::print(out, "removed units: {}, removed classes: {}\n", j_before - file.model.hidden_count(),
             k_before - file.model.class_count());
  fmt::print(out, "j: {} -> {}\n", j_before, file.model.hidden_count());
  fmt::print(out, "k: {} -> {}\n", k_before, file.model.class_count());
  return kOk;
}

// --- bench -----------------------------------------------------------------

struct BenchOptions {
  SourceOptions source;
  std::string scenario;
  ProtocolConfig config;
  std::string out_dir;
  std::string format = "both";
  bool no_baseline = false;
};

int cmd_bench(BenchOptions o, std::ostream& out) {
  o.config.scenario = parse_scenario(o.scenario);
  o.config.with_baseline = !o.no_baseline;
  validate(o.config);

  const auto raw = o.source.load(true, true);
  const auto data = prepare(o.source.display_name(), raw);
  const auto records = run_protocol(data, o.config);

  std::string stem = o.scenario + "_" + data.name;
  if (o.config.scenario == Scenario::kCil) stem += "_task" + std::to_string(o.config.task);
  if (o.config.scenario == Scenario::kCuil) stem += "_j" + std::to_string(o.config.divisor);

  fs::create_directories(o.out_dir);
  if (o.format == "csv" || o.format == "both") {
    std::ostringstream s;
    write_records_csv(s, records);
    write_text(fs::path(o.out_dir) / (stem + ".csv"), s.str());
  }
  if (o.format == "json" || o.format == "both") {
    std::ostringstream s;
    write_records_json(s, records);
    write_text(fs::path(o.out_dir) / (stem + ".json"), s.str());
  }
  std::ostringstream summary;
  write_summary(summary, records);
  write_text(fs::path(o.out_dir) / (stem + "_summary.txt"), summary.str());
  out << summary.str();
  return kOk;
}

// --- export / prepare ------------------------------------------------------

int cmd_export(const std::string& model_in, const std::string& json_out, std::ostream& out) {
  const auto text = model_to_json(load_model(model_in)) + "\n";
  if (json_out.empty()) {
    out << text;
  } else {
    write_text(json_out, text);
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compact-sized probabilistic neural network: train, test, unlearn and benchmark", "cspnn"};
  app.require_subcommand(1);

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Construct (or reconstruct) a network and save it");
  train.source.add_to(*train_cmd);
  train_cmd->add_option("--in", train.model_in, "Existing model to extend")->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train.model_out, "Model file to write")->required();
  train_cmd->add_option("--classes", train.classes, "Only train on these classes (comma separated)");

  TestOptions test;
  auto* test_cmd = app.add_subcommand("test", "Evaluate a saved network");
  test.source.add_to(*test_cmd);
  test_cmd->add_option("--model", test.model_in, "Model file")->required();
  test_cmd->add_option("--split", test.split, "Which split to evaluate")->check(CLI::IsMember({"train", "test"}));
  test_cmd->add_option("--classes", test.classes, "Only evaluate these classes (comma separated)");
  test_cmd->add_option("--predictions", test.predictions, "Write per-sample predictions as CSV");
  test_cmd->add_option("--format", test.format, "Report format")->check(CLI::IsMember({"text", "csv", "json"}));

  UnlearnOptions unlearn;
  auto* unlearn_cmd = app.add_subcommand("unlearn", "Remove classes or hidden units from a saved network");
  unlearn_cmd->add_option("--model", unlearn.model_in, "Model file")->required();
  unlearn_cmd->add_option("--out", unlearn.model_out, "Model file to write")->required();
  auto* by_class = unlearn_cmd->add_option("--classes", unlearn.classes, "Labels to unlearn (comma separated)");
  auto* by_unit = unlearn_cmd->add_option("--units", unlearn.units, "Unit ids to unlearn (comma separated)");
  by_class->excludes(by_unit);

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run an experiment scenario and write stage records");
  bench.source.add_to(*bench_cmd);
  bench_cmd->add_option("scenario", bench.scenario, "standard, cil or cuil")
      ->required()
      ->check(CLI::IsMember({"standard", "cil", "cuil"}));
  bench_cmd->add_option("--task", bench.config.task, "CIL: classes added per step (1-4)");
  bench_cmd->add_option("--j", bench.config.divisor, "CUIL: unlearn floor(N_c / j) classes per round (2-4)");
  bench_cmd->add_option("--iterations", bench.config.iterations, "CUIL: unlearn/relearn rounds");
  bench_cmd->add_option("--runs", bench.config.runs, "Number of seeded runs");
  bench_cmd->add_option("--seed", bench.config.seed, "Base seed");
  bench_cmd->add_option("--out", bench.out_dir, "Output directory")->required();
  bench_cmd->add_option("--format", bench.format, "Record files to write")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  bench_cmd->add_flag("--no-baseline", bench.no_baseline, "Standard: skip the original PNN");

  std::string export_in;
  std::string export_out;
  auto* export_cmd = app.add_subcommand("export", "Dump a model file as JSON");
  export_cmd->add_option("--model", export_in, "Model file")->required();
  export_cmd->add_option("--out", export_out, "JSON file (default: stdout)");

  std::string abalone_raw;
  std::string abalone_out;
  auto* abalone_cmd = app.add_subcommand("prepare-abalone", "Write the 3-class abalone CSV from abalone.data");
  abalone_cmd->add_option("--raw", abalone_raw, "UCI abalone.data")->required();
  abalone_cmd->add_option("--out", abalone_out, "CSV to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*train_cmd) return cmd_train(train, out);
    if (*test_cmd) return cmd_test(test, out);
    if (*unlearn_cmd) return cmd_unlearn(unlearn, out);
    if (*bench_cmd) return cmd_bench(bench, out);
    if (*export_cmd) return cmd_export(export_in, export_out, out);
    if (*abalone_cmd) {
      prepare_abalone(abalone_raw, abalone_out);
      return kOk;
    }
  } catch (const ConfigError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kUsage;
  } catch (const IoError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kIoOrParse;
  } catch (const ParseError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kIoOrParse;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kContract;
  } catch (const std::filesystem::filesystem_error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kIoOrParse;
  }
  return kUsage;
}

}  // namespace cspnn::cli
