#include <algorithm>
#include <set>
#include <sstream>

#include "cspnn/error.hpp"
#include "cspnn/protocols.hpp"
#include "doctest.h"
#include "json.hpp"
#include "oracle.hpp"

using namespace cspnn;

namespace {

PreparedData synthetic(std::size_t classes, std::uint64_t seed = 1) {
  DatasetSplits raw{oracle::blobs(classes, 25, 4, seed, 0.2), oracle::blobs(classes, 10, 4, seed, 0.2)};
  return prepare("blobs" + std::to_string(classes), raw);
}

std::vector<StageRecord> only_runs(const std::vector<StageRecord>& all) {
  std::vector<StageRecord> out;
  std::copy_if(all.begin(), all.end(), std::back_inserter(out), [](const auto& r) { return r.seed.has_value(); });
  return out;
}

std::vector<StageRecord> only_averages(const std::vector<StageRecord>& all) {
  std::vector<StageRecord> out;
  std::copy_if(all.begin(), all.end(), std::back_inserter(out), [](const auto& r) { return !r.seed.has_value(); });
  return out;
}

}  // namespace

TEST_CASE("scenario names") {
  for (auto s : {Scenario::kStandard, Scenario::kCil, Scenario::kCuil}) CHECK(parse_scenario(to_string(s)) == s);
  CHECK_THROWS_AS(parse_scenario("iil"), ConfigError);
}

TEST_CASE("config validation") {
  ProtocolConfig c;
  c.scenario = Scenario::kCil;
  c.task = 5;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.task = 0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.task = 4;
  CHECK_NOTHROW(validate(c));
  c.scenario = Scenario::kCuil;
  c.divisor = 1;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.divisor = 5;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.divisor = 3;
  c.runs = 0;
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("cil_group_sizes") {
  CHECK(cil_group_sizes(26, 4) == std::vector<std::size_t>{4, 4, 4, 4, 4, 4, 2});
  CHECK(cil_group_sizes(10, 3) == std::vector<std::size_t>{3, 3, 3, 1});
  CHECK(cil_group_sizes(10, 2) == std::vector<std::size_t>{2, 2, 2, 2, 2});
  CHECK(cil_group_sizes(10, 1) == std::vector<std::size_t>{2, 1, 1, 1, 1, 1, 1, 1, 1});
  CHECK(cil_group_sizes(7, 4) == std::vector<std::size_t>{4, 3});
  for (std::size_t n = 2; n <= 30; ++n) {
    for (int t = 1; t <= 4; ++t) {
      const auto sizes = cil_group_sizes(n, t);
      std::size_t sum = 0;
      for (auto s : sizes) sum += s;
      CHECK(sum == n);
    }
  }
  CHECK_THROWS_AS(cil_group_sizes(10, 5), ConfigError);
}

TEST_CASE("run_standard") {
  const auto data = synthetic(4);
  ProtocolConfig c;
  const auto recs = run_standard(data, c);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].stage == "cspnn");
  CHECK(recs[1].stage == "pnn");
  CHECK(recs[0].hidden_count < static_cast<double>(data.train.size()));
  CHECK(recs[1].hidden_count == static_cast<double>(data.train.size()));
  for (const auto& r : recs) {
    CHECK(r.accuracy >= 0.0);
    CHECK(r.accuracy <= 100.0);
  }
  c.with_baseline = false;
  CHECK(run_standard(data, c).size() == 1);
}

TEST_CASE("run_cil") {
  const auto data = synthetic(7);
  ProtocolConfig c;
  c.scenario = Scenario::kCil;
  c.task = 2;
  c.runs = 3;
  const auto all = run_cil(data, c);
  const auto runs = only_runs(all);
  const auto avgs = only_averages(all);
  const auto sizes = cil_group_sizes(7, 2);
  REQUIRE(runs.size() == sizes.size() * 3);
  REQUIRE(avgs.size() == sizes.size());

  for (int r = 0; r < 3; ++r) {
    double prev_h = 0;
    std::size_t expected_classes = 0;
    for (std::size_t g = 0; g < sizes.size(); ++g) {
      const auto& rec = runs[static_cast<std::size_t>(r) * sizes.size() + g];
      expected_classes += sizes[g];
      CHECK(rec.stage == std::to_string(g + 1));
      CHECK(rec.classes.size() == expected_classes);
      CHECK(rec.hidden_count >= prev_h);
      CHECK(rec.hidden_count >= static_cast<double>(rec.classes.size()));
      prev_h = rec.hidden_count;
    }
  }

  // Averages are the arithmetic means of the per-run rows.
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    double acc = 0, h = 0;
    for (int r = 0; r < 3; ++r) {
      acc += runs[static_cast<std::size_t>(r) * sizes.size() + g].accuracy;
      h += runs[static_cast<std::size_t>(r) * sizes.size() + g].hidden_count;
    }
    CHECK(avgs[g].accuracy == doctest::Approx(acc / 3).epsilon(1e-12));
    CHECK(avgs[g].hidden_count == doctest::Approx(h / 3).epsilon(1e-12));
  }

  CHECK(run_cil(data, c) == all);  // reproducible
  c.seed = 2;
  CHECK(run_cil(data, c) != all);
}

TEST_CASE("run_cil evaluates only classes seen so far") {
  // The final stage evaluates on every class; the first only on the first group.
  const auto data = synthetic(5, 3);
  ProtocolConfig c;
  c.scenario = Scenario::kCil;
  c.task = 1;
  c.runs = 2;
  const auto runs = only_runs(run_cil(data, c));
  CHECK(runs.front().classes.size() == 2);
  CHECK(runs[3].classes.size() == 5);
}

TEST_CASE("run_cuil") {
  const auto data = synthetic(6, 5);
  ProtocolConfig c;
  c.scenario = Scenario::kCuil;
  c.divisor = 3;
  c.iterations = 3;
  c.runs = 2;
  const auto all = run_cuil(data, c);
  const auto runs = only_runs(all);
  REQUIRE(runs.size() == 2 * 7);
  std::set<Label> full;
  for (const auto& s : data.train) full.insert(s.label);

  for (int r = 0; r < 2; ++r) {
    const auto* rec = &runs[static_cast<std::size_t>(r) * 7];
    CHECK(rec[0].stage == "Ini.");
    CHECK(rec[0].classes.size() == 6);
    for (int it = 1; it <= 3; ++it) {
      const auto& u = rec[2 * it - 1];
      const auto& cc = rec[2 * it];
      CHECK(u.stage == std::to_string(it) + "U");
      CHECK(cc.stage == std::to_string(it) + "C");
      CHECK(u.classes.size() == 4);  // floor(6 / 3) removed
      CHECK(std::set<Label>(cc.classes.begin(), cc.classes.end()) == full);
      CHECK(u.hidden_count < cc.hidden_count);
    }
  }
  CHECK(run_cuil(data, c) == all);

  c.divisor = 4;
  const auto small = synthetic(3);
  CHECK_THROWS_AS(run_cuil(small, c), ConfigError);
}

TEST_CASE("average_by_stage") {
  StageRecord a{Scenario::kCil, "d", 1, "1", {"x"}, 50.0, 10.0, 1};
  StageRecord b{Scenario::kCil, "d", 1, "1", {"y"}, 70.0, 20.0, 2};
  StageRecord c{Scenario::kCil, "d", 1, "2", {"x", "y"}, 80.0, 30.0, 1};
  const auto avg = average_by_stage({a, b, c});
  REQUIRE(avg.size() == 2);
  CHECK(avg[0].accuracy == 60.0);
  CHECK(avg[0].hidden_count == 15.0);
  CHECK(avg[0].classes.empty());
  CHECK_FALSE(avg[0].seed.has_value());
  CHECK(avg[1].classes == std::vector<Label>{"x", "y"});
}

TEST_CASE("record writers") {
  StageRecord a{Scenario::kCuil, "pendigits", 2, "1U", {"0", "1"}, 91.25, 120.0, 42};
  StageRecord avg = a;
  avg.seed.reset();
  std::ostringstream csv;
  write_records_csv(csv, {a, avg});
  CHECK(csv.str() ==
        "scenario,dataset,param,stage,seed,accuracy,hidden_count,classes\n"
        "cuil,pendigits,2,1U,42,91.250000,120.0000,0;1\n"
        "cuil,pendigits,2,1U,avg,91.250000,120.0000,0;1\n");

  std::ostringstream js;
  write_records_json(js, {a, avg});
  const auto parsed = nlohmann::json::parse(js.str());
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0]["seed"] == "42");
  CHECK(parsed[1]["seed"] == "avg");
  CHECK(parsed[0]["accuracy"] == 91.25);

  std::ostringstream summary;
  write_summary(summary, {a, avg});
  CHECK(summary.str().find("pendigits") != std::string::npos);
  CHECK(summary.str().find("91.25") != std::string::npos);
}
