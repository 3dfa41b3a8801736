#include <algorithm>
#include <random>
#include <set>

#include "cspnn/data_io.hpp"
#include "cspnn/error.hpp"
#include "cspnn/learning.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace cspnn;

namespace {

LabeledDataset make(std::size_t dim, std::vector<Sample> samples) { return LabeledDataset(dim, std::move(samples)); }

std::vector<Label> unit_labels(const CsPnnModel& m) {
  std::vector<Label> out;
  for (const auto& u : m.hidden()) out.push_back(m.outputs()[u.subnet].label);
  return out;
}

bool in_box(const FeatureVector& c, const std::vector<FeatureVector>& points) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    double lo = points[0][i], hi = points[0][i];
    for (const auto& p : points) {
      lo = std::min(lo, p[i]);
      hi = std::max(hi, p[i]);
    }
    if (c[i] < lo - 1e-12 || c[i] > hi + 1e-12) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("construct: seeding and new classes") {
  CsPnnModel m;
  auto stats = construct(m, make(2, {{{0.5, -0.5}, "A"}}));
  CHECK(stats.units_added == 1);
  CHECK(m.class_count() == 1);
  REQUIRE(m.hidden_count() == 1);
  CHECK(m.hidden()[0].centroid == FeatureVector{0.5, -0.5});

  stats = construct(m, make(2, {{{0.1, 0.1}, "B"}}));
  CHECK(stats.classes_added == 1);
  CHECK(m.class_count() == 2);
  CHECK(m.outputs()[1].label == "B");
  CHECK(m.hidden()[1].centroid == FeatureVector{0.1, 0.1});
  CHECK(m.hidden()[1].subnet == 1);
}

TEST_CASE("construct: empty data is a no-op and a dimension mismatch is rejected") {
  CsPnnModel m;
  construct(m, make(1, {{{0.0}, "A"}}));
  const auto before = m;
  CHECK(construct(m, LabeledDataset(1)).presented == 0);
  CHECK(m == before);
  CHECK_THROWS_AS(construct(m, make(2, {{{0.0, 0.0}, "A"}})), ContractError);
  CHECK(m == before);
}

TEST_CASE("construct: 1-D hand trace") {
  CsPnnModel m;
  const auto stats = construct(m, make(1, {{{-1.0}, "A"}, {{1.0}, "B"}, {{-0.8}, "A"}}));
  CHECK(m.hidden_count() == 2);
  CHECK(stats.centroid_updates == 1);
  CHECK(m.hidden()[0].centroid[0] == -0.9);
  CHECK(m.hidden()[1].centroid[0] == 1.0);
  CHECK(unit_labels(m) == std::vector<Label>{"A", "B"});
}

TEST_CASE("construct: 2-D hand trace with a miss and a tie") {
  CsPnnModel m;
  const auto data = make(2, {{{0.0, 0.0}, "A"},
                             {{1.0, 0.0}, "B"},
                             {{0.9, 0.0}, "A"},  // predicted B: new A unit
                             {{0.0, 1.0}, "C"},
                             {{0.1, 0.1}, "A"},
                             {{1.0, 1.0}, "B"}});  // B and C tie; B wins
  const auto stats = construct(m, data);
  CHECK(stats.units_added == 4);
  CHECK(stats.centroid_updates == 2);
  REQUIRE(m.hidden_count() == 4);
  CHECK(m.class_count() == 3);
  CHECK(unit_labels(m) == std::vector<Label>{"A", "B", "A", "C"});
  CHECK(m.hidden()[0].centroid == FeatureVector{0.05, 0.05});
  CHECK(m.hidden()[1].centroid == FeatureVector{1.0, 0.5});
  CHECK(m.hidden()[2].centroid == FeatureVector{0.9, 0.0});
  CHECK(m.hidden()[3].centroid == FeatureVector{0.0, 1.0});
}

TEST_CASE("construct: duplicate seed sample takes the degenerate path") {
  CsPnnModel m;
  construct(m, make(1, {{{0.0}, "A"},
                        {{0.0}, "A"},
                        {{1.0}, "B"},
                        {{0.6}, "A"},
                        {{0.7}, "A"},
                        {{0.9}, "B"},
                        {{-0.5}, "C"}}));
  REQUIRE(m.hidden_count() == 4);
  CHECK(unit_labels(m) == std::vector<Label>{"A", "B", "A", "C"});
  CHECK(m.hidden()[0].centroid[0] == 0.0);
  CHECK(m.hidden()[1].centroid[0] == 0.95);
  CHECK(m.hidden()[2].centroid[0] == (0.6 + 0.7) / 2);
  CHECK(m.hidden()[3].centroid[0] == -0.5);
}

TEST_CASE("construct: a class emptied by unit unlearning gets a unit back") {
  CsPnnModel m;
  construct(m, make(1, {{{-1.0}, "A"}, {{1.0}, "B"}}));
  const std::vector<UnitId> drop{m.hidden()[0].id};
  unlearn_units(m, drop);
  CHECK(m.class_count() == 2);
  construct(m, make(1, {{{-0.9}, "A"}}));
  CHECK(m.hidden_count() == 2);
  CHECK(unit_labels(m) == std::vector<Label>{"B", "A"});

  SUBCASE("and so does a model left with outputs only") {
    CsPnnModel n;
    construct(n, make(1, {{{0.3}, "A"}}));
    const std::vector<UnitId> all{n.hidden()[0].id};
    unlearn_units(n, all);
    CHECK(n.empty());
    construct(n, make(1, {{{0.2}, "A"}}));
    CHECK(n.hidden_count() == 1);
  }
}

TEST_CASE("construct properties on random data") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto data = oracle::blobs(1 + seed % 5, 12, 1 + seed % 6, seed, 0.3);
    CsPnnModel a, b;
    construct(a, data);
    construct(b, data);
    CHECK(a == b);  // deterministic

    const auto seen = data.distinct_labels();
    CHECK(a.labels() == seen);
    CHECK(a.hidden_count() <= data.size());
    CHECK(a.hidden_count() >= a.class_count());

    std::vector<FeatureVector> points;
    for (const auto& s : data) points.push_back(s.features);
    for (const auto& u : a.hidden()) CHECK(in_box(u.centroid, points));

    // hidden count never decreases while presenting
    CsPnnModel inc;
    std::size_t prev = 0;
    for (const auto& s : data) {
      construct(inc, make(data.dimension(), {s}));
      CHECK(inc.hidden_count() >= prev);
      CHECK(inc.hidden_count() <= prev + 1);
      prev = inc.hidden_count();
    }
    CHECK(inc == a);  // sample-by-sample presentation is the same single pass
  }
}

TEST_CASE("construct adds units only at presented patterns") {
  const auto data = oracle::blobs(3, 20, 2, 77, 0.4);
  CsPnnModel m;
  for (const auto& s : data) {
    const auto before = m.hidden_count();
    construct(m, make(2, {s}));
    if (m.hidden_count() > before) CHECK(m.hidden().back().centroid == s.features);
  }
}

TEST_CASE("unlearn_units") {
  CsPnnModel m;
  construct(m, make(1, {{{-1.0}, "A"}, {{1.0}, "B"}, {{0.1}, "A"}}));
  REQUIRE(m.hidden_count() == 3);
  const auto before = m;

  SUBCASE("no ids") {
    unlearn_units(m, std::span<const UnitId>{});
    CHECK(m == before);
  }
  SUBCASE("one id") {
    const std::vector<UnitId> ids{m.hidden()[1].id};
    unlearn_units(m, ids);
    CHECK(m.hidden_count() == 2);
    CHECK(m.outputs() == before.outputs());
  }
  SUBCASE("unknown id leaves the model unchanged") {
    const std::vector<UnitId> ids{m.hidden()[0].id, UnitId{999}};
    CHECK_THROWS_AS(unlearn_units(m, ids), NotFoundError);
    CHECK(m == before);
  }
  SUBCASE("removing every A unit makes A unreachable") {
    std::vector<UnitId> ids;
    for (const auto& u : m.hidden()) {
      if (u.subnet == 0) ids.push_back(u.id);
    }
    unlearn_units(m, ids);
    CHECK(m.class_count() == 2);
    const auto report = evaluate(m, make(1, {{{-1.0}, "A"}, {{0.1}, "A"}, {{-0.5}, "A"}}));
    CHECK(report.correct == 0);
  }
}

TEST_CASE("unlearn_classes") {
  CsPnnModel m;
  construct(m, make(1, {{{-1.0}, "A"}, {{0.0}, "B"}, {{1.0}, "C"}, {{0.1}, "B"}, {{-0.4}, "B"}}));
  const auto before = m;

  SUBCASE("no labels") {
    unlearn_classes(m, std::span<const Label>{});
    CHECK(m == before);
  }
  SUBCASE("remove B") {
    const std::vector<Label> drop{"B"};
    unlearn_classes(m, drop);
    CHECK(m.labels() == std::vector<Label>{"A", "C"});
    for (const auto& u : m.hidden()) CHECK(u.subnet < 2);
    CHECK(unit_labels(m) == std::vector<Label>{"A", "C"});
    const auto r = evaluate(m, oracle::blobs(3, 10, 1, 5));
    for (const auto& p : r.predictions) CHECK(p.predicted != "B");
  }
  SUBCASE("unknown label leaves the model unchanged") {
    const std::vector<Label> drop{"A", "Z"};
    CHECK_THROWS_AS(unlearn_classes(m, drop), NotFoundError);
    CHECK(m == before);
  }
  SUBCASE("relearning restores the class count") {
    const auto data = oracle::blobs(4, 15, 3, 9);
    CsPnnModel n;
    construct(n, data);
    const std::vector<Label> drop{"c1", "c3"};
    unlearn_classes(n, drop);
    CHECK(n.class_count() == 2);
    construct(n, filter_classes(data, drop));
    CHECK(n.class_count() == 4);
  }
}

TEST_CASE("evaluate") {
  SUBCASE("own seed sample") {
    CsPnnModel m;
    const auto d = make(3, {{{0.1, 0.2, 0.3}, "A"}});
    construct(m, d);
    CHECK(evaluate(m, d).accuracy() == 100.0);
  }
  SUBCASE("single class") {
    CsPnnModel m;
    construct(m, make(1, {{{0.0}, "A"}, {{0.5}, "A"}}));
    CHECK(evaluate(m, make(1, {{{-3.0}, "A"}, {{9.0}, "A"}})).accuracy() == 100.0);
  }
  SUBCASE("toy model predictions match the brute-force oracle") {
    CsPnnModel m;
    construct(m, make(1, {{{-1.0}, "A"}, {{1.0}, "B"}, {{-0.8}, "A"}}));
    const auto test = make(1, {{{-0.95}, "A"}, {{0.9}, "B"}, {{0.05}, "A"}, {{0.5}, "B"}});
    const auto r = evaluate(m, test);
    const auto n = oracle::from_model(m);
    for (std::size_t i = 0; i < test.size(); ++i) {
      const auto& x = test[i].features;
      const double sigma = oracle::d_max(n, x) / static_cast<double>(n.labels.size());
      CHECK(r.predictions[i].predicted == n.labels[oracle::argmax(oracle::scores(n, x, sigma))]);
    }
    CHECK(r.total == 4);
  }
  SUBCASE("errors") {
    CsPnnModel m;
    CHECK_THROWS_AS(evaluate(m, make(1, {{{0.0}, "A"}})), ModelEmptyError);
    construct(m, make(1, {{{0.0}, "A"}}));
    CHECK_THROWS_AS(evaluate(m, make(2, {{{0.0, 0.0}, "A"}})), ContractError);
  }
}

TEST_CASE("evaluate agrees with the oracle on random networks and never mutates") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 100; ++t) {
    const auto m = oracle::random_model(rng, 15, 4, 6);
    const auto n = oracle::from_model(m);
    LabeledDataset data(m.dimension());
    for (int i = 0; i < 20; ++i) data.add(oracle::random_point(rng, m.dimension()), n.labels[i % n.labels.size()]);
    const auto copy = m;
    const auto r1 = evaluate(m, data);
    const auto r2 = evaluate(m, data);
    CHECK(r1 == r2);
    CHECK(m == copy);

    std::size_t per_class_total = 0;
    for (const auto& [label, tally] : r1.per_class) per_class_total += tally.count;
    CHECK(per_class_total == r1.total);

    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto& x = data[i].features;
      const double sigma = oracle::d_max(n, x) / static_cast<double>(n.labels.size());
      const auto expected = n.labels[oracle::argmax(oracle::scores(n, x, sigma))];
      CHECK((r1.predictions[i].predicted == data[i].label) == (expected == data[i].label));
    }
  }
}
