#include "doctest.h"

#include <random>
#include <sstream>

#include "irp/io.hpp"

using namespace irp;
using nlohmann::json;

namespace {

CsvTable parse(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in, "mem.csv");
}

}  // namespace

TEST_CASE("read_csv parses a rectangular table") {
  const auto table = parse("x1,x2,y\n1,2,3\n\n-1.5, 2e-3 ,+4\n");
  CHECK(table.header == std::vector<std::string>{"x1", "x2", "y"});
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[1] == std::vector<double>{-1.5, 2e-3, 4.0});
  CHECK(table.line_numbers == std::vector<std::size_t>{2, 4});
}

TEST_CASE("read_csv reports line and column") {
  try {
    parse("a,b\n1,2\n3,oops\n");
    FAIL("expected CsvError");
  } catch (const CsvError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 2);
  }
  try {
    parse("a,b\n1,2,3\n");
    FAIL("expected CsvError");
  } catch (const CsvError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse(""), CsvError);
  CHECK_THROWS_AS(parse("a,b\n1,\n"), CsvError);
  CHECK_THROWS_AS(parse("a,b\n1,inf\n"), CsvError);
  CHECK_THROWS_AS(parse("a,b\n1,nan\n"), CsvError);
  CHECK_THROWS_AS(parse("a,b\n1,+-2\n"), CsvError);
}

TEST_CASE("classification datasets need -1/1 labels") {
  const auto table = parse("x,y\n0.5,1\n0.2,-1\n0.1,0\n");
  CHECK_NOTHROW(to_dataset(table, Task::Regression));
  try {
    to_dataset(table, Task::Classification, "mem.csv");
    FAIL("expected CsvError");
  } catch (const CsvError& e) {
    CHECK(e.line() == 4);
    CHECK(e.column() == 2);
  }
}

TEST_CASE("test rows with and without labels") {
  const auto labelled = to_test_rows(parse("x1,x2,y\n1,2,3\n"), 2, Task::Regression);
  CHECK(labelled.labels == std::vector<double>{3.0});
  const auto bare = to_test_rows(parse("x1,x2\n1,2\n"), 2, Task::Regression);
  CHECK(bare.labels.empty());
  CHECK(bare.features[0](1) == 2.0);
  CHECK_THROWS_AS(to_test_rows(parse("x1\n1\n"), 2, Task::Regression), CsvError);
}

TEST_CASE("round_significant") {
  CHECK(round_significant(0.081920000000000004) == 0.08192);
  CHECK(round_significant(1.0 / 3.0) == 0.333333333333);
  CHECK(round_significant(0.0) == 0.0);
  json j = {{"a", 2.0 / 3.0}, {"b", {1.0 / 7.0, 3}}};
  round_floats(j);
  CHECK(j["a"].get<double>() == 0.666666666667);
  CHECK(j["b"][1].get<int>() == 3);
}

TEST_CASE("JSON round trips preserve every field") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int trial = 0; trial < 200; ++trial) {
    Features x(1 + static_cast<Eigen::Index>(rng() % 5));
    for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = u(rng) * std::pow(10.0, static_cast<int>(rng() % 30) - 15);
    const Example e(x, u(rng));
    const Example back = json(e).get<Example>();
    CHECK(back.features == e.features);
    CHECK(back.label == e.label);

    std::vector<std::uint8_t> bits(1 + rng() % 20);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() % 2);
    const SummarySequence s(bits, static_cast<std::uint8_t>(rng() % 2));
    const auto s_back = summary_sequence_from_json(json(s));
    CHECK(s_back.calibration() == s.calibration());
    CHECK(s_back.test() == s.test());
    CHECK(s_back.k() == s.k());

    HedgedPrediction h;
    if (rng() % 2) {
      const double lo = u(rng);
      h.set = rng() % 5 == 0 ? Interval{} : Interval{lo, lo + std::abs(u(rng))};
    } else {
      h.set = LabelSet{rng() % 2 == 0, rng() % 2 == 0};
    }
    h.incertitude = std::uniform_real_distribution<double>(0, 1)(rng);
    h.k = rng() % 100;
    h.m = h.k + rng() % 100;
    h.degenerate = rng() % 2;
    h.vacuous = rng() % 2;
    const auto h_back = hedged_prediction_from_json(json::parse(json(h).dump()));
    CHECK(h_back.set == h.set);
    CHECK(h_back.incertitude == h.incertitude);
    CHECK(h_back.k == h.k);
    CHECK(h_back.m == h.m);
    CHECK(h_back.degenerate == h.degenerate);
    CHECK(h_back.vacuous == h.vacuous);
  }
}

TEST_CASE("JSON decoding rejects invalid records") {
  CHECK_THROWS_AS(summary_sequence_from_json(json{{"calibration", {0, 2}}, {"test", 1}}), ArgumentError);
  CHECK_THROWS_AS(summary_sequence_from_json(json{{"calibration", {0, 1}}, {"test", 1}, {"k", 2}}),
                  ArgumentError);
  CHECK_THROWS_AS(prediction_set_from_json(json{{"type", "labels"}, {"labels", {0}}}), ArgumentError);
  CHECK_THROWS_AS(prediction_set_from_json(json{{"type", "cone"}}), ArgumentError);
}
