#include "doctest.h"

#include <cmath>
#include <random>

#include "irp/core.hpp"
#include "test_support.hpp"

using namespace irp;
using irp::test::ex;
using irp::test::vec;

TEST_CASE("split_training is positional") {
  const std::vector<Example> examples{ex(1, 10), ex(2, 20), ex(3, 30)};
  const auto split = split_training(examples, 2);
  REQUIRE(split.l() == 2);
  REQUIRE(split.m() == 1);
  CHECK(split.proper()[0].label == 10);
  CHECK(split.proper()[1].label == 20);
  CHECK(split.calibration()[0].label == 30);
}

TEST_CASE("split_training minimal sizes") {
  const std::vector<Example> examples{ex(1, 10), ex(2, 20)};
  const auto split = split_training(examples, 1);
  CHECK(split.l() == 1);
  CHECK(split.m() == 1);
  CHECK(split.n() == 2);
}

TEST_CASE("split_training rejects l out of range") {
  const std::vector<Example> examples{ex(1, 10), ex(2, 20)};
  CHECK_THROWS_AS(split_training(examples, 2), ArgumentError);
  CHECK_THROWS_AS(split_training(examples, 0), ArgumentError);
  CHECK_THROWS_AS(split_training(std::vector<Example>{}, 1), ArgumentError);
}

TEST_CASE("split_training preserves order and size for random inputs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 40;
    const std::size_t l = 1 + rng() % (n - 1);
    std::vector<Example> examples;
    for (std::size_t i = 0; i < n; ++i) examples.push_back(ex(static_cast<double>(i), static_cast<double>(rng() % 1000)));
    const auto split = split_training(examples, l);
    REQUIRE(split.l() + split.m() == n);
    for (std::size_t i = 0; i < n; ++i) {
      const Example& e = i < l ? split.proper()[i] : split.calibration()[i - l];
      CHECK(e.label == examples[i].label);
      CHECK(e.features(0) == examples[i].features(0));
    }
  }
}

TEST_CASE("Example requires finite values") {
  CHECK_THROWS_AS(Example(vec({1.0, NAN}), 0.0), ArgumentError);
  CHECK_THROWS_AS(Example(vec({1.0}), INFINITY), ArgumentError);
  CHECK_NOTHROW(Example(vec({}), 3.0));
}

TEST_CASE("classification labels are exactly -1 or +1") {
  CHECK(is_classification_label(-1.0));
  CHECK(is_classification_label(1.0));
  CHECK_FALSE(is_classification_label(0.0));
  CHECK_FALSE(is_classification_label(0.999));
  const std::vector<Example> bad{ex(0, 1), ex(0, 2)};
  CHECK_THROWS_AS(require_classification_labels(bad), ArgumentError);
}

TEST_CASE("SummarySequence counts ones") {
  const SummarySequence s({0, 1, 0, 1}, 1);
  CHECK(s.k() == 2);
  CHECK(s.m() == 4);
  CHECK(s.test() == 1);
  CHECK_THROWS_AS(SummarySequence({0, 2}, 0), ArgumentError);
  CHECK_THROWS_AS(SummarySequence({0, 1}, 3), ArgumentError);
  CHECK_THROWS_AS(SummarySequence({}, 0), ArgumentError);

  const auto canonical = SummarySequence::from_counts(5, 3, 0);
  CHECK(canonical.k() == 3);
  CHECK(canonical.calibration() == std::vector<std::uint8_t>{1, 1, 1, 0, 0});
  CHECK_THROWS_AS(SummarySequence::from_counts(2, 3, 0), ArgumentError);
}

TEST_CASE("prediction sets") {
  const Interval interval{-1.0, 2.0};
  CHECK(interval.contains(-1.0));
  CHECK(interval.contains(2.0));
  CHECK_FALSE(interval.contains(2.0000001));
  CHECK(std::get<Interval>(whole_label_space(interval)).is_whole_line());

  const LabelSet plus{false, true};
  CHECK(plus.contains(1.0));
  CHECK_FALSE(plus.contains(-1.0));
  CHECK(std::get<LabelSet>(whole_label_space(plus)).is_full());

  HedgedPrediction h;
  h.set = interval;
  h.incertitude = 0.1;
  CHECK(h.p_value(0.0) == 1.0);
  CHECK(h.p_value(5.0) == 0.1);
}
