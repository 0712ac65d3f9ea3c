#include "doctest.h"

#include <algorithm>
#include <random>

#include "irp/pipelines.hpp"
#include "test_support.hpp"

using namespace irp;
using irp::test::ex;
using irp::test::linear_data;
using irp::test::vec;

namespace {

DataSplit constant_split(std::size_t m, std::size_t ones) {
  std::vector<Example> proper{ex(0, 0.0), ex(1, 0.0), ex(2, 0.0)};
  std::vector<Example> calibration;
  for (std::size_t i = 0; i < m; ++i) calibration.push_back(ex(0, i < ones ? 1.0 : 0.0));
  return DataSplit(std::move(proper), std::move(calibration));
}

const PredictorSpec kConstant{PredictorKind::Constant};

std::vector<Example> separable(std::size_t per_class, double offset) {
  std::vector<Example> out;
  for (std::size_t i = 0; i < per_class; ++i) {
    const double t = 0.1 * static_cast<double>(i);
    out.push_back(Example(vec({offset + t, t}), 1.0));
    out.push_back(Example(vec({-offset - t, -t}), -1.0));
  }
  return out;
}

}  // namespace

TEST_CASE("regression IRP with k = 0 uses the closed form incertitude") {
  const auto data = linear_data(80, 0.5, 3);
  const auto split = split_training(data, 70);
  const auto measure = fit_regression_measure(split.proper());
  const auto bits = calibration_summaries(measure, split.calibration());
  REQUIRE(std::count(bits.begin(), bits.end(), 1) == 0);

  const auto f = irp_predict_regression(split, vec({0.25}));
  CHECK(f.k == 0);
  CHECK(f.m == 10);
  CHECK(f.incertitude == doctest::Approx(exact_pvalue_k0(10)).epsilon(1e-10));
  CHECK_FALSE(f.degenerate);

  const auto& interval = std::get<Interval>(f.set);
  const double center = measure.predictor->predict(vec({0.25}));
  CHECK(0.5 * (interval.lower + interval.upper) == doctest::Approx(center));
  CHECK(interval.upper - interval.lower == doctest::Approx(2 * measure.half_width));
}

TEST_CASE("regression k = m is degenerate") {
  const auto split = constant_split(6, 6);
  const auto irp = irp_predict_regression(split, vec({0}), {}, kConstant);
  CHECK(irp.k == 6);
  CHECK(irp.incertitude == 1.0);
  CHECK(irp.degenerate);
  CHECK(std::get<Interval>(irp.set).is_whole_line());

  const auto icp = icp_predict_regression(split, vec({0}), kConstant);
  CHECK(icp.degenerate);
  CHECK(icp.set == irp.set);
}

TEST_CASE("regression ICP incertitude is (k + 1) / (m + 1)") {
  CHECK(icp_predict_regression(constant_split(9, 0), vec({0}), kConstant).incertitude ==
        doctest::Approx(0.1));
  const auto f = icp_predict_regression(constant_split(9, 2), vec({0}), kConstant);
  CHECK(f.k == 2);
  CHECK(f.incertitude == doctest::Approx(0.3));
}

TEST_CASE("IRP and ICP share the prediction interval") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto data = linear_data(40, 0.4, seed);
    const auto split = split_training(data, 25);
    for (double x : {-0.8, 0.0, 0.6}) {
      const auto irp = irp_predict_regression(split, vec({x}));
      const auto icp = icp_predict_regression(split, vec({x}));
      CHECK(irp.set == icp.set);
      CHECK(irp.k == icp.k);
      if (irp.k <= 7 && !irp.degenerate) CHECK(irp.incertitude < icp.incertitude);
    }
  }
}

TEST_CASE("the prediction set ignores the calibration sequence") {
  const auto data = linear_data(60, 0.4, 21);
  std::vector<Example> proper(data.begin(), data.begin() + 30);
  std::vector<Example> calibration(data.begin() + 30, data.end());
  const auto reference = irp_predict_regression(DataSplit(proper, calibration), vec({0.1}));

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(calibration.begin(), calibration.end(), rng);
    const auto permuted = irp_predict_regression(DataSplit(proper, calibration), vec({0.1}));
    CHECK(permuted.set == reference.set);
    CHECK(permuted.incertitude == reference.incertitude);

    // a different calibration sample keeps the set but may change k
    const auto fresh = linear_data(15 + trial, 2.0, 100 + trial);
    const auto resampled = irp_predict_regression(DataSplit(proper, fresh), vec({0.1}));
    CHECK(resampled.set == reference.set);
  }
}

TEST_CASE("pipelines fit once and predict many") {
  const auto data = linear_data(50, 0.3, 8);
  const auto split = split_training(data, 40);
  const RegressionPipeline pipeline(split, Method::Irp);
  for (double x : {-0.5, 0.5}) {
    const auto a = pipeline.predict(vec({x}));
    const auto b = irp_predict_regression(split, vec({x}));
    CHECK(a.set == b.set);
    CHECK(a.incertitude == b.incertitude);
  }
}

TEST_CASE("classification IRP outside the margin") {
  const auto proper = separable(10, 2.0);
  const auto calibration = separable(3, 2.5);
  const DataSplit split(proper, calibration);
  const auto f = irp_predict_classification(split, vec({6.0, 0.0}));
  CHECK(f.k == 0);
  CHECK(f.m == 6);
  CHECK(std::get<LabelSet>(f.set) == LabelSet{false, true});
  CHECK_FALSE(f.vacuous);
  CHECK(f.incertitude == doctest::Approx(exact_pvalue_k0(6)).epsilon(1e-10));

  const auto g = irp_predict_classification(split, vec({-6.0, 0.0}));
  CHECK(std::get<LabelSet>(g.set) == LabelSet{true, false});
}

TEST_CASE("classification inside the margin is vacuous") {
  const DataSplit split(separable(10, 2.0), separable(3, 2.5));
  const auto f = irp_predict_classification(split, vec({0.0, 0.0}));
  CHECK(f.vacuous);
  CHECK(std::get<LabelSet>(f.set).is_full());
  CHECK(f.incertitude == doctest::Approx(exact_pvalue_k0(6)).epsilon(1e-10));
}

TEST_CASE("classification k = m is degenerate") {
  // calibration labels are the opposite of what the classifier predicts, far outside the margin
  std::vector<Example> calibration;
  for (const auto& e : separable(2, 5.0)) calibration.push_back(Example(e.features, -e.label));
  const DataSplit split(separable(10, 2.0), calibration);
  const auto f = irp_predict_classification(split, vec({6.0, 0.0}));
  CHECK(f.k == f.m);
  CHECK(f.incertitude == 1.0);
  CHECK(f.degenerate);
  CHECK(std::get<LabelSet>(f.set).is_full());
}

TEST_CASE("classification ICP") {
  const DataSplit split(separable(10, 2.0), separable(3, 2.5));
  const auto f = icp_predict_classification(split, vec({6.0, 0.0}));
  CHECK(f.incertitude == doctest::Approx(1.0 / 7.0));
  CHECK(f.set == irp_predict_classification(split, vec({6.0, 0.0})).set);
}

TEST_CASE("prediction_set at level epsilon") {
  HedgedPrediction f;
  f.set = Interval{0.0, 1.0};
  f.incertitude = 0.01;
  CHECK(std::get<Interval>(prediction_set(f, 0.05)) == Interval{0.0, 1.0});
  f.incertitude = 0.10;
  CHECK(std::get<Interval>(prediction_set(f, 0.05)).is_whole_line());
  f.incertitude = 0.05;
  CHECK(std::get<Interval>(prediction_set(f, 0.05)) == Interval{0.0, 1.0});

  HedgedPrediction g;
  g.set = LabelSet{false, true};
  g.incertitude = 0.2;
  CHECK(std::get<LabelSet>(prediction_set(g, 0.1)).is_full());
  CHECK(std::get<LabelSet>(prediction_set(g, 0.3)) == LabelSet{false, true});

  CHECK_THROWS_AS(prediction_set(f, 0.0), ArgumentError);
  CHECK_THROWS_AS(prediction_set(f, 1.0), ArgumentError);
}

TEST_CASE("method names") {
  CHECK(method_from_string("irp") == Method::Irp);
  CHECK(to_string(Method::Icp) == "icp");
  CHECK_THROWS_AS(method_from_string("full"), ArgumentError);
}
