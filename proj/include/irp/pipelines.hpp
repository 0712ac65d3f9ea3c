#ifndef IRP_PIPELINES_HPP
#define IRP_PIPELINES_HPP

#include "irp/core.hpp"
#include "irp/pvalues.hpp"
#include "irp/summaries.hpp"

namespace irp {

enum class Method { Irp, Icp };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

/// A hedged prediction is the whole prediction p-function: 1 on the set, the
/// incertitude elsewhere.
using PredictionPFunction = HedgedPrediction;

/// Example 1 style regression predictor: interval [g(x) - h, g(x) + h] where h
/// is the largest proper-training residual. The calibration sequence only
/// enters through k, the number of calibration residuals exceeding h.
///
/// Fit once, predict many; the fitted pipeline is immutable.
class RegressionPipeline {
 public:
  RegressionPipeline(const DataSplit& split, Method method, const PredictorSpec& predictor = {},
                     const EngineConfig& engine = {});

  HedgedPrediction predict(const Features& x) const;

  const FittedRegressionMeasure& measure() const { return measure_; }
  std::size_t k() const { return k_; }
  std::size_t m() const { return m_; }
  double incertitude() const { return incertitude_; }

 private:
  FittedRegressionMeasure measure_;
  std::size_t k_ = 0;
  std::size_t m_ = 0;
  double incertitude_ = 1.0;
};

/// Margin classifier predictor: {predicted label} outside the margin, the
/// vacuous set {-1, +1} inside it.
class ClassificationPipeline {
 public:
  ClassificationPipeline(const DataSplit& split, Method method,
                         const PredictorSpec& classifier = {PredictorKind::HingeLinear},
                         const EngineConfig& engine = {});

  HedgedPrediction predict(const Features& x) const;

  const FittedMarginMeasure& measure() const { return measure_; }
  std::size_t k() const { return k_; }
  std::size_t m() const { return m_; }
  double incertitude() const { return incertitude_; }

 private:
  FittedMarginMeasure measure_;
  std::size_t k_ = 0;
  std::size_t m_ = 0;
  double incertitude_ = 1.0;
};

HedgedPrediction irp_predict_regression(const DataSplit& split, const Features& test_x,
                                        const EngineConfig& cfg = {},
                                        const PredictorSpec& predictor = {});
HedgedPrediction icp_predict_regression(const DataSplit& split, const Features& test_x,
                                        const PredictorSpec& predictor = {});
HedgedPrediction irp_predict_classification(
    const DataSplit& split, const Features& test_x, const EngineConfig& cfg = {},
    const PredictorSpec& classifier = {PredictorKind::HingeLinear});
HedgedPrediction icp_predict_classification(
    const DataSplit& split, const Features& test_x,
    const PredictorSpec& classifier = {PredictorKind::HingeLinear});

/// {y : f(y) > epsilon}. For a hedged p-function this is the conforming set
/// when incertitude <= epsilon and the whole label space otherwise.
PredictionSet prediction_set(const PredictionPFunction& f, double epsilon);

}  // namespace irp

#endif  // IRP_PIPELINES_HPP
