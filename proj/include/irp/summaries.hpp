#ifndef IRP_SUMMARIES_HPP
#define IRP_SUMMARIES_HPP

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "irp/core.hpp"

namespace irp {

/// Immutable fitted state of a point predictor.
///
/// For regression `predict` is the predicted label; for classification it is a
/// signed margin score whose sign is the predicted class.
class FittedPredictor {
 public:
  virtual ~FittedPredictor() = default;
  virtual double predict(const Features& x) const = 0;
  virtual std::string describe() const = 0;
  /// Nonempty when fitting degenerated to a fallback predictor.
  virtual std::string fallback_reason() const { return {}; }
};

/// A point predictor trained on the proper training sequence only.
class PointPredictor {
 public:
  virtual ~PointPredictor() = default;
  virtual std::shared_ptr<const FittedPredictor> fit(std::span<const Example> examples) const = 0;
};

enum class PredictorKind { LeastSquares, Constant, HingeLinear };

std::string to_string(PredictorKind kind);
PredictorKind predictor_kind_from_string(const std::string& name);

/// Configuration of the reference point predictors.
struct PredictorSpec {
  PredictorKind kind = PredictorKind::LeastSquares;
  double learning_rate = 0.5;
  int epochs = 200;
  double regularization = 1e-3;
  std::uint64_t seed = 0;
};

std::unique_ptr<PointPredictor> make_predictor(const PredictorSpec& spec);

// ---- reference predictors --------------------------------------------------

/// Predicts a fixed value (the mean label when fitted).
class ConstantFit final : public FittedPredictor {
 public:
  explicit ConstantFit(double value, std::string fallback_reason = {})
      : value_(value), reason_(std::move(fallback_reason)) {}
  double predict(const Features&) const override { return value_; }
  std::string describe() const override;
  std::string fallback_reason() const override { return reason_; }
  double value() const { return value_; }

 private:
  double value_;
  std::string reason_;
};

class LinearFit final : public FittedPredictor {
 public:
  LinearFit(Eigen::VectorXd weights, double bias) : weights_(std::move(weights)), bias_(bias) {}
  double predict(const Features& x) const override;
  std::string describe() const override;
  const Eigen::VectorXd& weights() const { return weights_; }
  double bias() const { return bias_; }

 private:
  Eigen::VectorXd weights_;
  double bias_;
};

class MeanPredictor final : public PointPredictor {
 public:
  std::shared_ptr<const FittedPredictor> fit(std::span<const Example> examples) const override;
};

/// Ordinary least squares with intercept. A rank-deficient design falls back
/// to the mean-label constant, reported through `fallback_reason`.
class LeastSquaresPredictor final : public PointPredictor {
 public:
  std::shared_ptr<const FittedPredictor> fit(std::span<const Example> examples) const override;
};

/// Linear classifier minimizing  lambda/2 |w|^2 + mean hinge loss  by full-batch
/// subgradient descent with step  lr / sqrt(t + 1). Weights start from a small
/// seeded Gaussian; the bias starts at 0 and is not regularized. A single-class
/// training set yields a constant score of +-infinity for that class.
class HingeLinearClassifier final : public PointPredictor {
 public:
  explicit HingeLinearClassifier(PredictorSpec spec) : spec_(spec) {}
  std::shared_ptr<const FittedPredictor> fit(std::span<const Example> examples) const override;

 private:
  PredictorSpec spec_;
};

// ---- inductive nonconformity measures ------------------------------------

struct FittedRegressionMeasure {
  std::shared_ptr<const FittedPredictor> predictor;
  double half_width = 0.0;
  bool fallback = false;  // degenerate design, mean-label constant in use
  std::string note;
};

struct FittedMarginMeasure {
  std::shared_ptr<const FittedPredictor> classifier;
  double margin_width = 1.0;
  bool fallback = false;  // single-class proper set, constant classifier in use
  std::string note;

  bool outside_margin(double score) const { return std::abs(score) > margin_width; }
};

FittedRegressionMeasure fit_regression_measure(std::span<const Example> proper,
                                               const PredictorSpec& spec = {});
/// Same, over a caller-supplied predictor.
FittedRegressionMeasure fit_regression_measure(std::span<const Example> proper,
                                               const PointPredictor& predictor);

std::uint8_t score_regression(const FittedRegressionMeasure& measure, const Features& x, double y);

FittedMarginMeasure fit_margin_measure(std::span<const Example> proper,
                                       const PredictorSpec& spec = {PredictorKind::HingeLinear});
FittedMarginMeasure fit_margin_measure(std::span<const Example> proper,
                                       const PointPredictor& classifier, double margin_width = 1.0);

std::uint8_t score_margin(const FittedMarginMeasure& measure, const Features& x, double y);

/// Summaries of the calibration sequence only (the part shared by every test object).
std::vector<std::uint8_t> calibration_summaries(const FittedRegressionMeasure& measure,
                                                std::span<const Example> calibration);
std::vector<std::uint8_t> calibration_summaries(const FittedMarginMeasure& measure,
                                                std::span<const Example> calibration);

SummarySequence summarize(const FittedRegressionMeasure& measure,
                          std::span<const Example> calibration, const Features& test_x,
                          double test_y);
SummarySequence summarize(const FittedMarginMeasure& measure,
                          std::span<const Example> calibration, const Features& test_x,
                          double test_y);

}  // namespace irp

#endif  // IRP_SUMMARIES_HPP
