#include "irp/summaries.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include <Eigen/QR>

namespace irp {

std::string to_string(PredictorKind kind) {
  switch (kind) {
    case PredictorKind::LeastSquares: return "ols";
    case PredictorKind::Constant: return "constant";
    case PredictorKind::HingeLinear: return "hinge";
  }
  return "unknown";
}

PredictorKind predictor_kind_from_string(const std::string& name) {
  if (name == "ols") return PredictorKind::LeastSquares;
  if (name == "constant") return PredictorKind::Constant;
  if (name == "hinge") return PredictorKind::HingeLinear;
  throw ArgumentError("unknown predictor kind '" + name + "'");
}

std::unique_ptr<PointPredictor> make_predictor(const PredictorSpec& spec) {
  switch (spec.kind) {
    case PredictorKind::LeastSquares: return std::make_unique<LeastSquaresPredictor>();
    case PredictorKind::Constant: return std::make_unique<MeanPredictor>();
    case PredictorKind::HingeLinear: return std::make_unique<HingeLinearClassifier>(spec);
  }
  throw ArgumentError("unknown predictor kind");
}

std::string ConstantFit::describe() const {
  std::ostringstream os;
  os << "constant(" << value_ << ")";
  return os.str();
}

double LinearFit::predict(const Features& x) const {
  if (x.size() != weights_.size()) {
    throw ArgumentError("feature dimension " + std::to_string(x.size()) + " does not match " +
                        std::to_string(weights_.size()));
  }
  return weights_.dot(x) + bias_;
}

std::string LinearFit::describe() const {
  std::ostringstream os;
  os << "linear(w=[" << weights_.transpose() << "], b=" << bias_ << ")";
  return os.str();
}

namespace {

Eigen::Index common_dimension(std::span<const Example> examples) {
  const Eigen::Index d = examples.front().features.size();
  for (const auto& e : examples) {
    if (e.features.size() != d) throw ArgumentError("examples have inconsistent feature dimension");
  }
  return d;
}

double mean_label(std::span<const Example> examples) {
  double sum = 0.0;
  for (const auto& e : examples) sum += e.label;
  return sum / static_cast<double>(examples.size());
}

}  // namespace

std::shared_ptr<const FittedPredictor> MeanPredictor::fit(std::span<const Example> examples) const {
  if (examples.empty()) throw ArgumentError("cannot fit on an empty sequence");
  return std::make_shared<ConstantFit>(mean_label(examples));
}

std::shared_ptr<const FittedPredictor> LeastSquaresPredictor::fit(
    std::span<const Example> examples) const {
  if (examples.empty()) throw ArgumentError("cannot fit on an empty sequence");
  const Eigen::Index d = common_dimension(examples);
  const auto l = static_cast<Eigen::Index>(examples.size());

  Eigen::MatrixXd design(l, d + 1);
  Eigen::VectorXd target(l);
  for (Eigen::Index i = 0; i < l; ++i) {
    design.row(i).head(d) = examples[static_cast<std::size_t>(i)].features.transpose();
    design(i, d) = 1.0;
    target(i) = examples[static_cast<std::size_t>(i)].label;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < d + 1) {
    return std::make_shared<ConstantFit>(mean_label(examples), "rank-deficient design matrix");
  }
  const Eigen::VectorXd beta = qr.solve(target);
  return std::make_shared<LinearFit>(beta.head(d), beta(d));
}

std::shared_ptr<const FittedPredictor> HingeLinearClassifier::fit(
    std::span<const Example> examples) const {
  if (examples.empty()) throw ArgumentError("cannot fit on an empty sequence");
  require_classification_labels(examples);
  const Eigen::Index d = common_dimension(examples);

  const bool any_plus = std::any_of(examples.begin(), examples.end(),
                                    [](const Example& e) { return e.label > 0; });
  const bool any_minus = std::any_of(examples.begin(), examples.end(),
                                     [](const Example& e) { return e.label < 0; });
  if (!(any_plus && any_minus)) {
    const double sign = any_plus ? 1.0 : -1.0;
    return std::make_shared<ConstantFit>(sign * std::numeric_limits<double>::infinity(),
                                         "single-class proper training set");
  }

  const auto l = static_cast<Eigen::Index>(examples.size());
  Eigen::MatrixXd x(l, d);
  Eigen::VectorXd y(l);
  for (Eigen::Index i = 0; i < l; ++i) {
    x.row(i) = examples[static_cast<std::size_t>(i)].features.transpose();
    y(i) = examples[static_cast<std::size_t>(i)].label;
  }

  std::mt19937_64 rng(spec_.seed);
  std::normal_distribution<double> init(0.0, 0.01);
  Eigen::VectorXd w(d);
  for (Eigen::Index j = 0; j < d; ++j) w(j) = init(rng);
  double b = 0.0;

  const double inv_l = 1.0 / static_cast<double>(l);
  for (int t = 0; t < spec_.epochs; ++t) {
    const Eigen::ArrayXd margins = y.array() * ((x * w).array() + b);
    // y_i on the examples with nonzero hinge loss, 0 elsewhere
    const Eigen::VectorXd weighted = (margins < 1.0).select(y.array(), 0.0).matrix();
    const Eigen::VectorXd grad_w = spec_.regularization * w - inv_l * (x.transpose() * weighted);
    const double grad_b = -inv_l * weighted.sum();
    const double step = spec_.learning_rate / std::sqrt(static_cast<double>(t) + 1.0);
    w -= step * grad_w;
    b -= step * grad_b;
  }
  return std::make_shared<LinearFit>(std::move(w), b);
}

// ---- measures ----------------------------------------------------------------

FittedRegressionMeasure fit_regression_measure(std::span<const Example> proper,
                                               const PredictorSpec& spec) {
  return fit_regression_measure(proper, *make_predictor(spec));
}

FittedRegressionMeasure fit_regression_measure(std::span<const Example> proper,
                                               const PointPredictor& predictor) {
  if (proper.empty()) throw ArgumentError("proper training sequence must be nonempty");
  FittedRegressionMeasure measure;
  measure.predictor = predictor.fit(proper);
  measure.note = measure.predictor->fallback_reason();
  measure.fallback = !measure.note.empty();
  for (const auto& e : proper) {
    measure.half_width =
        std::max(measure.half_width, std::abs(e.label - measure.predictor->predict(e.features)));
  }
  return measure;
}

std::uint8_t score_regression(const FittedRegressionMeasure& measure, const Features& x,
                              double y) {
  require_finite(x, "features");
  if (!std::isfinite(y)) throw ArgumentError("label must be finite");
  // Strict: a residual equal to the half-width conforms.
  return std::abs(y - measure.predictor->predict(x)) > measure.half_width ? 1 : 0;
}

FittedMarginMeasure fit_margin_measure(std::span<const Example> proper,
                                       const PredictorSpec& spec) {
  return fit_margin_measure(proper, *make_predictor(spec));
}

FittedMarginMeasure fit_margin_measure(std::span<const Example> proper,
                                       const PointPredictor& classifier, double margin_width) {
  if (proper.empty()) throw ArgumentError("proper training sequence must be nonempty");
  if (!(margin_width > 0.0)) throw ArgumentError("margin width must be positive");
  require_classification_labels(proper);
  FittedMarginMeasure measure;
  measure.classifier = classifier.fit(proper);
  measure.margin_width = margin_width;
  measure.note = measure.classifier->fallback_reason();
  measure.fallback = !measure.note.empty();
  return measure;
}

std::uint8_t score_margin(const FittedMarginMeasure& measure, const Features& x, double y) {
  require_finite(x, "features");
  if (!is_classification_label(y)) throw ArgumentError("classification label must be -1 or +1");
  const double score = measure.classifier->predict(x);
  const bool misclassified = (score > 0 && y < 0) || (score < 0 && y > 0);
  return misclassified && measure.outside_margin(score) ? 1 : 0;
}

namespace {

template <typename Measure, typename Score>
std::vector<std::uint8_t> summaries_of(const Measure& measure, std::span<const Example> calibration,
                                       Score score) {
  std::vector<std::uint8_t> bits;
  bits.reserve(calibration.size());
  for (const auto& e : calibration) bits.push_back(score(measure, e.features, e.label));
  return bits;
}

}  // namespace

std::vector<std::uint8_t> calibration_summaries(const FittedRegressionMeasure& measure,
                                                std::span<const Example> calibration) {
  return summaries_of(measure, calibration, score_regression);
}

std::vector<std::uint8_t> calibration_summaries(const FittedMarginMeasure& measure,
                                                std::span<const Example> calibration) {
  return summaries_of(measure, calibration, score_margin);
}

SummarySequence summarize(const FittedRegressionMeasure& measure,
                          std::span<const Example> calibration, const Features& test_x,
                          double test_y) {
  return SummarySequence(calibration_summaries(measure, calibration),
                         score_regression(measure, test_x, test_y));
}

SummarySequence summarize(const FittedMarginMeasure& measure,
                          std::span<const Example> calibration, const Features& test_x,
                          double test_y) {
  return SummarySequence(calibration_summaries(measure, calibration),
                         score_margin(measure, test_x, test_y));
}

}  // namespace irp
