#include "irp/pipelines.hpp"

#include <algorithm>

namespace irp {

std::string to_string(Method method) { return method == Method::Irp ? "irp" : "icp"; }

Method method_from_string(const std::string& name) {
  if (name == "irp") return Method::Irp;
  if (name == "icp") return Method::Icp;
  throw ArgumentError("unknown method '" + name + "'");
}

namespace {

std::size_t count_ones(const std::vector<std::uint8_t>& bits) {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

// p-value assigned to labels outside the conforming set (test summary 1)
double incertitude_for(Method method, std::size_t m, std::size_t k, const EngineConfig& engine) {
  const auto summaries = SummarySequence::from_counts(m, k, 1);
  return method == Method::Irp ? irp_pvalue(summaries, engine) : icp_pvalue(summaries).value();
}

HedgedPrediction hedge(PredictionSet set, double incertitude, std::size_t k, std::size_t m) {
  HedgedPrediction out;
  out.k = k;
  out.m = m;
  out.incertitude = incertitude;
  if (incertitude >= 1.0) {
    // every label conforms; f(y) = 1 on the whole label space
    out.incertitude = 1.0;
    out.degenerate = true;
    out.set = whole_label_space(set);
  } else {
    out.set = std::move(set);
  }
  return out;
}

}  // namespace

RegressionPipeline::RegressionPipeline(const DataSplit& split, Method method,
                                       const PredictorSpec& predictor,
                                       const EngineConfig& engine)
    : measure_(fit_regression_measure(split.proper(), predictor)),
      k_(count_ones(calibration_summaries(measure_, split.calibration()))),
      m_(split.m()),
      incertitude_(incertitude_for(method, m_, k_, engine)) {}

HedgedPrediction RegressionPipeline::predict(const Features& x) const {
  require_finite(x, "test features");
  const double center = measure_.predictor->predict(x);
  return hedge(Interval{center - measure_.half_width, center + measure_.half_width},
               incertitude_, k_, m_);
}

ClassificationPipeline::ClassificationPipeline(const DataSplit& split, Method method,
                                               const PredictorSpec& classifier,
                                               const EngineConfig& engine)
    : measure_(fit_margin_measure(split.proper(), classifier)),
      k_(count_ones(calibration_summaries(measure_, split.calibration()))),
      m_(split.m()),
      incertitude_(incertitude_for(method, m_, k_, engine)) {}

HedgedPrediction ClassificationPipeline::predict(const Features& x) const {
  require_finite(x, "test features");
  const double score = measure_.classifier->predict(x);
  LabelSet set{true, true};
  const bool outside = measure_.outside_margin(score);
  if (outside) set = score > 0 ? LabelSet{false, true} : LabelSet{true, false};
  auto out = hedge(set, incertitude_, k_, m_);
  out.vacuous = !outside;
  return out;
}

HedgedPrediction irp_predict_regression(const DataSplit& split, const Features& test_x,
                                        const EngineConfig& cfg, const PredictorSpec& predictor) {
  return RegressionPipeline(split, Method::Irp, predictor, cfg).predict(test_x);
}

HedgedPrediction icp_predict_regression(const DataSplit& split, const Features& test_x,
                                        const PredictorSpec& predictor) {
  return RegressionPipeline(split, Method::Icp, predictor).predict(test_x);
}

HedgedPrediction irp_predict_classification(const DataSplit& split, const Features& test_x,
                                            const EngineConfig& cfg,
                                            const PredictorSpec& classifier) {
  return ClassificationPipeline(split, Method::Irp, classifier, cfg).predict(test_x);
}

HedgedPrediction icp_predict_classification(const DataSplit& split, const Features& test_x,
                                            const PredictorSpec& classifier) {
  return ClassificationPipeline(split, Method::Icp, classifier).predict(test_x);
}

PredictionSet prediction_set(const PredictionPFunction& f, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ArgumentError("epsilon must lie in (0, 1)");
  // strict: labels with f(y) = incertitude = epsilon are excluded
  return f.incertitude <= epsilon ? f.set : whole_label_space(f.set);
}

}  // namespace irp
