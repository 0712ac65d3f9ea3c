#include "irp/core.hpp"

#include <algorithm>
#include <cmath>

namespace irp {

std::string to_string(Task task) {
  return task == Task::Regression ? "regression" : "classification";
}

Task task_from_string(const std::string& name) {
  if (name == "regression") return Task::Regression;
  if (name == "classification") return Task::Classification;
  throw ArgumentError("unknown task '" + name + "'");
}

Example::Example(Features x, double y) : features(std::move(x)), label(y) {
  require_finite(features, "example features");
  if (!std::isfinite(label)) throw ArgumentError("example label must be finite");
}

bool is_classification_label(double y) { return y == -1.0 || y == 1.0; }

void require_finite(const Features& x, const char* what) {
  if (!x.allFinite()) throw ArgumentError(std::string(what) + " must be finite");
}

void require_classification_labels(std::span<const Example> examples) {
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (!is_classification_label(examples[i].label)) {
      throw ArgumentError("classification label at index " + std::to_string(i) +
                          " is not -1 or +1");
    }
  }
}

DataSplit::DataSplit(std::vector<Example> proper, std::vector<Example> calibration)
    : proper_(std::move(proper)), calibration_(std::move(calibration)) {
  if (proper_.empty()) throw ArgumentError("proper training sequence must be nonempty");
  if (calibration_.empty()) throw ArgumentError("calibration sequence must be nonempty");
}

DataSplit split_training(std::span<const Example> examples, std::size_t l) {
  if (l < 1 || l + 1 > examples.size()) {
    throw ArgumentError("split point l=" + std::to_string(l) + " out of range [1, " +
                        std::to_string(examples.size() > 0 ? examples.size() - 1 : 0) + "]");
  }
  return DataSplit({examples.begin(), examples.begin() + static_cast<std::ptrdiff_t>(l)},
                   {examples.begin() + static_cast<std::ptrdiff_t>(l), examples.end()});
}

SummarySequence::SummarySequence(std::vector<std::uint8_t> calibration, std::uint8_t test)
    : calibration_(std::move(calibration)), test_(test), k_(0) {
  if (calibration_.empty()) throw ArgumentError("summary sequence needs m >= 1");
  if (test_ > 1) throw ArgumentError("test summary must be 0 or 1");
  for (auto bit : calibration_) {
    if (bit > 1) throw ArgumentError("calibration summaries must be 0 or 1");
    k_ += bit;
  }
}

SummarySequence SummarySequence::from_counts(std::size_t m, std::size_t k, std::uint8_t test) {
  if (k > m) throw ArgumentError("k must not exceed m");
  std::vector<std::uint8_t> bits(m, 0);
  std::fill_n(bits.begin(), k, std::uint8_t{1});
  return SummarySequence(std::move(bits), test);
}

bool Interval::is_whole_line() const { return std::isinf(lower) && std::isinf(upper); }

bool set_contains(const PredictionSet& set, double y) {
  return std::visit([y](const auto& s) { return s.contains(y); }, set);
}

PredictionSet whole_label_space(const PredictionSet& like) {
  if (std::holds_alternative<Interval>(like)) return Interval{};
  return LabelSet{true, true};
}

}  // namespace irp
