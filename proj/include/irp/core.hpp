#ifndef IRP_CORE_HPP
#define IRP_CORE_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace irp {

using Features = Eigen::VectorXd;

enum class Task { Regression, Classification };

std::string to_string(Task task);
Task task_from_string(const std::string& name);

/// Thrown on violated preconditions (bad sizes, non-finite inputs, bad labels).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An (object, label) pair. Objects are fixed-length numeric feature vectors.
struct Example {
  Features features;
  double label = 0.0;

  Example() = default;
  Example(Features x, double y);
};

bool is_classification_label(double y);
void require_finite(const Features& x, const char* what);
void require_classification_labels(std::span<const Example> examples);

/// Proper training sequence (first l examples) and calibration sequence (remaining m).
class DataSplit {
 public:
  DataSplit(std::vector<Example> proper, std::vector<Example> calibration);

  const std::vector<Example>& proper() const { return proper_; }
  const std::vector<Example>& calibration() const { return calibration_; }
  std::size_t l() const { return proper_.size(); }
  std::size_t m() const { return calibration_.size(); }
  std::size_t n() const { return l() + m(); }

 private:
  std::vector<Example> proper_;
  std::vector<Example> calibration_;
};

/// Positional split: proper = first l examples, calibration = the rest.
DataSplit split_training(std::span<const Example> examples, std::size_t l);

/// Binary nonconformity summaries of the calibration sequence plus the test summary.
class SummarySequence {
 public:
  SummarySequence(std::vector<std::uint8_t> calibration, std::uint8_t test);

  /// Canonical sequence with the k ones placed first.
  static SummarySequence from_counts(std::size_t m, std::size_t k, std::uint8_t test);

  const std::vector<std::uint8_t>& calibration() const { return calibration_; }
  std::uint8_t test() const { return test_; }
  std::size_t m() const { return calibration_.size(); }
  std::size_t k() const { return k_; }

 private:
  std::vector<std::uint8_t> calibration_;
  std::uint8_t test_;
  std::size_t k_;
};

/// Closed real interval; infinite bounds denote the whole real line.
struct Interval {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  bool contains(double y) const { return lower <= y && y <= upper; }
  bool is_whole_line() const;
  bool operator==(const Interval&) const = default;
};

/// Subset of {-1, +1}.
struct LabelSet {
  bool minus = false;
  bool plus = false;

  bool contains(double y) const { return (y == -1.0 && minus) || (y == 1.0 && plus); }
  bool is_full() const { return minus && plus; }
  bool operator==(const LabelSet&) const = default;
};

using PredictionSet = std::variant<Interval, LabelSet>;

bool set_contains(const PredictionSet& set, double y);
/// The whole label space of the same kind as `like`.
PredictionSet whole_label_space(const PredictionSet& like);

/// Hedged prediction set: the p-function equals 1 on `set` and `incertitude` elsewhere.
struct HedgedPrediction {
  PredictionSet set;
  double incertitude = 1.0;
  std::size_t k = 0;
  std::size_t m = 0;
  bool degenerate = false;  // incertitude == 1, every label conforms
  bool vacuous = false;     // the set is the whole label space by construction

  double p_value(double y) const { return set_contains(set, y) ? 1.0 : incertitude; }
};

}  // namespace irp

#endif  // IRP_CORE_HPP
