#ifndef IRP_IO_HPP
#define IRP_IO_HPP

#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "irp/core.hpp"
#include "irp/validity.hpp"

namespace irp {

inline constexpr int kJsonSchemaVersion = 1;
inline constexpr int kPrintedDigits = 12;

/// Malformed CSV input; `line` and `column` are 1-based, 0 when not applicable.
class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& source, std::size_t line, std::size_t column,
           const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Header plus a rectangular block of finite numbers.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> line_numbers;  // physical line of each row
};

CsvTable read_csv(std::istream& in, const std::string& source = "<input>");
CsvTable read_csv_file(const std::filesystem::path& path);

/// Labelled dataset: d feature columns then the label column.
struct CsvDataset {
  std::vector<std::string> feature_names;
  std::string label_name;
  std::vector<Example> examples;
};

CsvDataset to_dataset(const CsvTable& table, Task task, const std::string& source = "<input>");

/// Test rows: either d feature columns or d features plus a label column.
struct TestRows {
  std::vector<Features> features;
  std::vector<double> labels;  // empty when the file has no label column
};

TestRows to_test_rows(const CsvTable& table, std::size_t dimension, Task task,
                      const std::string& source = "<input>");

/// Rounds every floating-point number in `j` to `digits` significant digits.
void round_floats(nlohmann::json& j, int digits = kPrintedDigits);
double round_significant(double x, int digits = kPrintedDigits);

void to_json(nlohmann::json& j, const Example& e);
void from_json(const nlohmann::json& j, Example& e);
void to_json(nlohmann::json& j, const SummarySequence& s);
SummarySequence summary_sequence_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const PredictionSet& s);
PredictionSet prediction_set_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const HedgedPrediction& h);
HedgedPrediction hedged_prediction_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const ValidityReport& r);
void to_json(nlohmann::json& j, const TableRow& row);
void to_json(nlohmann::json& j, const DominanceResult& d);

}  // namespace irp

#endif  // IRP_IO_HPP
