#include "irp/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace irp {

using nlohmann::json;

CsvError::CsvError(const std::string& source, std::size_t line, std::size_t column,
                   const std::string& message)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << source;
        if (line > 0) os << ": line " << line;
        if (column > 0) os << ", column " << column;
        os << ": " << message;
        return os.str();
      }()),
      line_(line),
      column_(column) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

CsvTable read_csv(std::istream& in, const std::string& source) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (!have_header) {
      for (std::size_t c = 0; c < fields.size(); ++c) {
        if (fields[c].empty()) throw CsvError(source, line_no, c + 1, "empty column name");
        table.header.emplace_back(fields[c]);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw CsvError(source, line_no, 0,
                     "expected " + std::to_string(table.header.size()) + " fields, found " +
                         std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      auto field = fields[c];
      if (field.size() > 1 && field[0] == '+' && field[1] != '-') field.remove_prefix(1);
      const auto* end = field.data() + field.size();
      auto [ptr, ec] = std::from_chars(field.data(), end, row[c]);
      if (field.empty() || ec != std::errc{} || ptr != end) {
        throw CsvError(source, line_no, c + 1,
                       "'" + std::string(fields[c]) + "' is not a decimal number (" +
                           table.header[c] + ")");
      }
      if (!std::isfinite(row[c])) {
        throw CsvError(source, line_no, c + 1, "value must be finite (" + table.header[c] + ")");
      }
    }
    table.rows.push_back(std::move(row));
    table.line_numbers.push_back(line_no);
  }
  if (!have_header) throw CsvError(source, 0, 0, "missing header row");
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CsvError(path.string(), 0, 0, "cannot open file");
  return read_csv(in, path.string());
}

namespace {

Features row_features(const std::vector<double>& row, std::size_t d) {
  Features x(static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < d; ++j) x(static_cast<Eigen::Index>(j)) = row[j];
  return x;
}

void check_label(double y, Task task, const std::string& source, std::size_t line,
                 std::size_t column) {
  if (task == Task::Classification && !is_classification_label(y)) {
    throw CsvError(source, line, column, "classification label must be -1 or 1");
  }
}

}  // namespace

CsvDataset to_dataset(const CsvTable& table, Task task, const std::string& source) {
  if (table.header.empty()) throw CsvError(source, 1, 0, "need at least a label column");
  const std::size_t d = table.header.size() - 1;
  CsvDataset out;
  out.feature_names.assign(table.header.begin(), table.header.end() - 1);
  out.label_name = table.header.back();
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const double y = table.rows[r][d];
    check_label(y, task, source, table.line_numbers[r], d + 1);
    out.examples.emplace_back(row_features(table.rows[r], d), y);
  }
  return out;
}

TestRows to_test_rows(const CsvTable& table, std::size_t dimension, Task task,
                      const std::string& source) {
  const std::size_t columns = table.header.size();
  if (columns != dimension && columns != dimension + 1) {
    throw CsvError(source, 1, 0,
                   "expected " + std::to_string(dimension) + " feature columns (optionally " +
                       "followed by a label), found " + std::to_string(columns) + " columns");
  }
  const bool labelled = columns == dimension + 1;
  TestRows out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out.features.push_back(row_features(table.rows[r], dimension));
    if (labelled) {
      check_label(table.rows[r][dimension], task, source, table.line_numbers[r], dimension + 1);
      out.labels.push_back(table.rows[r][dimension]);
    }
  }
  return out;
}

double round_significant(double x, int digits) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*g", digits, x);
  return std::strtod(buffer, nullptr);
}

void round_floats(json& j, int digits) {
  if (j.is_number_float()) {
    j = round_significant(j.get<double>(), digits);
  } else if (j.is_structured()) {
    for (auto& element : j) round_floats(element, digits);
  }
}

namespace {

json bound_to_json(double x) { return std::isinf(x) ? json(nullptr) : json(x); }

double bound_from_json(const json& j, double infinite) {
  return j.is_null() ? infinite : j.get<double>();
}

json features_to_json(const Features& x) {
  return json(std::vector<double>(x.data(), x.data() + x.size()));
}

}  // namespace

void to_json(json& j, const Example& e) {
  j = json{{"features", features_to_json(e.features)}, {"label", e.label}};
}

void from_json(const json& j, Example& e) {
  const auto values = j.at("features").get<std::vector<double>>();
  e = Example(Eigen::Map<const Features>(values.data(), static_cast<Eigen::Index>(values.size())),
              j.at("label").get<double>());
}

void to_json(json& j, const SummarySequence& s) {
  std::vector<int> bits(s.calibration().begin(), s.calibration().end());
  j = json{{"calibration", bits}, {"test", s.test()}, {"k", s.k()}, {"m", s.m()}};
}

SummarySequence summary_sequence_from_json(const json& j) {
  const auto bits = j.at("calibration").get<std::vector<int>>();
  std::vector<std::uint8_t> calibration;
  for (int b : bits) {
    if (b != 0 && b != 1) throw ArgumentError("summary bits must be 0 or 1");
    calibration.push_back(static_cast<std::uint8_t>(b));
  }
  const int test = j.at("test").get<int>();
  if (test != 0 && test != 1) throw ArgumentError("summary bits must be 0 or 1");
  SummarySequence s(std::move(calibration), static_cast<std::uint8_t>(test));
  if (j.contains("k") && j.at("k").get<std::size_t>() != s.k()) {
    throw ArgumentError("stored k does not match the summary bits");
  }
  return s;
}

void to_json(json& j, const PredictionSet& s) {
  if (const auto* interval = std::get_if<Interval>(&s)) {
    j = json{{"type", "interval"},
             {"lower", bound_to_json(interval->lower)},
             {"upper", bound_to_json(interval->upper)}};
  } else {
    const auto& labels = std::get<LabelSet>(s);
    json members = json::array();
    if (labels.minus) members.push_back(-1);
    if (labels.plus) members.push_back(1);
    j = json{{"type", "labels"}, {"labels", members}};
  }
}

PredictionSet prediction_set_from_json(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "interval") {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return Interval{bound_from_json(j.at("lower"), -inf), bound_from_json(j.at("upper"), inf)};
  }
  if (type != "labels") throw ArgumentError("unknown prediction set type '" + type + "'");
  LabelSet labels;
  for (const auto& y : j.at("labels")) {
    const int v = y.get<int>();
    if (v == -1) {
      labels.minus = true;
    } else if (v == 1) {
      labels.plus = true;
    } else {
      throw ArgumentError("label set members must be -1 or 1");
    }
  }
  return labels;
}

void to_json(json& j, const HedgedPrediction& h) {
  j = json{{"set", h.set},     {"incertitude", h.incertitude}, {"k", h.k},
           {"m", h.m},         {"degenerate", h.degenerate},   {"vacuous", h.vacuous}};
}

HedgedPrediction hedged_prediction_from_json(const json& j) {
  HedgedPrediction h;
  h.set = prediction_set_from_json(j.at("set"));
  h.incertitude = j.at("incertitude").get<double>();
  h.k = j.at("k").get<std::size_t>();
  h.m = j.at("m").get<std::size_t>();
  h.degenerate = j.at("degenerate").get<bool>();
  h.vacuous = j.at("vacuous").get<bool>();
  return h;
}

void to_json(json& j, const ValidityReport& r) {
  json cells = json::array();
  for (const auto& c : r.cells) {
    json cell{{"pvariable", c.pvariable}, {"m", c.m},         {"epsilon", c.epsilon},
              {"probability", c.probability}, {"allowed", c.allowed}, {"pass", c.pass}};
    if (c.standard_error) cell["standard_error"] = *c.standard_error;
    if (c.seed) cell["seed"] = *c.seed;
    if (c.trials) cell["trials"] = *c.trials;
    cells.push_back(std::move(cell));
  }
  j = json{{"mode", r.mode}, {"pass", r.pass()}, {"cells", std::move(cells)}};
  if (r.identity_violations) j["identity_violations"] = *r.identity_violations;
}

void to_json(json& j, const TableRow& row) {
  j = json{{"k", row.k},     {"c_star", row.c_star}, {"irp", row.a_k},
           {"icp", row.icp}, {"ratio", row.ratio},   {"irp_exact", row.a_k_exact}};
}

void to_json(json& j, const DominanceResult& d) {
  j = json{{"verdict", to_string(d.verdict)}};
  if (d.witness) {
    j["witness"] = json{{"calibration", d.witness->calibration},
                        {"test", d.witness->test},
                        {"p1", d.witness->p1},
                        {"p2", d.witness->p2}};
  }
}

}  // namespace irp
