#include "irp/cli.hpp"

#include <cstdio>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"

#include "irp/io.hpp"
#include "irp/pipelines.hpp"
#include "irp/pvalues.hpp"
#include "irp/validity.hpp"

namespace irp::cli {

using nlohmann::json;

namespace {

std::string num(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*g", kPrintedDigits, x);
  return buffer;
}

std::string fixed3(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.3f", x);
  return buffer;
}

void emit_json(std::ostream& out, const std::string& command, json body) {
  body["schema_version"] = kJsonSchemaVersion;
  body["command"] = command;
  round_floats(body);
  out << body.dump(2) << '\n';
}

std::string describe_set(const PredictionSet& set) {
  if (const auto* interval = std::get_if<Interval>(&set)) {
    if (interval->is_whole_line()) return "(-inf, inf)";
    return "[" + num(interval->lower) + ", " + num(interval->upper) + "]";
  }
  const auto& labels = std::get<LabelSet>(set);
  std::string s = "{";
  if (labels.minus) s += "-1";
  if (labels.minus && labels.plus) s += ",";
  if (labels.plus) s += "1";
  return s + "}";
}

// ---- table ---------------------------------------------------------------------

struct TableOptions {
  int k_max = 7;
  std::string format = "text";
  bool json = false;
};

int run_table(const TableOptions& opt, std::ostream& out) {
  const auto rows = reproduce_table_k(static_cast<std::size_t>(opt.k_max));
  if (opt.json || opt.format == "json") {
    emit_json(out, "table", json{{"rows", rows}});
    return kExitSuccess;
  }
  std::ostringstream k_line, irp_line, icp_line, ratio_line;
  k_line << std::left << std::setw(7) << "k";
  irp_line << std::left << std::setw(7) << "IRP";
  icp_line << std::left << std::setw(7) << "ICP";
  ratio_line << std::left << std::setw(7) << "ratio";
  for (const auto& row : rows) {
    k_line << std::setw(8) << row.k;
    irp_line << std::setw(8) << fixed3(row.a_k);
    icp_line << std::setw(8) << row.icp;
    ratio_line << std::setw(8) << fixed3(row.ratio);
  }
  out << k_line.str() << '\n' << irp_line.str() << '\n' << icp_line.str() << '\n'
      << ratio_line.str() << '\n';
  return kExitSuccess;
}

// ---- pvalue --------------------------------------------------------------------

struct PValueOptions {
  std::size_t m = 0;
  std::size_t k = 0;
  bool finite = false;
  bool asymptotic = false;
  bool json = false;
};

int run_pvalue(const PValueOptions& opt, std::ostream& out) {
  if (opt.k > opt.m) throw ArgumentError("--k must not exceed --m");
  if (opt.asymptotic) {
    const auto constant = asymptotic_constant(opt.k);
    const double value = constant.a_k / static_cast<double>(opt.m);
    if (opt.json) {
      emit_json(out, "pvalue",
                json{{"mode", "asymptotic"}, {"m", opt.m}, {"k", opt.k},
                     {"c_star", constant.c_star}, {"a_k", constant.a_k}, {"irp", value},
                     {"icp", static_cast<double>(opt.k + 1) / static_cast<double>(opt.m)}});
    } else {
      out << "m " << opt.m << ", k " << opt.k << " (asymptotic)\n"
          << "c_star  " << num(constant.c_star) << '\n'
          << "a_k     " << num(constant.a_k) << '\n'
          << "irp     " << num(value) << '\n'
          << "icp     " << num(static_cast<double>(opt.k + 1) / static_cast<double>(opt.m)) << '\n';
    }
    return kExitSuccess;
  }

  const double irp = binary_irp_pvalue(opt.m, opt.k);
  const Rational icp{opt.k + 1, opt.m + 1};
  const bool degenerate = opt.k == opt.m;
  if (opt.json) {
    emit_json(out, "pvalue",
              json{{"mode", "finite"},
                   {"m", opt.m},
                   {"k", opt.k},
                   {"irp", irp},
                   {"icp", icp.value()},
                   {"icp_rational", {icp.numerator, icp.denominator}},
                   {"ratio", irp / icp.value()},
                   {"degenerate", degenerate}});
  } else {
    out << "m " << opt.m << ", k " << opt.k << (degenerate ? " (degenerate)" : "") << '\n'
        << "irp     " << num(irp) << '\n'
        << "icp     " << num(icp.value()) << " (" << icp.numerator << "/" << icp.denominator
        << ")\n"
        << "ratio   " << num(irp / icp.value()) << '\n';
  }
  return kExitSuccess;
}

// ---- predict --------------------------------------------------------------------

struct PredictOptions {
  std::string train;
  std::string test;
  std::size_t split_at = 0;
  std::string task = "regression";
  std::string method = "irp";
  std::string predictor;
  double epsilon = 0.05;
  std::uint64_t seed = 0;
  int epochs = 200;
  double learning_rate = 0.5;
  double regularization = 1e-3;
  int grid_points = 4096;
  bool json = false;
};

template <typename Pipeline>
int emit_predictions(const PredictOptions& opt, Task task, const Pipeline& pipeline,
                     const TestRows& rows, json meta, std::ostream& out) {
  json records = json::array();
  std::ostringstream text;
  for (std::size_t r = 0; r < rows.features.size(); ++r) {
    const HedgedPrediction f = pipeline.predict(rows.features[r]);
    const PredictionSet gamma = prediction_set(f, opt.epsilon);
    json record = f;
    record["row"] = r + 1;
    record["prediction_set"] = gamma;
    text << "row " << r + 1 << ": set " << describe_set(f.set) << " incertitude "
         << num(f.incertitude) << " k " << f.k << " m " << f.m << " gamma " << describe_set(gamma);
    if (f.degenerate) text << " degenerate";
    if (f.vacuous) text << " vacuous";
    if (!rows.labels.empty()) {
      const bool covered = set_contains(gamma, rows.labels[r]);
      record["label"] = rows.labels[r];
      record["covered"] = covered;
      text << " label " << num(rows.labels[r]) << (covered ? " covered" : " excluded");
    }
    text << '\n';
    records.push_back(std::move(record));
  }
  if (opt.json) {
    meta["task"] = to_string(task);
    meta["method"] = opt.method;
    meta["epsilon"] = opt.epsilon;
    meta["predictions"] = std::move(records);
    emit_json(out, "predict", std::move(meta));
  } else {
    round_floats(meta);
    for (const auto& [key, value] : meta.items()) {
      out << "# " << key << ": " << (value.is_string() ? value.template get<std::string>() : value.dump())
          << '\n';
    }
    out << text.str();
  }
  return kExitSuccess;
}

int run_predict(const PredictOptions& opt, std::ostream& out) {
  const Task task = task_from_string(opt.task);
  const Method method = method_from_string(opt.method);
  if (!(opt.epsilon > 0.0 && opt.epsilon < 1.0)) throw ArgumentError("--epsilon must lie in (0, 1)");

  const auto train = to_dataset(read_csv_file(opt.train), task, opt.train);
  const auto split = split_training(train.examples, opt.split_at);
  const auto test = to_test_rows(read_csv_file(opt.test), train.feature_names.size(), task, opt.test);

  PredictorSpec spec;
  spec.kind = opt.predictor.empty()
                  ? (task == Task::Regression ? PredictorKind::LeastSquares : PredictorKind::HingeLinear)
                  : predictor_kind_from_string(opt.predictor);
  spec.epochs = opt.epochs;
  spec.learning_rate = opt.learning_rate;
  spec.regularization = opt.regularization;
  spec.seed = opt.seed;
  EngineConfig engine;
  engine.grid_points = opt.grid_points;

  json meta{{"l", split.l()}, {"m", split.m()}, {"predictor", to_string(spec.kind)}};
  if (task == Task::Regression) {
    const RegressionPipeline pipeline(split, method, spec, engine);
    meta["k"] = pipeline.k();
    meta["half_width"] = pipeline.measure().half_width;
    meta["model"] = pipeline.measure().predictor->describe();
    if (pipeline.measure().fallback) meta["fallback"] = pipeline.measure().note;
    return emit_predictions(opt, task, pipeline, test, std::move(meta), out);
  }
  const ClassificationPipeline pipeline(split, method, spec, engine);
  meta["k"] = pipeline.k();
  meta["margin_width"] = pipeline.measure().margin_width;
  meta["model"] = pipeline.measure().classifier->describe();
  if (pipeline.measure().fallback) meta["fallback"] = pipeline.measure().note;
  return emit_predictions(opt, task, pipeline, test, std::move(meta), out);
}

// ---- validate -------------------------------------------------------------------

struct ValidateOptions {
  std::string mode = "exact";
  std::size_t m = 10;
  std::size_t trials = 10000;
  double epsilon = 0.05;
  std::uint64_t seed = 42;
  std::size_t proper_size = 100;
  std::size_t dimension = 2;
  double noise = 0.5;
  std::string method = "irp";
  unsigned threads = 0;
  bool json = false;
};

void print_report(const ValidityReport& report, std::ostream& out) {
  for (const auto& c : report.cells) {
    out << (c.pass ? "PASS " : "FAIL ") << c.pvariable << " m=" << c.m << " eps=" << num(c.epsilon)
        << " prob=" << num(c.probability);
    if (c.standard_error) out << " se=" << num(*c.standard_error);
    out << " allowed=" << num(c.allowed);
    if (c.trials) out << " trials=" << *c.trials << " seed=" << *c.seed;
    out << '\n';
  }
  if (report.identity_violations) {
    out << "irp/icp prediction set mismatches: " << *report.identity_violations << '\n';
  }
  out << (report.pass() ? "all cells pass" : "validation FAILED") << '\n';
}

int run_validate(const ValidateOptions& opt, std::ostream& out) {
  ValidityReport report;
  if (opt.mode == "exact") {
    if (opt.m < 1 || opt.m > kMaxExactM) {
      throw ArgumentError("exact mode needs 1 <= --m <= " + std::to_string(kMaxExactM));
    }
    report.mode = "exact";
    for (const auto& [name, pvariable] : shipped_pvariables()) {
      auto audit = audit_pvariable(pvariable, opt.m, name);
      report.cells.insert(report.cells.end(), audit.cells.begin(), audit.cells.end());
    }
  } else {
    if (opt.m < 1) throw ArgumentError("--m must be positive");
    PipelineSpec pipeline;
    pipeline.kind = method_from_string(opt.method) == Method::Irp ? PipelineKind::Irp : PipelineKind::Icp;
    pipeline.compare_with_icp = pipeline.kind == PipelineKind::Irp;
    GeneratorSpec generator;
    generator.dimension = opt.dimension;
    generator.proper_size = opt.proper_size;
    generator.calibration_size = opt.m;
    generator.noise = opt.noise;
    report = monte_carlo_coverage(pipeline, generator, opt.epsilon, opt.trials, opt.seed, opt.threads);
  }
  if (opt.json) {
    emit_json(out, "validate", json(report));
  } else {
    print_report(report, out);
  }
  return report.pass() ? kExitSuccess : kExitFailure;
}

// ---- dominate -------------------------------------------------------------------

struct DominateOptions {
  std::size_t m = 0;
  double threshold = 0.5;
  bool json = false;
};

int run_dominate(const DominateOptions& opt, std::ostream& out) {
  const auto result =
      check_dominance(dominating_pvariable(opt.threshold), icp_pvariable(), opt.m);
  if (opt.json) {
    emit_json(out, "dominate", json{{"m", opt.m}, {"threshold", opt.threshold}, {"result", result}});
  } else {
    out << "verdict " << to_string(result.verdict) << '\n';
    if (result.witness) {
      out << "witness calibration [";
      for (std::size_t i = 0; i < result.witness->calibration.size(); ++i) {
        out << (i ? ", " : "") << num(result.witness->calibration[i]);
      }
      out << "] test " << num(result.witness->test) << '\n'
          << "dominating " << num(result.witness->p1) << '\n'
          << "icp        " << num(result.witness->p2) << '\n';
    }
  }
  return result.verdict == Dominance::Strict ? kExitSuccess : kExitFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inductive randomness and conformal predictors over binary summaries"};
  app.set_config("--config", "", "Optional config file (same keys as flags; flags win)");
  app.require_subcommand(1);

  TableOptions table;
  auto* table_cmd = app.add_subcommand("table", "Asymptotic incertitude numerators, IRP vs ICP");
  table_cmd->add_option("--k-max", table.k_max, "Largest k")->check(CLI::Range(0, 64));
  table_cmd->add_option("--format", table.format, "Output format")
      ->check(CLI::IsMember({"text", "json"}));
  table_cmd->add_flag("--json", table.json, "Same as --format json");

  PValueOptions pvalue;
  auto* pvalue_cmd = app.add_subcommand("pvalue", "Binary IRP p-value for k ones among m");
  pvalue_cmd->add_option("--m", pvalue.m, "Calibration size")->required()->check(CLI::PositiveNumber);
  pvalue_cmd->add_option("--k", pvalue.k, "Calibration ones")->required()->check(CLI::NonNegativeNumber);
  auto* finite_flag = pvalue_cmd->add_flag("--finite", pvalue.finite, "Exact p-value (default)");
  pvalue_cmd->add_flag("--asymptotic", pvalue.asymptotic, "a_k / m")->excludes(finite_flag);
  pvalue_cmd->add_flag("--json", pvalue.json);

  PredictOptions predict;
  auto* predict_cmd = app.add_subcommand("predict", "Hedged predictions for the rows of a test CSV");
  predict_cmd->add_option("--train", predict.train, "Training CSV")->required();
  predict_cmd->add_option("--split-at", predict.split_at, "Proper training size l")->required();
  predict_cmd->add_option("--test", predict.test, "Test CSV")->required();
  predict_cmd->add_option("--task", predict.task)->check(CLI::IsMember({"regression", "classification"}));
  predict_cmd->add_option("--method", predict.method)->check(CLI::IsMember({"irp", "icp"}));
  predict_cmd->add_option("--predictor", predict.predictor, "ols, constant or hinge")
      ->check(CLI::IsMember({"ols", "constant", "hinge"}));
  predict_cmd->add_option("--epsilon", predict.epsilon, "Significance level");
  predict_cmd->add_option("--seed", predict.seed, "Classifier initialization seed");
  predict_cmd->add_option("--epochs", predict.epochs)->check(CLI::NonNegativeNumber);
  predict_cmd->add_option("--learning-rate", predict.learning_rate)->check(CLI::PositiveNumber);
  predict_cmd->add_option("--regularization", predict.regularization)->check(CLI::NonNegativeNumber);
  predict_cmd->add_option("--grid-points", predict.grid_points)->check(CLI::Range(64, 1 << 24));
  predict_cmd->add_flag("--json", predict.json);

  ValidateOptions validate;
  auto* validate_cmd = app.add_subcommand("validate", "Exact p-variable audit or Monte Carlo coverage");
  validate_cmd->add_option("--mode", validate.mode)->check(CLI::IsMember({"exact", "mc"}));
  validate_cmd->add_option("--m", validate.m, "Calibration size");
  validate_cmd->add_option("--trials", validate.trials)->check(CLI::PositiveNumber);
  validate_cmd->add_option("--epsilon", validate.epsilon)->check(CLI::Range(0.0, 1.0));
  validate_cmd->add_option("--seed", validate.seed);
  validate_cmd->add_option("--proper-size", validate.proper_size)->check(CLI::PositiveNumber);
  validate_cmd->add_option("--dim", validate.dimension);
  validate_cmd->add_option("--noise", validate.noise)->check(CLI::NonNegativeNumber);
  validate_cmd->add_option("--method", validate.method)->check(CLI::IsMember({"irp", "icp"}));
  validate_cmd->add_option("--threads", validate.threads, "0 = hardware concurrency");
  validate_cmd->add_flag("--json", validate.json);

  DominateOptions dominate;
  auto* dominate_cmd = app.add_subcommand("dominate", "Check that the dominating p-variable beats the ICP");
  dominate_cmd->add_option("--m", dominate.m, "Calibration size")->required()->check(CLI::Range(std::size_t{1}, kMaxExactM));
  dominate_cmd->add_option("--threshold", dominate.threshold, "Threshold a");
  dominate_cmd->add_flag("--json", dominate.json);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (table_cmd->parsed()) return run_table(table, out);
    if (pvalue_cmd->parsed()) return run_pvalue(pvalue, out);
    if (predict_cmd->parsed()) return run_predict(predict, out);
    if (validate_cmd->parsed()) return run_validate(validate, out);
    if (dominate_cmd->parsed()) return run_dominate(dominate, out);
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CsvError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace irp::cli
