#include "irp/validity.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

namespace irp {

namespace {

// weight[j][t]: total multiplicity of member outcomes with j calibration ones
// and test bit t. The probability of the event is a polynomial in p.
using ClassWeights = std::vector<std::array<double, 2>>;

double event_probability(const ClassWeights& weight, double p) {
  const auto m = weight.size() - 1;
  double total = 0.0;
  for (std::size_t j = 0; j <= m; ++j) {
    for (std::size_t t = 0; t < 2; ++t) {
      if (weight[j][t] == 0.0) continue;
      const auto ones = static_cast<double>(j + t);
      const auto zeros = static_cast<double>(m + 1 - j - t);
      total += weight[j][t] * std::pow(p, ones) * std::pow(1.0 - p, zeros);
    }
  }
  return total;
}

// Independent of the engine's maximizer: a uniform grid over [0, 1] and a
// ternary search on the bracket of the best grid point.
double supremum_over_p(const ClassWeights& weight) {
  constexpr int kGrid = 20001;
  int best = 0;
  double best_value = -1.0;
  for (int j = 0; j < kGrid; ++j) {
    const double v = event_probability(weight, static_cast<double>(j) / (kGrid - 1));
    if (v > best_value) {
      best_value = v;
      best = j;
    }
  }
  double lo = static_cast<double>(std::max(best - 1, 0)) / (kGrid - 1);
  double hi = static_cast<double>(std::min(best + 1, kGrid - 1)) / (kGrid - 1);
  for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
    const double a = lo + (hi - lo) / 3.0;
    const double b = hi - (hi - lo) / 3.0;
    if (event_probability(weight, a) < event_probability(weight, b)) {
      lo = a;
    } else {
      hi = b;
    }
  }
  return std::max({best_value, event_probability(weight, lo), event_probability(weight, hi),
                   event_probability(weight, 0.5 * (lo + hi))});
}

double binomial_coefficient(std::size_t m, std::size_t j) {
  double c = 1.0;
  for (std::size_t i = 1; i <= j; ++i) {
    c = c * static_cast<double>(m - j + i) / static_cast<double>(i);
  }
  return std::round(c);
}

void require_exact_m(std::size_t m) {
  if (m == 0) throw ArgumentError("m must be positive");
  if (m > kMaxExactM) {
    throw ArgumentError("m=" + std::to_string(m) + " exceeds the exact-mode cap of " +
                        std::to_string(kMaxExactM) + "; use Monte Carlo mode");
  }
}

}  // namespace

double urp_binary_event(std::size_t m, const BinaryEvent& event) {
  require_exact_m(m);
  ClassWeights weight(m + 1, {0.0, 0.0});
  std::vector<std::uint8_t> bits(m);
  const std::uint64_t outcomes = std::uint64_t{1} << (m + 1);
  for (std::uint64_t code = 0; code < outcomes; ++code) {
    std::size_t ones = 0;
    for (std::size_t i = 0; i < m; ++i) {
      bits[i] = static_cast<std::uint8_t>((code >> i) & 1U);
      ones += bits[i];
    }
    const auto test = static_cast<std::uint8_t>((code >> m) & 1U);
    if (event(bits, test)) weight[ones][test] += 1.0;
  }
  return supremum_over_p(weight);
}

double urp_count_event(std::size_t m, const CountEvent& event) {
  if (m == 0) throw ArgumentError("m must be positive");
  ClassWeights weight(m + 1, {0.0, 0.0});
  for (std::size_t j = 0; j <= m; ++j) {
    for (std::uint8_t t = 0; t < 2; ++t) {
      if (event(j, t)) weight[j][t] = binomial_coefficient(m, j);
    }
  }
  return supremum_over_p(weight);
}

bool ValidityReport::pass() const {
  const bool cells_ok =
      std::all_of(cells.begin(), cells.end(), [](const ValidityCell& c) { return c.pass; });
  return cells_ok && identity_violations.value_or(0) == 0;
}

ValidityReport audit_pvariable(const BinaryPVariable& pvariable, std::size_t m,
                               const std::string& name) {
  require_exact_m(m);
  std::vector<std::array<double, 2>> value(m + 1);
  std::vector<double> realized;
  for (std::size_t j = 0; j <= m; ++j) {
    for (std::uint8_t t = 0; t < 2; ++t) {
      value[j][t] = pvariable(SummarySequence::from_counts(m, j, t));
      realized.push_back(value[j][t]);
    }
  }
  std::sort(realized.begin(), realized.end());
  realized.erase(std::unique(realized.begin(), realized.end()), realized.end());

  ValidityReport report;
  report.mode = "exact";
  for (double v : realized) {
    ValidityCell cell;
    cell.pvariable = name;
    cell.m = m;
    cell.epsilon = v;
    cell.probability =
        urp_count_event(m, [&value, v](std::size_t j, std::uint8_t t) { return value[j][t] <= v; });
    cell.allowed = v + 1e-9;
    cell.pass = cell.probability <= cell.allowed;
    report.cells.push_back(cell);
  }
  return report;
}

std::vector<std::pair<std::string, BinaryPVariable>> shipped_pvariables(const EngineConfig& cfg) {
  auto to_reals = [](const SummarySequence& s) {
    return std::vector<double>(s.calibration().begin(), s.calibration().end());
  };
  return {
      {"binary_irp", [cfg](const SummarySequence& s) { return irp_pvalue(s, cfg); }},
      {"icp", [](const SummarySequence& s) { return icp_pvalue(s).value(); }},
      {"dominating",
       [to_reals](const SummarySequence& s) {
         const auto alphas = to_reals(s);
         return dominating_pvalue(alphas, static_cast<double>(s.test()), 0.5);
       }},
  };
}

// ---- Monte Carlo -------------------------------------------------------------

void GeneratorSpec::validate() const {
  if (proper_size < 1) throw ArgumentError("generator: proper_size must be >= 1");
  if (calibration_size < 1) throw ArgumentError("generator: calibration_size must be >= 1");
  if (task == Task::Regression && !(noise >= 0.0 && std::isfinite(noise))) {
    throw ArgumentError("generator: noise must be a finite nonnegative number");
  }
  if (task == Task::Classification) {
    if (dimension < 1) throw ArgumentError("generator: classification needs dimension >= 1");
    if (!(flip >= 0.0 && flip <= 1.0)) throw ArgumentError("generator: flip must lie in [0, 1]");
    if (!std::isfinite(separation)) throw ArgumentError("generator: separation must be finite");
  }
}

Draw draw_trial(const GeneratorSpec& generator, std::uint64_t seed, std::uint64_t trial) {
  generator.validate();
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  std::mt19937_64 rng(seq);
  const auto d = static_cast<Eigen::Index>(generator.dimension);

  auto sample = [&]() {
    Features x(d);
    double y = 0.0;
    if (generator.task == Task::Regression) {
      std::uniform_real_distribution<double> unit(-1.0, 1.0);
      double signal = 0.5;
      for (Eigen::Index j = 0; j < d; ++j) {
        x(j) = unit(rng);
        signal += (j % 2 == 0 ? 1.0 : -1.0) / static_cast<double>(j + 1) * x(j);
      }
      y = signal + generator.noise * unit(rng);
    } else {
      std::bernoulli_distribution coin(0.5);
      std::bernoulli_distribution flip(generator.flip);
      std::normal_distribution<double> gauss(0.0, 1.0);
      y = coin(rng) ? 1.0 : -1.0;
      for (Eigen::Index j = 0; j < d; ++j) x(j) = gauss(rng);
      x(0) += y * generator.separation;
      if (flip(rng)) y = -y;
    }
    return Example(std::move(x), y);
  };

  std::vector<Example> proper;
  std::vector<Example> calibration;
  for (std::size_t i = 0; i < generator.proper_size; ++i) proper.push_back(sample());
  for (std::size_t i = 0; i < generator.calibration_size; ++i) calibration.push_back(sample());
  Example test = sample();
  return {DataSplit(std::move(proper), std::move(calibration)), std::move(test)};
}

namespace {

struct TrialOutcome {
  bool excluded = false;
  bool identity_violated = false;
};

HedgedPrediction run_pipeline(const PipelineSpec& spec, PipelineKind kind, const Draw& draw) {
  if (kind == PipelineKind::WholeSpace) {
    HedgedPrediction out;
    out.set = spec.task == Task::Regression ? PredictionSet{Interval{}} : LabelSet{true, true};
    out.incertitude = 1.0;
    out.degenerate = true;
    out.vacuous = true;
    return out;
  }
  const Method method = kind == PipelineKind::Irp ? Method::Irp : Method::Icp;
  if (spec.task == Task::Regression) {
    return RegressionPipeline(draw.split, method, spec.predictor, spec.engine)
        .predict(draw.test.features);
  }
  return ClassificationPipeline(draw.split, method, spec.predictor, spec.engine)
      .predict(draw.test.features);
}

}  // namespace

ValidityReport monte_carlo_coverage(const PipelineSpec& pipeline, const GeneratorSpec& generator,
                                    double epsilon, std::size_t trials, std::uint64_t seed,
                                    unsigned threads) {
  generator.validate();
  if (generator.task != pipeline.task) {
    throw ArgumentError("generator task does not match pipeline task");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ArgumentError("epsilon must lie in (0, 1)");
  if (trials < 1) throw ArgumentError("trials must be >= 1");
  pipeline.engine.validate();

  std::vector<TrialOutcome> outcomes(trials);
  auto run_trial = [&](std::size_t t) {
    const Draw draw = draw_trial(generator, seed, t);
    const HedgedPrediction f = run_pipeline(pipeline, pipeline.kind, draw);
    TrialOutcome& out = outcomes[t];
    out.excluded = !set_contains(prediction_set(f, epsilon), draw.test.label);
    if (pipeline.compare_with_icp) {
      const HedgedPrediction icp = run_pipeline(pipeline, PipelineKind::Icp, draw);
      out.identity_violated = !(icp.set == f.set);
    }
  };

  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, trials));
  if (threads <= 1) {
    for (std::size_t t = 0; t < trials; ++t) run_trial(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (std::size_t t = next++; t < trials; t = next++) run_trial(t);
        } catch (...) {
          errors[w] = std::current_exception();
          next = trials;
        }
      });
    }
    for (auto& worker : workers) worker.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::size_t excluded = 0;
  std::size_t violations = 0;
  for (const auto& o : outcomes) {
    excluded += o.excluded ? 1 : 0;
    violations += o.identity_violated ? 1 : 0;
  }
  const auto n = static_cast<double>(trials);
  const double rate = static_cast<double>(excluded) / n;

  ValidityCell cell;
  cell.pvariable = to_string(pipeline.task) + "/" +
                   (pipeline.kind == PipelineKind::Irp   ? "irp"
                    : pipeline.kind == PipelineKind::Icp ? "icp"
                                                         : "whole-space");
  cell.m = generator.calibration_size;
  cell.epsilon = epsilon;
  cell.probability = rate;
  cell.standard_error = std::sqrt(rate * (1.0 - rate) / n);
  cell.allowed = epsilon + 3.0 * *cell.standard_error;
  cell.pass = rate <= cell.allowed;
  cell.seed = seed;
  cell.trials = trials;

  ValidityReport report;
  report.mode = "mc";
  report.cells.push_back(cell);
  if (pipeline.compare_with_icp) report.identity_violations = violations;
  return report;
}

// ---- dominance -------------------------------------------------------------------

std::string to_string(Dominance d) {
  switch (d) {
    case Dominance::Strict: return "strict";
    case Dominance::Weak: return "weak";
    case Dominance::None: return "none";
  }
  return "unknown";
}

namespace {

// Calls visit(counts) for every composition of m into levels.size() parts.
template <typename Visit>
void for_each_multiset(std::size_t m, std::size_t levels, std::vector<std::size_t>& counts,
                       std::size_t level, Visit& visit) {
  if (level + 1 == levels) {
    counts[level] = m;
    visit(counts);
    return;
  }
  for (std::size_t c = 0; c <= m; ++c) {
    counts[level] = c;
    for_each_multiset(m - c, levels, counts, level + 1, visit);
  }
}

}  // namespace

DominanceResult check_dominance(const RealPVariable& p1, const RealPVariable& p2, std::size_t m,
                                std::span<const double> levels) {
  require_exact_m(m);
  if (levels.empty()) throw ArgumentError("check_dominance needs at least one summary level");

  DominanceResult result;
  result.verdict = Dominance::Weak;
  std::optional<DominanceWitness> strict;
  std::optional<DominanceWitness> counterexample;
  std::vector<std::size_t> counts(levels.size());
  std::vector<double> calibration(m);

  auto visit = [&](const std::vector<std::size_t>& c) {
    std::size_t pos = 0;
    for (std::size_t level = 0; level < levels.size(); ++level) {
      for (std::size_t r = 0; r < c[level]; ++r) calibration[pos++] = levels[level];
    }
    for (double test : levels) {
      const double v1 = p1(calibration, test);
      const double v2 = p2(calibration, test);
      if (v1 > v2 && !counterexample) counterexample = DominanceWitness{calibration, test, v1, v2};
      if (v1 < v2 && !strict) strict = DominanceWitness{calibration, test, v1, v2};
    }
  };
  for_each_multiset(m, levels.size(), counts, 0, visit);

  if (counterexample) {
    result.verdict = Dominance::None;
    result.witness = counterexample;
  } else if (strict) {
    result.verdict = Dominance::Strict;
    result.witness = strict;
  }
  return result;
}

DominanceResult check_dominance(const RealPVariable& p1, const RealPVariable& p2, std::size_t m) {
  constexpr std::array<double, 2> kBinary{0.0, 1.0};
  return check_dominance(p1, p2, m, kBinary);
}

RealPVariable icp_pvariable() {
  return [](std::span<const double> calibration, double test) {
    return icp_pvalue(calibration, test).value();
  };
}

RealPVariable dominating_pvariable(double threshold) {
  return [threshold](std::span<const double> calibration, double test) {
    return dominating_pvalue(calibration, test, threshold);
  };
}

// ---- table ---------------------------------------------------------------------

std::vector<TableRow> reproduce_table_k(std::size_t k_max, const EngineConfig& cfg) {
  if (k_max > 64) throw ArgumentError("k_max must not exceed 64");
  auto round3 = [](double x) { return std::round(x * 1000.0) / 1000.0; };
  std::vector<TableRow> rows;
  for (std::size_t k = 0; k <= k_max; ++k) {
    const auto constant = asymptotic_constant(k, cfg);
    TableRow row;
    row.k = k;
    row.c_star = constant.c_star;
    row.a_k_exact = constant.a_k;
    row.a_k = round3(constant.a_k);
    row.icp = k + 1;
    row.ratio = round3(constant.a_k / static_cast<double>(k + 1));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace irp
