#ifndef IRP_VALIDITY_HPP
#define IRP_VALIDITY_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "irp/core.hpp"
#include "irp/pipelines.hpp"
#include "irp/pvalues.hpp"

namespace irp {

/// Largest m for which exhaustive enumeration of {0,1}^(m+1) is allowed.
inline constexpr std::size_t kMaxExactM = 20;

// ---- upper randomness probability over binary summaries --------------------

/// Predicate over a full binary outcome (calibration bits, test bit).
using BinaryEvent = std::function<bool(std::span<const std::uint8_t>, std::uint8_t)>;
/// Predicate over the sufficient statistic (calibration one-count, test bit).
using CountEvent = std::function<bool(std::size_t, std::uint8_t)>;

/// sup over p of the probability of `event` under IID Bernoulli(p) summaries,
/// by enumerating all 2^(m+1) outcomes. Needs m <= kMaxExactM.
double urp_binary_event(std::size_t m, const BinaryEvent& event);

/// Same supremum for events that depend only on (one-count, test bit); each
/// class is weighted by its binomial multiplicity.
double urp_count_event(std::size_t m, const CountEvent& event);

// ---- reports ---------------------------------------------------------------

struct ValidityCell {
  std::string pvariable;
  std::size_t m = 0;
  double epsilon = 0.0;
  double probability = 0.0;              // exact URP or Monte Carlo rate
  std::optional<double> standard_error;  // Monte Carlo only
  double allowed = 0.0;                  // epsilon plus slack
  bool pass = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
};

struct ValidityReport {
  std::string mode;  // "exact" or "mc"
  std::vector<ValidityCell> cells;
  // Monte Carlo runs comparing IRP and ICP prediction sets trial by trial.
  std::optional<std::size_t> identity_violations;

  bool pass() const;
};

/// A p-variable on binary summaries, assumed invariant under permutations of
/// the calibration summaries.
using BinaryPVariable = std::function<double(const SummarySequence&)>;

/// Checks URP({P <= v}) <= v + 1e-9 at every realized p-value v, over the
/// 2(m+1) classes (k, test bit). Needs m <= kMaxExactM.
ValidityReport audit_pvariable(const BinaryPVariable& pvariable, std::size_t m,
                               const std::string& name = "pvariable");

/// The binary p-variables this library ships: the IRP engine, the ICP and the
/// dominating construction at threshold 1/2.
std::vector<std::pair<std::string, BinaryPVariable>> shipped_pvariables(
    const EngineConfig& cfg = {});

// ---- Monte Carlo coverage ----------------------------------------------------

enum class PipelineKind { Irp, Icp, WholeSpace };

struct PipelineSpec {
  Task task = Task::Regression;
  PipelineKind kind = PipelineKind::Irp;
  PredictorSpec predictor{};
  EngineConfig engine{};
  bool compare_with_icp = false;  // also run the ICP and compare prediction sets
};

/// IID data source. Regression: x ~ U[-1,1]^d, y = w.x + 0.5 + U[-noise, noise]
/// with w_j = (-1)^j / (j + 1). Classification: y = +-1 equiprobable,
/// x ~ N(y * separation * e_1, I), label flipped with probability `flip`.
struct GeneratorSpec {
  Task task = Task::Regression;
  std::size_t dimension = 2;
  std::size_t proper_size = 100;
  std::size_t calibration_size = 20;
  double noise = 0.5;
  double separation = 2.0;
  double flip = 0.0;

  void validate() const;
};

/// One IID draw of proper + calibration + one test example.
struct Draw {
  DataSplit split;
  Example test;
};

Draw draw_trial(const GeneratorSpec& generator, std::uint64_t seed, std::uint64_t trial);

/// Runs `trials` independent draws; trial t uses a random stream seeded from
/// (seed, t), so the report does not depend on `threads`.
ValidityReport monte_carlo_coverage(const PipelineSpec& pipeline, const GeneratorSpec& generator,
                                    double epsilon, std::size_t trials, std::uint64_t seed,
                                    unsigned threads = 0);

// ---- dominance -----------------------------------------------------------------

/// A p-variable on real summaries, invariant under calibration permutations.
using RealPVariable = std::function<double(std::span<const double>, double)>;

enum class Dominance { Strict, Weak, None };

std::string to_string(Dominance d);

struct DominanceWitness {
  std::vector<double> calibration;
  double test = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
};

struct DominanceResult {
  Dominance verdict = Dominance::None;
  std::optional<DominanceWitness> witness;  // strict: p1 < p2; none: p1 > p2
};

/// Compares p1 and p2 on every multiset of m calibration summaries drawn from
/// `levels` and every test summary in `levels`. Needs m <= kMaxExactM.
DominanceResult check_dominance(const RealPVariable& p1, const RealPVariable& p2, std::size_t m,
                                std::span<const double> levels);
DominanceResult check_dominance(const RealPVariable& p1, const RealPVariable& p2,
                                std::size_t m);  // levels {0, 1}

RealPVariable icp_pvariable();
RealPVariable dominating_pvariable(double threshold);

// ---- asymptotic table ---------------------------------------------------------

struct TableRow {
  std::size_t k = 0;
  double c_star = 0.0;
  double a_k = 0.0;       // rounded to 3 decimals
  std::size_t icp = 0;    // k + 1
  double ratio = 0.0;     // a_k / (k + 1), rounded to 3 decimals
  double a_k_exact = 0.0;
};

std::vector<TableRow> reproduce_table_k(std::size_t k_max, const EngineConfig& cfg = {});

}  // namespace irp

#endif  // IRP_VALIDITY_HPP
