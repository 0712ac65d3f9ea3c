#ifndef IRP_PVALUES_HPP
#define IRP_PVALUES_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "irp/core.hpp"

namespace irp {

struct EngineConfig {
  int grid_points = 4096;    // initial scan over p, at least 64
  double refine_tol = 1e-14; // final golden-section bracket width
  double constant_tol = 1e-13;

  void validate() const;
};

/// Neumaier-compensated running sum.
template <typename Scalar>
class CompensatedSum {
 public:
  void add(Scalar x) {
    const Scalar t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      correction_ += (sum_ - t) + x;
    } else {
      correction_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  Scalar value() const { return sum_ + correction_; }

 private:
  Scalar sum_ = 0;
  Scalar correction_ = 0;
};

/// Probability, under IID Bernoulli(p) summaries, that at most k of the m
/// calibration summaries are 1 and the test summary is 1:
///
///   sum_{i=0}^{k} C(m,i) p^{i+1} (1-p)^{m-i}
///
/// Each term is evaluated in log space so that large m does not underflow.
template <typename Scalar>
Scalar objective(std::size_t m, std::size_t k, Scalar p) {
  using std::exp;
  using std::log;
  using std::log1p;
  if (k > m) throw ArgumentError("objective: k must not exceed m");
  if (!(p >= 0 && p <= 1)) throw ArgumentError("objective: p must lie in [0, 1]");
  if (p == 0) return Scalar(0);
  if (p == 1) return k == m ? Scalar(1) : Scalar(0);

  const Scalar log_p = log(p);
  const Scalar log_q = log1p(-p);
  const auto md = static_cast<Scalar>(m);
  Scalar log_binom = 0;
  CompensatedSum<Scalar> sum;
  for (std::size_t i = 0; i <= k; ++i) {
    if (i > 0) {
      const auto id = static_cast<Scalar>(i);
      log_binom += log((md - id + 1) / id);
    }
    sum.add(exp(log_binom + static_cast<Scalar>(i + 1) * log_p +
                (md - static_cast<Scalar>(i)) * log_q));
  }
  return sum.value();
}

struct Maximum {
  double argmax = 0.0;
  double value = 0.0;
};

/// Global maximum of objective(m, k, .) over [0, 1]: dense grid scan, then
/// golden-section refinement on the bracket around the best grid point.
/// k == m returns (1, 1) exactly.
Maximum maximize_objective(std::size_t m, std::size_t k, const EngineConfig& cfg = {});

/// Local maxima of objective(m, k, .) found on a grid ten times denser than
/// cfg.grid_points, each refined. Used to check that the scan found the
/// global maximum when the objective is not unimodal.
std::vector<Maximum> scan_stationary_points(std::size_t m, std::size_t k,
                                            const EngineConfig& cfg = {});

/// Binary IRP p-value for a positive test summary with k ones among m
/// calibration summaries.
double binary_irp_pvalue(std::size_t m, std::size_t k, const EngineConfig& cfg = {});

/// Aggregating p-variable of the binary IRP. A conforming test summary gets 1.
double irp_pvalue(const SummarySequence& summaries, const EngineConfig& cfg = {});

/// m^m / (m+1)^(m+1), the k = 0 p-value.
double exact_pvalue_k0(std::size_t m);

/// Argmax of objective(m, 1, .): (m - 2 + sqrt(5m^2 - 4m)) / (2(m^2 - 1)). Needs m >= 2.
double optimal_p_k1(std::size_t m);

struct AsymptoticConstant {
  std::size_t k = 0;
  double c_star = 0.0;  // m * argmax in the limit
  double a_k = 0.0;     // m * p-value in the limit
};

/// Solves  sum_{i<=k} c^i/i! = c^{k+1}/k!  by bisection and evaluates
/// a_k = sum_{i<=k} c^{i+1} e^{-c} / i!.
AsymptoticConstant asymptotic_constant(std::size_t k, const EngineConfig& cfg = {});

/// sum_{i<=k} c^{i+1} e^{-c} / i!, the limit of m * objective(m, k, c/m).
double asymptotic_numerator(std::size_t k, double c);

/// (sum_{i<=k} c^i/i! - c^{k+1}/k!) / (c^{k+1}/k!), zero at c_star.
double stationarity_residual(std::size_t k, double c);

struct Rational {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;

  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
  bool operator==(const Rational&) const = default;
};

/// ICP p-value (1 + #{j : alpha_j >= test}) / (m + 1).
Rational icp_pvalue(std::span<const double> calibration_alphas, double test_alpha);
Rational icp_pvalue(const SummarySequence& summaries);

/// Improves the ICP at one configuration: when the test alpha exceeds
/// `threshold` and every calibration alpha is below it, returns
/// m^m/(m+1)^(m+1) instead of 1/(m+1).
double dominating_pvalue(std::span<const double> calibration_alphas, double test_alpha,
                         double threshold);

}  // namespace irp

#endif  // IRP_PVALUES_HPP
