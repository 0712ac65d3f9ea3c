#include "irp/pvalues.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace irp {

void EngineConfig::validate() const {
  if (grid_points < 64) throw ArgumentError("grid_points must be at least 64");
  if (!(refine_tol > 0)) throw ArgumentError("refine_tol must be positive");
  if (!(constant_tol > 0)) throw ArgumentError("constant_tol must be positive");
}

namespace {

template <typename F>
Maximum golden_section(F f, double lo, double hi, double tol) {
  constexpr double inv_phi = 0.6180339887498948482;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    }
    if (x1 >= x2) break;  // bracket collapsed to adjacent doubles
  }
  return f1 >= f2 ? Maximum{x1, f1} : Maximum{x2, f2};
}

// Uniform grid on [0, 1] merged with a uniform grid on [0, s], where s is a
// few multiples of the (k+1)/m scale the maximizer sits at for large m.
std::vector<double> scan_grid(std::size_t m, std::size_t k, int points) {
  const double focus =
      std::min(1.0, 8.0 * static_cast<double>(k + 2) / static_cast<double>(m + 1));
  std::vector<double> grid;
  grid.reserve(2 * static_cast<std::size_t>(points));
  for (int j = 0; j < points; ++j) {
    const double t = static_cast<double>(j) / (points - 1);
    grid.push_back(t);
    if (focus < 1.0) grid.push_back(focus * t);
  }
  std::sort(grid.begin(), grid.end());
  // the two grids can land within an ulp of each other; rounding noise between
  // such twins would show up as spurious local maxima
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double a, double b) { return b - a <= 1e-9 * b; }),
             grid.end());
  return grid;
}

Maximum refine(std::size_t m, std::size_t k, const std::vector<double>& grid, std::size_t best,
               double tol) {
  const double lo = grid[best == 0 ? 0 : best - 1];
  const double hi = grid[std::min(best + 1, grid.size() - 1)];
  auto f = [m, k](double p) { return objective(m, k, p); };
  Maximum refined = golden_section(f, lo, hi, tol);
  const double at_grid = f(grid[best]);
  if (at_grid > refined.value) refined = {grid[best], at_grid};
  return refined;
}

}  // namespace

Maximum maximize_objective(std::size_t m, std::size_t k, const EngineConfig& cfg) {
  cfg.validate();
  if (m == 0) throw ArgumentError("m must be positive");
  if (k > m) throw ArgumentError("k must not exceed m");
  if (k == m) return {1.0, 1.0};

  const auto grid = scan_grid(m, k, cfg.grid_points);
  std::size_t best = 0;
  double best_value = -1.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double v = objective(m, k, grid[j]);
    if (v > best_value) {
      best_value = v;
      best = j;
    }
  }
  return refine(m, k, grid, best, cfg.refine_tol);
}

std::vector<Maximum> scan_stationary_points(std::size_t m, std::size_t k,
                                            const EngineConfig& cfg) {
  cfg.validate();
  if (m == 0) throw ArgumentError("m must be positive");
  if (k > m) throw ArgumentError("k must not exceed m");
  if (k == m) return {{1.0, 1.0}};

  const auto grid = scan_grid(m, k, 10 * cfg.grid_points);
  std::vector<double> values(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) values[j] = objective(m, k, grid[j]);

  std::vector<Maximum> maxima;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const bool left_ok = j == 0 || values[j] > values[j - 1];
    const bool right_ok = j + 1 == grid.size() || values[j] >= values[j + 1];
    if (left_ok && right_ok && values[j] > 0) maxima.push_back(refine(m, k, grid, j, cfg.refine_tol));
  }
  return maxima;
}

double binary_irp_pvalue(std::size_t m, std::size_t k, const EngineConfig& cfg) {
  return maximize_objective(m, k, cfg).value;
}

double irp_pvalue(const SummarySequence& summaries, const EngineConfig& cfg) {
  // B = 0 is the smallest value of the aggregating function: {B >= 0} is sure.
  if (summaries.test() == 0) return 1.0;
  return binary_irp_pvalue(summaries.m(), summaries.k(), cfg);
}

double exact_pvalue_k0(std::size_t m) {
  if (m == 0) throw ArgumentError("m must be positive");
  const auto md = static_cast<double>(m);
  // m ln m - (m+1) ln(m+1) = m ln(1 - 1/(m+1)) - ln(m+1)
  return std::exp(md * std::log1p(-1.0 / (md + 1.0)) - std::log(md + 1.0));
}

double optimal_p_k1(std::size_t m) {
  if (m < 2) throw ArgumentError("optimal_p_k1 needs m >= 2");
  const auto md = static_cast<double>(m);
  return (md - 2.0 + std::sqrt(5.0 * md * md - 4.0 * md)) / (2.0 * (md * md - 1.0));
}

double asymptotic_numerator(std::size_t k, double c) {
  const double log_c = std::log(c);
  CompensatedSum<double> sum;
  for (std::size_t i = 0; i <= k; ++i) {
    const auto id = static_cast<double>(i);
    sum.add(std::exp((id + 1.0) * log_c - c - std::lgamma(id + 1.0)));
  }
  return sum.value();
}

namespace {

// sum_{i<=k} (c^i/i!) / (c^k/k!) - c; strictly decreasing in c > 0.
double scaled_stationarity(std::size_t k, double c) {
  double ratio = 1.0;
  CompensatedSum<double> sum;
  sum.add(ratio);
  for (std::size_t i = k; i > 0; --i) {
    ratio *= static_cast<double>(i) / c;
    sum.add(ratio);
  }
  return sum.value() - c;
}

}  // namespace

double stationarity_residual(std::size_t k, double c) { return scaled_stationarity(k, c) / c; }

AsymptoticConstant asymptotic_constant(std::size_t k, const EngineConfig& cfg) {
  cfg.validate();
  // The scaled function tends to +inf as c -> 0+ and is negative at k + 3.
  double lo = 0.0;
  double hi = static_cast<double>(k) + 3.0;
  if (!(scaled_stationarity(k, hi) < 0.0)) {
    std::ostringstream os;
    os << "asymptotic_constant: root not bracketed for k=" << k << " on (0, " << hi
       << "], value at upper end " << scaled_stationarity(k, hi);
    throw std::runtime_error(os.str());
  }
  while (hi - lo > cfg.constant_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (scaled_stationarity(k, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double c = 0.5 * (lo + hi);
  return {k, c, asymptotic_numerator(k, c)};
}

Rational icp_pvalue(std::span<const double> calibration_alphas, double test_alpha) {
  if (calibration_alphas.empty()) throw ArgumentError("icp_pvalue needs m >= 1");
  const auto at_least = std::count_if(calibration_alphas.begin(), calibration_alphas.end(),
                                      [test_alpha](double a) { return a >= test_alpha; });
  return {static_cast<std::uint64_t>(at_least) + 1, calibration_alphas.size() + 1};
}

Rational icp_pvalue(const SummarySequence& summaries) {
  const std::uint64_t at_least = summaries.test() == 1 ? summaries.k() : summaries.m();
  return {at_least + 1, summaries.m() + 1};
}

double dominating_pvalue(std::span<const double> calibration_alphas, double test_alpha,
                         double threshold) {
  if (calibration_alphas.empty()) throw ArgumentError("dominating_pvalue needs m >= 1");
  const bool all_below = std::all_of(calibration_alphas.begin(), calibration_alphas.end(),
                                     [threshold](double a) { return a < threshold; });
  if (test_alpha > threshold && all_below) return exact_pvalue_k0(calibration_alphas.size());
  return icp_pvalue(calibration_alphas, test_alpha).value();
}

}  // namespace irp
