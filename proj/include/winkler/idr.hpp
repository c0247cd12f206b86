#ifndef WINKLER_IDR_HPP
#define WINKLER_IDR_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "winkler/ordering.hpp"

namespace winkler {

/// Per-case discrete predictive distributions from isotonic
/// distributional regression. `cdf` is n_classes x n_thresholds,
/// row-major; rows are non-decreasing with final column 1, and rows of
/// DAG-smaller classes dominate rows of DAG-larger classes pointwise.
struct IdrFit {
  std::vector<double> thresholds;        // sorted unique outcomes
  std::vector<double> cdf;               // n_classes x n_thresholds
  std::vector<std::uint32_t> class_of;   // case index -> class index
  std::size_t n_classes = 0;
  std::size_t n_cases = 0;

  std::size_t n_thresholds() const { return thresholds.size(); }
  double at(std::size_t cls, std::size_t t) const {
    return cdf[cls * thresholds.size() + t];
  }
};

struct IdrConfig {
  std::size_t max_cases = 50000;     // larger inputs are rejected
  std::size_t small_sample = 500;    // below this a warning is emitted
};

/// Exact solution of the threshold problem: minimize
///   sum_i weights[i] * (p[i] - values[i])^2
/// over vectors p that are antitonic in the class order (p[i] >= p[j]
/// whenever class i precedes class j), so that DAG-larger covariates
/// receive stochastically larger distributions. Equals the min-max
/// characterization over upper/lower sets of the DAG.
std::vector<double> isotonic_binary_fit(const OrderDag& dag,
                                        std::span<const double> values,
                                        std::span<const double> weights);

/// Fits IDR to outcomes `y` with the intervals as covariates: for each
/// unique outcome z, the CDF column is the antitonic fit of the
/// indicators 1{y_i <= z} aggregated per class. Deterministic: identical
/// inputs give bit-identical fits regardless of the execution policy.
IdrFit idr_fit(std::span<const Interval> ivs, std::span<const double> y,
               OrderKind kind = OrderKind::Componentwise,
               Execution exec = Execution::Parallel,
               std::vector<std::string>* warnings = nullptr,
               const IdrConfig& config = {});

/// Same, reusing an already-built DAG for the covariates.
IdrFit idr_fit_dag(const OrderDag& dag, std::span<const double> y,
                   Execution exec = Execution::Parallel,
                   std::vector<std::string>* warnings = nullptr,
                   const IdrConfig& config = {});

/// Smallest threshold whose CDF value reaches beta: the lower quantile
/// of the fitted distribution for this case. Always one of the observed
/// outcome values.
double idr_lower_quantile(const IdrFit& fit, std::size_t case_index,
                          double beta);

/// Lower beta-quantile of the empirical distribution: order statistic
/// y_(k) with k = ceil(n * beta), where an integer n * beta resolves to
/// the lower endpoint of the quantile set.
double empirical_lower_quantile(std::span<const double> y, double beta);

}  // namespace winkler

#endif  // WINKLER_IDR_HPP
