#ifndef WINKLER_SCORING_HPP
#define WINKLER_SCORING_HPP

#include <span>
#include <utility>
#include <vector>

#include "winkler/common.hpp"

namespace winkler {

/// A candidate prediction interval. Bounds must be finite with
/// lower <= upper; degenerate intervals (lower == upper) are rejected
/// unless explicitly permitted.
struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Central coverage level: the interval targets coverage 1 - alpha.
struct CentralLevel {
  double alpha = 0.1;
};

/// Quantile levels of a non-central interval: lower bound targets the
/// alpha1 quantile, upper bound the alpha2 quantile, alpha1 < alpha2.
struct NonCentralLevels {
  double alpha1 = 0.05;
  double alpha2 = 0.95;
};

inline NonCentralLevels to_noncentral(CentralLevel level) {
  return {level.alpha / 2.0, 1.0 - level.alpha / 2.0};
}

/// Non-decreasing transform applied by the generalized interval score.
/// Either the identity, log(x + offset), or a piecewise linear table.
class Transform {
 public:
  enum class Kind { Identity, LogShift, Table };

  Transform() = default;
  static Transform identity() { return Transform(); }
  static Transform log_shift(double offset);
  /// Breakpoints (x, g(x)); x strictly increasing, g non-decreasing.
  static Transform table(std::vector<std::pair<double, double>> points);

  double operator()(double x) const;
  Kind kind() const { return kind_; }
  bool is_identity() const { return kind_ == Kind::Identity; }
  /// True when the represented function is strictly increasing. The
  /// non-negativity guarantees of the decomposition require this.
  bool strictly_increasing() const;

 private:
  Kind kind_ = Kind::Identity;
  double offset_ = 0.0;
  std::vector<std::pair<double, double>> points_;
};

void validate_level(CentralLevel level);
void validate_levels(NonCentralLevels levels);
void validate_interval(const Interval& iv, bool allow_degenerate = false);

/// Pinball loss (1{y <= x} - beta) * (x - y); consistent for the
/// beta-quantile.
double quantile_score(double x, double y, double beta);

/// Winkler score of a central 1-alpha interval: length plus 2/alpha
/// times the distance by which the outcome escapes the interval.
/// Outcomes exactly on a bound incur no penalty.
double interval_score(const Interval& iv, double y, CentralLevel level,
                      bool allow_degenerate = false);

double noncentral_interval_score(const Interval& iv, double y,
                                 NonCentralLevels levels,
                                 bool allow_degenerate = false);

double generalized_interval_score(const Interval& iv, double y,
                                  CentralLevel level, const Transform& g,
                                  bool allow_degenerate = false);

/// Common core: every other score is a wrapper around this one, so the
/// stated reductions (identity transform, alpha1 = alpha/2, ...) hold
/// bit-for-bit.
double generalized_noncentral_interval_score(const Interval& iv, double y,
                                             NonCentralLevels levels,
                                             const Transform& g,
                                             bool allow_degenerate = false);

/// Arithmetic mean with compensated left-to-right summation.
double mean_score(std::span<const double> scores);

}  // namespace winkler

#endif  // WINKLER_SCORING_HPP
