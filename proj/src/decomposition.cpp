#include "winkler/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace winkler {

EvaluationSet EvaluationSet::central(std::vector<Interval> ivs,
                                     std::vector<double> y,
                                     CentralLevel level) {
  validate_level(level);
  EvaluationSet es;
  es.intervals = std::move(ivs);
  es.outcomes = std::move(y);
  es.levels = to_noncentral(level);
  return es;
}

EvaluationSet EvaluationSet::noncentral(std::vector<Interval> ivs,
                                        std::vector<double> y,
                                        NonCentralLevels levels) {
  validate_levels(levels);
  EvaluationSet es;
  es.intervals = std::move(ivs);
  es.outcomes = std::move(y);
  es.levels = levels;
  return es;
}

namespace {

void validate_set(const EvaluationSet& es) {
  if (es.intervals.size() != es.outcomes.size()) {
    throw validation_error("interval and outcome counts differ");
  }
  if (es.intervals.size() < 2) {
    throw validation_error("evaluation needs at least two cases");
  }
  validate_levels(es.levels);
  for (const Interval& iv : es.intervals) {
    validate_interval(iv, es.allow_degenerate);
  }
  for (double y : es.outcomes) {
    if (!std::isfinite(y)) {
      throw validation_error("outcomes must be finite");
    }
  }
  if (es.order_kind == OrderKind::Midpoint && !es.allow_unsafe_order) {
    throw validation_error(
        "the midpoint order does not protect the decomposition guarantees; "
        "pass allow_unsafe_order (--allow-unsafe-order) to proceed");
  }
}

double clamp_tiny(double x) { return std::abs(x) <= 1e-10 ? 0.0 : x; }

double mean_transformed_score(const EvaluationSet& es,
                              std::span<const Interval> ivs,
                              bool allow_degenerate) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < ivs.size(); ++i) {
    acc.add(generalized_noncentral_interval_score(
        ivs[i], es.outcomes[i], es.levels, es.transform, allow_degenerate));
  }
  return acc.value() / static_cast<double>(ivs.size());
}

struct Pipeline {
  OrderDag dag;
  IdrFit fit;
  std::vector<Interval> recalibrated;
  std::vector<std::string> warnings;
};

Pipeline run_pipeline(const EvaluationSet& es, Execution exec,
                      const DecomposeConfig& config) {
  validate_set(es);
  Pipeline p;
  if (es.order_kind == OrderKind::Midpoint) {
    p.warnings.push_back(
        "unsafe order: midpoint ordering is diagnostic-only and can produce "
        "a negative miscalibration term");
  }
  if (!es.transform.strictly_increasing()) {
    p.warnings.push_back(
        "transform is not strictly increasing: non-negativity of dsc/mcb is "
        "no longer guaranteed");
  }
  p.dag = build_dag(es.intervals, es.order_kind);
  p.fit = idr_fit_dag(p.dag, es.outcomes, exec, &p.warnings, config.idr);

  const std::size_t n = es.outcomes.size();
  p.recalibrated.resize(n);
  bool any_degenerate = false;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = idr_lower_quantile(p.fit, i, es.levels.alpha1);
    const double hi = idr_lower_quantile(p.fit, i, es.levels.alpha2);
    if (hi < lo) {
      throw internal_error("recalibrated interval crossed its bounds");
    }
    if (hi == lo) any_degenerate = true;
    p.recalibrated[i] = {lo, hi};
  }
  if (any_degenerate) {
    p.warnings.push_back(
        "some recalibrated intervals are degenerate (tied outcomes within a "
        "covariate class)");
  }
  return p;
}

}  // namespace

std::vector<Interval> recalibrate(const EvaluationSet& es, Execution exec,
                                  const DecomposeConfig& config) {
  return run_pipeline(es, exec, config).recalibrated;
}

CoverageSummary coverage_report(std::span<const Interval> ivs,
                                std::span<const double> y) {
  if (ivs.size() != y.size()) {
    throw validation_error("interval and outcome counts differ");
  }
  if (ivs.empty()) {
    throw validation_error("coverage of an empty set is undefined");
  }
  std::size_t open = 0, closed = 0;
  CompensatedSum length;
  for (std::size_t i = 0; i < ivs.size(); ++i) {
    if (ivs[i].lower < y[i] && y[i] < ivs[i].upper) ++open;
    if (ivs[i].lower <= y[i] && y[i] <= ivs[i].upper) ++closed;
    length.add(ivs[i].upper - ivs[i].lower);
  }
  const double n = static_cast<double>(ivs.size());
  return {static_cast<double>(open) / n, static_cast<double>(closed) / n,
          length.value() / n};
}

DecompositionReport decompose(const EvaluationSet& es, Execution exec,
                              const DecomposeConfig& config) {
  Pipeline p = run_pipeline(es, exec, config);
  const std::size_t n = es.outcomes.size();

  DecompositionReport report;
  report.n = n;
  report.warnings = std::move(p.warnings);

  report.mean_score =
      mean_transformed_score(es, es.intervals, es.allow_degenerate);

  const double q_lo = empirical_lower_quantile(es.outcomes, es.levels.alpha1);
  const double q_hi = empirical_lower_quantile(es.outcomes, es.levels.alpha2);
  if (q_hi < q_lo) {
    throw internal_error("empirical quantiles crossed");
  }
  const std::vector<Interval> unc_intervals(n, Interval{q_lo, q_hi});
  // Data-derived intervals may legitimately collapse under ties.
  report.unc = mean_transformed_score(es, unc_intervals, true);

  const double recal_mean = mean_transformed_score(es, p.recalibrated, true);
  report.dsc_raw = report.unc - recal_mean;
  report.mcb_raw = report.mean_score - recal_mean;
  report.dsc = clamp_tiny(report.dsc_raw);
  report.mcb = clamp_tiny(report.mcb_raw);

  report.comparability =
      comparability_fraction(es.intervals, es.order_kind, exec);
  if (report.comparability < config.comparability_warn) {
    report.warnings.push_back(
        "low comparability: only " + std::to_string(report.comparability) +
        " of interval pairs are ordered; IDR estimates may be coarse");
  }

  const CoverageSummary recal_cov = coverage_report(p.recalibrated, es.outcomes);
  report.open_coverage = recal_cov.open;
  report.closed_coverage = recal_cov.closed;
  report.mean_length_recalibrated = recal_cov.mean_length;

  CompensatedSum orig_length;
  for (const Interval& iv : es.intervals) {
    orig_length.add(iv.upper - iv.lower);
  }
  report.mean_length_original = orig_length.value() / static_cast<double>(n);

  const double identity_gap =
      std::abs(report.unc - report.dsc + report.mcb - report.mean_score);
  if (identity_gap > 1e-9 * std::max(1.0, std::abs(report.mean_score))) {
    throw internal_error("decomposition identity violated beyond tolerance");
  }
  return report;
}

}  // namespace winkler
