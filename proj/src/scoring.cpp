#include "winkler/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace winkler {

namespace {

bool finite(double x) { return std::isfinite(x); }

}  // namespace

Transform Transform::log_shift(double offset) {
  if (!finite(offset)) {
    throw validation_error("log-shift offset must be finite");
  }
  Transform t;
  t.kind_ = Kind::LogShift;
  t.offset_ = offset;
  return t;
}

Transform Transform::table(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) {
    throw validation_error("transform table needs at least two breakpoints");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!finite(points[i].first) || !finite(points[i].second)) {
      throw validation_error("transform table entries must be finite");
    }
    if (i > 0) {
      if (points[i].first <= points[i - 1].first) {
        throw validation_error("transform table x-values must be strictly increasing");
      }
      if (points[i].second < points[i - 1].second) {
        throw validation_error("transform table must be non-decreasing");
      }
    }
  }
  Transform t;
  t.kind_ = Kind::Table;
  t.points_ = std::move(points);
  return t;
}

double Transform::operator()(double x) const {
  switch (kind_) {
    case Kind::Identity:
      return x;
    case Kind::LogShift: {
      const double shifted = x + offset_;
      if (!(shifted > 0.0)) {
        throw validation_error("log-shift transform evaluated at x + offset <= 0");
      }
      return std::log(shifted);
    }
    case Kind::Table: {
      if (x < points_.front().first || x > points_.back().first) {
        throw validation_error("transform table evaluated outside its breakpoint range");
      }
      auto it = std::lower_bound(
          points_.begin(), points_.end(), x,
          [](const std::pair<double, double>& p, double v) { return p.first < v; });
      if (it->first == x) {
        return it->second;
      }
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double w = (x - lo.first) / (hi.first - lo.first);
      return lo.second + w * (hi.second - lo.second);
    }
  }
  throw internal_error("unreachable transform kind");
}

bool Transform::strictly_increasing() const {
  switch (kind_) {
    case Kind::Identity:
    case Kind::LogShift:
      return true;
    case Kind::Table:
      for (std::size_t i = 1; i < points_.size(); ++i) {
        if (points_[i].second <= points_[i - 1].second) {
          return false;
        }
      }
      return true;
  }
  return false;
}

void validate_level(CentralLevel level) {
  if (!finite(level.alpha) || level.alpha <= 0.0 || level.alpha >= 1.0) {
    throw validation_error("alpha must lie strictly between 0 and 1");
  }
}

void validate_levels(NonCentralLevels levels) {
  if (!finite(levels.alpha1) || levels.alpha1 <= 0.0 || levels.alpha1 >= 1.0 ||
      !finite(levels.alpha2) || levels.alpha2 <= 0.0 || levels.alpha2 >= 1.0) {
    throw validation_error("quantile levels must lie strictly between 0 and 1");
  }
  if (!(levels.alpha1 < levels.alpha2)) {
    throw validation_error("alpha1 must be smaller than alpha2");
  }
}

void validate_interval(const Interval& iv, bool allow_degenerate) {
  if (!finite(iv.lower) || !finite(iv.upper)) {
    throw validation_error("interval bounds must be finite");
  }
  if (iv.lower > iv.upper) {
    throw validation_error("interval lower bound exceeds upper bound");
  }
  if (!allow_degenerate && iv.lower == iv.upper) {
    throw validation_error(
        "degenerate interval (lower == upper); pass allow_degenerate to accept");
  }
}

double quantile_score(double x, double y, double beta) {
  if (!finite(x) || !finite(y)) {
    throw validation_error("quantile score requires finite arguments");
  }
  if (!finite(beta) || beta <= 0.0 || beta >= 1.0) {
    throw validation_error("quantile level must lie strictly between 0 and 1");
  }
  const double indicator = (y <= x) ? 1.0 : 0.0;
  return (indicator - beta) * (x - y);
}

double generalized_noncentral_interval_score(const Interval& iv, double y,
                                             NonCentralLevels levels,
                                             const Transform& g,
                                             bool allow_degenerate) {
  validate_interval(iv, allow_degenerate);
  validate_levels(levels);
  if (!finite(y)) {
    throw validation_error("outcome must be finite");
  }
  const double gl = g(iv.lower);
  const double gu = g(iv.upper);
  double score = std::abs(gu - gl);
  if (y < iv.lower) {
    score += (gl - g(y)) / levels.alpha1;
  } else if (y > iv.upper) {
    score += (g(y) - gu) / (1.0 - levels.alpha2);
  }
  return score;
}

double noncentral_interval_score(const Interval& iv, double y,
                                 NonCentralLevels levels,
                                 bool allow_degenerate) {
  return generalized_noncentral_interval_score(iv, y, levels,
                                               Transform::identity(),
                                               allow_degenerate);
}

double interval_score(const Interval& iv, double y, CentralLevel level,
                      bool allow_degenerate) {
  validate_level(level);
  return noncentral_interval_score(iv, y, to_noncentral(level),
                                   allow_degenerate);
}

double generalized_interval_score(const Interval& iv, double y,
                                  CentralLevel level, const Transform& g,
                                  bool allow_degenerate) {
  validate_level(level);
  return generalized_noncentral_interval_score(iv, y, to_noncentral(level), g,
                                               allow_degenerate);
}

double compensated_sum(std::span<const double> xs) {
  CompensatedSum acc;
  for (double x : xs) {
    acc.add(x);
  }
  return acc.value();
}

double mean_score(std::span<const double> scores) {
  if (scores.empty()) {
    throw validation_error("mean of an empty score sequence is undefined");
  }
  return compensated_sum(scores) / static_cast<double>(scores.size());
}

}  // namespace winkler
