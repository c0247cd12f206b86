#include "winkler/simulation.hpp"

#include <cmath>
#include <random>

namespace winkler {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488016887242097;

// splitmix64; used only to derive independent substream seeds.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in (0, 1), never hitting either endpoint.
double next_uniform(std::mt19937_64& gen) {
  return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

double next_normal(std::mt19937_64& gen) {
  return normal_quantile(next_uniform(gen));
}

double mixture_cdf(double x, double m1, double m2) {
  return 0.5 * (normal_cdf(x - m1) + normal_cdf(x - m2));
}

// Bracketing bisection for the p-quantile of the equal-weight mixture of
// N(m1, 1) and N(m2, 1). The CDF is strictly increasing and the initial
// bracket provably contains the quantile for p in (1e-12, 1 - 1e-12).
double mixture_quantile(double p, double m1, double m2) {
  double lo = std::min(m1, m2) - 10.0;
  double hi = std::max(m1, m2) + 10.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (mixture_cdf(mid, m1, m2) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::string forecaster_name(ForecasterKind kind) {
  switch (kind) {
    case ForecasterKind::Unconditional: return "unconditional";
    case ForecasterKind::Ideal: return "ideal";
    case ForecasterKind::Unfocused: return "unfocused";
    case ForecasterKind::MeanBiased: return "mean_biased";
    case ForecasterKind::SignBiased: return "sign_biased";
    case ForecasterKind::Mixed: return "mixed";
  }
  throw internal_error("unknown forecaster kind");
}

// Wichura (1988), algorithm AS241, PPND16.
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw validation_error("normal quantile level must lie strictly between 0 and 1");
  }
  const double q = p - 0.5;
  double r;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
              4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
              2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
              5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -value : value;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

std::vector<ScenarioDraw> simulate_scenario(std::size_t n, std::uint64_t seed) {
  if (n < 1) {
    throw validation_error("scenario size must be at least 1");
  }
  std::mt19937_64 mu_stream(mix64(seed ^ 0x6d75ULL));          // "mu"
  std::mt19937_64 tau_stream(mix64(seed ^ 0x746175ULL));       // "tau"
  std::mt19937_64 noise_stream(mix64(seed ^ 0x6e6f697365ULL)); // "noise"
  std::vector<ScenarioDraw> draws(n);
  for (ScenarioDraw& d : draws) {
    d.mu = next_normal(mu_stream);
    d.tau = (tau_stream() & 1ULL) ? 1 : -1;
    d.y = d.mu + next_normal(noise_stream);
  }
  return draws;
}

Interval forecaster_interval(ForecasterKind kind, const ScenarioDraw& draw,
                             CentralLevel level) {
  validate_level(level);
  const double lo_p = level.alpha / 2.0;
  const double hi_p = 1.0 - level.alpha / 2.0;
  const double z_lo = normal_quantile(lo_p);
  const double z_hi = normal_quantile(hi_p);
  switch (kind) {
    case ForecasterKind::Unconditional:
      return {kSqrt2 * z_lo, kSqrt2 * z_hi};
    case ForecasterKind::Ideal:
      return {draw.mu + z_lo, draw.mu + z_hi};
    case ForecasterKind::Unfocused: {
      const double m2 = draw.mu + static_cast<double>(draw.tau);
      return {mixture_quantile(lo_p, draw.mu, m2),
              mixture_quantile(hi_p, draw.mu, m2)};
    }
    case ForecasterKind::MeanBiased: {
      const double m = draw.mu + static_cast<double>(draw.tau);
      return {m + z_lo, m + z_hi};
    }
    case ForecasterKind::SignBiased:
      return {-draw.mu + z_lo, -draw.mu + z_hi};
    case ForecasterKind::Mixed:
      if (draw.tau == 1) {
        return {kSqrt2 * z_lo, kSqrt2 * z_hi};
      }
      return {-draw.mu + z_lo, -draw.mu + z_hi};
  }
  throw internal_error("unknown forecaster kind");
}

std::vector<StudyRow> run_simulation_study(std::size_t n, std::uint64_t seed,
                                           CentralLevel level,
                                           Execution exec) {
  if (n < 2) {
    throw validation_error("the simulation study needs n >= 2");
  }
  validate_level(level);
  const std::vector<ScenarioDraw> draws = simulate_scenario(n, seed);
  std::vector<double> outcomes(n);
  for (std::size_t i = 0; i < n; ++i) outcomes[i] = draws[i].y;

  std::vector<StudyRow> rows;
  rows.reserve(std::size(kAllForecasters));
  for (ForecasterKind kind : kAllForecasters) {
    std::vector<Interval> ivs(n);
    for (std::size_t i = 0; i < n; ++i) {
      ivs[i] = forecaster_interval(kind, draws[i], level);
    }
    StudyRow row;
    row.kind = kind;
    const CoverageSummary original = coverage_report(ivs, outcomes);
    row.original_coverage = original.closed;
    row.original_length = original.mean_length;
    row.report =
        decompose(EvaluationSet::central(std::move(ivs), outcomes, level), exec);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace winkler
