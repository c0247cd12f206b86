#ifndef WINKLER_COMMON_HPP
#define WINKLER_COMMON_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

namespace winkler {

/// Thrown on invalid user input (bad intervals, malformed CSV, bad levels).
/// The CLI maps this to exit code 2.
class validation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a mathematical invariant of the pipeline is violated.
/// Indicates a bug, never bad input. The CLI maps this to exit code 3.
class internal_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Execution policy for the data-parallel kernels. Serial and Parallel
/// produce bit-identical results; Serial is kept as the reference path
/// for tests and benchmarks.
enum class Execution { Serial, Parallel };

/// Neumaier compensated accumulator. Summation order is fixed
/// (left-to-right), so results are reproducible per platform.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> xs);

}  // namespace winkler

#endif  // WINKLER_COMMON_HPP
