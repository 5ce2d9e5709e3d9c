#pragma once

// Numerical building blocks shared by the model modules: zeta-type series with
// Euler-Maclaurin tails, log-domain accumulation, monotone root finding and
// least-squares slopes.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace pinlab::numerics {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Riemann zeta for s > 1.
double zeta(double s);

// Hurwitz-type tail sum_{n >= a} n^{-s}, integer a >= 1, s > 1.
double power_tail_sum(double s, std::size_t a);

// sum_{n >= a} n^{-s} e^{-f n} for f >= 0 (f = 0 requires s > 1).
double power_laplace_tail(double s, double f, std::size_t a);

// sum_{n >= a} n^{-s} (1 - e^{-f n}), accurate for small f.
double power_laplace_deficit_tail(double s, double f, std::size_t a);

// sum_{n >= a} n^{-s} log n, s > 1.
double power_log_tail_sum(double s, std::size_t a);

// Upper incomplete gamma Gamma(t, x) for any real t and x > 0.
double upper_incomplete_gamma(double t, double x);

// log(exp(a) + exp(b)) without overflow; handles -inf operands.
inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -kInf) return a;
  return a + std::log1p(std::exp(b - a));
}

// log sum_i exp(x_i); returns -inf for an empty span.
double log_sum_exp(std::span<const double> xs);

// Streaming log-sum-exp with a running maximum.
class LogSumExpAccumulator {
 public:
  void add(double x) {
    if (x == -kInf) return;
    if (x <= max_) {
      sum_ += std::exp(x - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - x) + 1.0;
      max_ = x;
    }
  }
  double value() const { return max_ == -kInf ? -kInf : max_ + std::log(sum_); }

 private:
  double max_ = -kInf;
  double sum_ = 0.0;
};

struct RootResult {
  double x;
  double fx;
  int iterations;
};

// Root of an increasing function g on [lo, hi] with g(lo) <= 0 <= g(hi).
// Bisection (geometric while the bracket spans decades, when lo > 0) with
// safeguarded Newton steps when a derivative is supplied. Stops when the
// bracket is at machine resolution or |g| <= abs_tol.
RootResult solve_increasing(const std::function<double(double)>& g,
                            const std::function<double(double)>& dg, double lo, double hi,
                            double abs_tol, int max_iter = 400);

// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

// Sample mean and standard error of the mean (0 when fewer than two values).
struct MeanStderr {
  double mean;
  double stderr_;
};
MeanStderr mean_and_stderr(std::span<const double> values);

}  // namespace pinlab::numerics
