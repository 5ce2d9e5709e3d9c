#include "pinlab/numerics.hpp"

#include <algorithm>
#include <array>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "pinlab/errors.hpp"

namespace pinlab::numerics {
namespace {

// B_{2k} / (2k)! for k = 1..6.
constexpr std::array<double, 6> kBernoulliOverFactorial = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
};

constexpr std::size_t kEulerMaclaurinStart = 64;

double rising(double s, int m) {
  double r = 1.0;
  for (int i = 0; i < m; ++i) r *= s + i;
  return r;
}

double binomial(int m, int j) {
  double r = 1.0;
  for (int i = 1; i <= j; ++i) r = r * (m - j + i) / i;
  return r;
}

// -(odd derivative of x^{-s} e^{-f x}) at x = a, order m.
double neg_odd_derivative(double s, double f, double a, int m) {
  double acc = 0.0;
  double fj = 1.0;
  for (int j = 0; j <= m; ++j) {
    acc += binomial(m, j) * rising(s, m - j) * fj * std::pow(a, -s - m + j);
    fj *= f;
  }
  return acc * std::exp(-f * a);
}

// Euler-Maclaurin tail of x^{-s} e^{-f x} from a (a >= kEulerMaclaurinStart).
double em_laplace_tail(double s, double f, double a) {
  double integral;
  if (f == 0.0) {
    integral = std::pow(a, 1.0 - s) / (s - 1.0);
  } else {
    integral = std::pow(f, s - 1.0) * upper_incomplete_gamma(1.0 - s, f * a);
  }
  double sum = integral + 0.5 * std::pow(a, -s) * std::exp(-f * a);
  for (std::size_t k = 0; k < kBernoulliOverFactorial.size(); ++k) {
    const int m = static_cast<int>(2 * k + 1);
    sum += kBernoulliOverFactorial[k] * neg_odd_derivative(s, f, a, m);
  }
  return sum;
}

// Continued fraction for Gamma(t, x), valid for x well above |t|.
double upper_gamma_cf(double t, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - t;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - t);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + t * std::log(x)) * h;
}

}  // namespace

double upper_incomplete_gamma(double t, double x) {
  if (!(x > 0.0)) throw InvalidParameter("upper_incomplete_gamma: x must be positive");
  if (x > 2.0 + std::fabs(t)) return upper_gamma_cf(t, x);
  if (t > 0.0) return boost::math::tgamma(t, x);
  const double steps = std::ceil(-t);
  double a = t + steps;
  double value;
  if (std::fabs(a) < 1e-12) {
    a = 0.0;
    value = boost::math::expint(1, x);
  } else {
    value = boost::math::tgamma(a, x);
  }
  for (int i = 0; i < static_cast<int>(steps); ++i) {
    value = (value - std::exp((a - 1.0) * std::log(x) - x)) / (a - 1.0);
    a -= 1.0;
  }
  return value;
}

double power_tail_sum(double s, std::size_t a) { return power_laplace_tail(s, 0.0, a); }

double power_laplace_tail(double s, double f, std::size_t a) {
  if (a == 0) throw InvalidParameter("power series start must be >= 1");
  if (f < 0.0) throw InvalidParameter("laplace parameter must be nonnegative");
  if (f == 0.0 && !(s > 1.0)) return kInf;

  // Fast exponential decay: sum directly.
  if (f >= 0.5 || f * static_cast<double>(a) > 30.0) {
    double sum = 0.0;
    for (std::size_t n = a;; ++n) {
      const double nd = static_cast<double>(n);
      const double term = std::exp(-s * std::log(nd) - f * nd);
      sum += term;
      if (term <= 1e-18 * sum || term == 0.0) break;
    }
    return sum;
  }
  const std::size_t start = std::max(a, kEulerMaclaurinStart);
  double head = 0.0;
  for (std::size_t n = a; n < start; ++n) {
    const double nd = static_cast<double>(n);
    head += std::exp(-s * std::log(nd) - f * nd);
  }
  return head + em_laplace_tail(s, f, static_cast<double>(start));
}

double power_laplace_deficit_tail(double s, double f, std::size_t a) {
  if (a == 0) throw InvalidParameter("power series start must be >= 1");
  if (f == 0.0) return 0.0;
  if (f >= 0.5 || f * static_cast<double>(a) > 30.0) {
    return power_tail_sum(s, a) - power_laplace_tail(s, f, a);
  }
  const std::size_t start = std::max(a, kEulerMaclaurinStart);
  double head = 0.0;
  for (std::size_t n = a; n < start; ++n) {
    const double nd = static_cast<double>(n);
    head += std::pow(nd, -s) * -std::expm1(-f * nd);
  }
  const double x = static_cast<double>(start);
  const double z = f * x;
  const double t = 1.0 - s;
  const bool integer_t = std::fabs(t - std::round(t)) < 1e-9;
  if (z >= 1.0 || integer_t) {
    return head + em_laplace_tail(s, 0.0, x) - em_laplace_tail(s, f, x);
  }
  // int_z^inf y^{t-1} (1 - e^{-y}) dy = -Gamma(t) + sum_{k>=1} (-1)^k z^{t+k} / (k! (t+k)).
  double series = 0.0;
  double zk = 1.0;
  double fact = 1.0;
  for (int k = 1; k < 60; ++k) {
    zk *= z;
    fact *= k;
    const double term = (k % 2 ? -1.0 : 1.0) * std::pow(z, t) * zk / (fact * (t + k));
    series += term;
    if (std::fabs(term) < 1e-18 * std::fabs(series)) break;
  }
  const double integral = std::pow(f, s - 1.0) * (-boost::math::tgamma(t) + series);
  double sum = integral + 0.5 * std::pow(x, -s) * -std::expm1(-z);
  for (std::size_t k = 0; k < kBernoulliOverFactorial.size(); ++k) {
    const int m = static_cast<int>(2 * k + 1);
    sum += kBernoulliOverFactorial[k] * (neg_odd_derivative(s, 0.0, x, m) - neg_odd_derivative(s, f, x, m));
  }
  return head + sum;
}

double power_log_tail_sum(double s, std::size_t a) {
  if (a == 0) throw InvalidParameter("power series start must be >= 1");
  if (!(s > 1.0)) return kInf;
  const std::size_t start = std::max(a, kEulerMaclaurinStart);
  double head = 0.0;
  for (std::size_t n = a; n < start; ++n) {
    const double nd = static_cast<double>(n);
    head += std::log(nd) * std::pow(nd, -s);
  }
  const double x = static_cast<double>(start);
  const double lx = std::log(x);
  const double sm1 = s - 1.0;
  const double integral = std::pow(x, -sm1) * (lx / sm1 + 1.0 / (sm1 * sm1));
  // Derivatives of g(x) = x^{-s} log x.
  const double g1 = std::pow(x, -s - 1.0) * (1.0 - s * lx);
  const double g3 = std::pow(x, -s - 3.0) *
                    ((s + 2.0) * (2.0 * s + 1.0) + s * (s + 1.0) - s * (s + 1.0) * (s + 2.0) * lx);
  return head + integral + 0.5 * lx * std::pow(x, -s) - kBernoulliOverFactorial[0] * g1 -
         kBernoulliOverFactorial[1] * g3;
}

double zeta(double s) {
  if (!(s > 1.0)) throw InvalidParameter("zeta: s must exceed 1");
  return power_tail_sum(s, 1);
}

double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return -kInf;
  const double m = *std::max_element(xs.begin(), xs.end());
  if (m == -kInf) return -kInf;
  if (m == kInf) return kInf;
  double sum = 0.0;
  for (double x : xs) sum += std::exp(x - m);
  return m + std::log(sum);
}

RootResult solve_increasing(const std::function<double(double)>& g,
                            const std::function<double(double)>& dg, double lo, double hi,
                            double abs_tol, int max_iter) {
  if (!(lo <= hi)) throw InvalidParameter("solve_increasing: empty bracket");
  double glo = g(lo);
  double ghi = g(hi);
  if (glo > 0.0 || ghi < 0.0) throw InvalidParameter("solve_increasing: root not bracketed");
  if (glo == 0.0) return {lo, 0.0, 0};
  if (ghi == 0.0) return {hi, 0.0, 0};

  double best = std::fabs(glo) < std::fabs(ghi) ? lo : hi;
  double gbest = std::min(std::fabs(glo), std::fabs(ghi));
  double x = best;
  double gx = std::fabs(glo) < std::fabs(ghi) ? glo : ghi;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  for (int it = 1; it <= max_iter; ++it) {
    double next;
    if (lo > 0.0 && hi / lo > 4.0) {
      next = std::sqrt(lo * hi);
    } else {
      next = 0.5 * (lo + hi);
      if (dg) {
        const double slope = dg(x);
        if (slope > 0.0 && std::isfinite(slope)) {
          const double newton = x - gx / slope;
          if (newton > lo && newton < hi) {
            if (std::fabs(newton - x) <= 2.0 * eps * std::fabs(x)) {
              return {x, gx, it};
            }
            next = newton;
          }
        }
      }
    }
    x = next;
    gx = g(x);
    if (std::fabs(gx) < gbest) {
      gbest = std::fabs(gx);
      best = x;
    }
    if (gx == 0.0 || std::fabs(gx) <= abs_tol) return {x, gx, it};
    if (gx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= 4.0 * eps * std::max(std::fabs(lo), std::fabs(hi))) {
      return {best, gbest, it};
    }
  }
  return {best, gbest, max_iter};
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidParameter("fit_slope: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

MeanStderr mean_and_stderr(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  const bool all_equal =
      std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); });
  if (all_equal) return {values.front(), 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double var = ss / static_cast<double>(values.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(values.size()))};
}

}  // namespace pinlab::numerics
