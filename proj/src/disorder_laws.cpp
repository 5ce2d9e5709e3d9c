#include "pinlab/disorder_laws.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "pinlab/errors.hpp"
#include "pinlab/numerics.hpp"

namespace pinlab {
namespace {

constexpr double kStandardizationTol = 1e-10;

double linear_density(const std::vector<double>& grid, const std::vector<double>& density,
                      std::size_t i, double x) {
  const double t = (x - grid[i]) / (grid[i + 1] - grid[i]);
  return density[i] + (density[i + 1] - density[i]) * t;
}

double integrate_segment(const std::vector<double>& grid, const std::vector<double>& density,
                         std::size_t i, double lambda, double shift, int moment) {
  auto f = [&](double x) {
    return std::pow(x, moment) * std::exp(lambda * (x - shift)) * linear_density(grid, density, i, x);
  };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, grid[i], grid[i + 1], 20,
                                                                        1e-14, &err);
}

}  // namespace

DisorderLaw DisorderLaw::gaussian() {
  DisorderLaw d;
  d.family_ = DisorderFamily::gaussian;
  return d;
}

DisorderLaw DisorderLaw::rademacher() {
  DisorderLaw d;
  d.family_ = DisorderFamily::rademacher;
  d.values_ = {-1.0, 1.0};
  d.probs_ = {0.5, 0.5};
  return d;
}

DisorderLaw DisorderLaw::discrete(std::vector<double> values, std::vector<double> probs) {
  if (values.empty() || values.size() != probs.size()) {
    throw InvalidParameter("discrete disorder needs matching nonempty values and probs");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw InvariantViolation("disorder.nonnegative", "negative probability");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-12) {
    throw InvariantViolation("disorder.normalization", "probabilities sum to " + std::to_string(total));
  }
  double mean = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) mean += probs[i] * values[i];
  double var = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) var += probs[i] * (values[i] - mean) * (values[i] - mean);
  if (!(var > 0.0)) throw InvalidParameter("discrete disorder must be nondegenerate");
  const double sd = std::sqrt(var);
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  DisorderLaw d;
  d.family_ = DisorderFamily::discrete_table;
  for (auto i : order) {
    d.values_.push_back((values[i] - mean) / sd);
    d.probs_.push_back(probs[i]);
  }
  return d;
}

DisorderLaw DisorderLaw::continuous(std::vector<double> grid, std::vector<double> density) {
  if (grid.size() < 2 || grid.size() != density.size()) {
    throw InvalidParameter("continuous disorder needs >= 2 grid points with matching density");
  }
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!(grid[i + 1] > grid[i])) throw InvalidParameter("continuous disorder grid must increase");
  }
  for (double v : density) {
    if (!(v >= 0.0)) throw InvariantViolation("disorder.nonnegative", "negative density");
  }
  double mass = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    mass += integrate_segment(grid, density, i, 0.0, 0.0, 0);
    m1 += integrate_segment(grid, density, i, 0.0, 0.0, 1);
    m2 += integrate_segment(grid, density, i, 0.0, 0.0, 2);
  }
  if (!(mass > 0.0)) throw InvalidParameter("continuous disorder has zero mass");
  const double mean = m1 / mass;
  const double var = m2 / mass - mean * mean;
  if (!(var > 0.0)) throw InvalidParameter("continuous disorder must be nondegenerate");
  const double sd = std::sqrt(var);
  DisorderLaw d;
  d.family_ = DisorderFamily::continuous_table;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    d.grid_.push_back((grid[i] - mean) / sd);
    d.density_.push_back(density[i] * sd / mass);
  }
  // Recheck the standardization after the affine map.
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;
  for (std::size_t i = 0; i + 1 < d.grid_.size(); ++i) {
    c0 += d.segment_integral(i, 0.0, 0.0, 0);
    c1 += d.segment_integral(i, 0.0, 0.0, 1);
    c2 += d.segment_integral(i, 0.0, 0.0, 2);
  }
  if (std::fabs(c0 - 1.0) > kStandardizationTol || std::fabs(c1) > kStandardizationTol ||
      std::fabs(c2 - 1.0) > kStandardizationTol) {
    throw InvariantViolation("disorder.standardized", "mean/variance not 0/1 after scaling");
  }
  return d;
}

std::string DisorderLaw::family_name() const {
  switch (family_) {
    case DisorderFamily::gaussian:
      return "gaussian";
    case DisorderFamily::rademacher:
      return "rademacher";
    case DisorderFamily::discrete_table:
      return "discrete-table";
    case DisorderFamily::continuous_table:
      return "bounded-continuous-table";
  }
  return "gaussian";
}

double DisorderLaw::segment_integral(std::size_t i, double lambda, double shift, int moment) const {
  return integrate_segment(grid_, density_, i, lambda, shift, moment);
}

double DisorderLaw::w() const {
  switch (family_) {
    case DisorderFamily::gaussian:
      return numerics::kInf;
    case DisorderFamily::rademacher:
    case DisorderFamily::discrete_table: {
      for (std::size_t i = values_.size(); i-- > 0;) {
        if (probs_[i] > 0.0) return values_[i];
      }
      return values_.back();
    }
    case DisorderFamily::continuous_table: {
      for (std::size_t i = grid_.size() - 1; i > 0; --i) {
        if (density_[i] > 0.0 || density_[i - 1] > 0.0) return grid_[i];
      }
      return grid_.back();
    }
  }
  return numerics::kInf;
}

double DisorderLaw::atom_at_w() const {
  if (!finitely_supported()) return 0.0;
  for (std::size_t i = values_.size(); i-- > 0;) {
    if (probs_[i] > 0.0) return probs_[i];
  }
  return 0.0;
}

double DisorderLaw::log_mgf(double lambda) const {
  switch (family_) {
    case DisorderFamily::gaussian:
      return 0.5 * lambda * lambda;
    case DisorderFamily::rademacher: {
      const double a = std::fabs(lambda);
      return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
    }
    case DisorderFamily::discrete_table: {
      std::vector<double> terms(values_.size());
      for (std::size_t i = 0; i < values_.size(); ++i) {
        terms[i] = probs_[i] > 0.0 ? std::log(probs_[i]) + lambda * values_[i] : -numerics::kInf;
      }
      return numerics::log_sum_exp(terms);
    }
    case DisorderFamily::continuous_table: {
      const double shift = lambda >= 0.0 ? w() : grid_.front();
      double s = 0.0;
      for (std::size_t i = 0; i + 1 < grid_.size(); ++i) s += segment_integral(i, lambda, shift, 0);
      return lambda * shift + std::log(s);
    }
  }
  return 0.0;
}

double DisorderLaw::mgf(double lambda) const {
  switch (family_) {
    case DisorderFamily::gaussian:
      return std::exp(0.5 * lambda * lambda);
    case DisorderFamily::rademacher:
      return std::cosh(lambda);
    default:
      return std::exp(log_mgf(lambda));
  }
}

double DisorderLaw::tilted_mean(double lambda) const {
  switch (family_) {
    case DisorderFamily::gaussian:
      return lambda;
    case DisorderFamily::rademacher:
      return std::tanh(lambda);
    case DisorderFamily::discrete_table: {
      const double lm = log_mgf(lambda);
      double m = 0.0;
      for (std::size_t i = 0; i < values_.size(); ++i) {
        if (probs_[i] > 0.0) m += values_[i] * std::exp(std::log(probs_[i]) + lambda * values_[i] - lm);
      }
      return m;
    }
    case DisorderFamily::continuous_table: {
      const double shift = lambda >= 0.0 ? w() : grid_.front();
      double z = 0.0, m1 = 0.0;
      for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
        z += segment_integral(i, lambda, shift, 0);
        m1 += segment_integral(i, lambda, shift, 1);
      }
      return m1 / z;
    }
  }
  return 0.0;
}

nlohmann::json to_json(const DisorderLaw& law) {
  nlohmann::json j;
  j["family"] = law.family_name();
  if (law.family() == DisorderFamily::discrete_table) {
    j["table"] = {{"values", law.values()}, {"probs", law.probs()}};
  } else if (law.family() == DisorderFamily::continuous_table) {
    j["table"] = {{"grid", law.grid()}, {"density", law.density()}};
  }
  return j;
}

DisorderLaw disorder_from_json(const nlohmann::json& j) {
  const auto family = j.at("family").get<std::string>();
  if (family == "gaussian") return DisorderLaw::gaussian();
  if (family == "rademacher") return DisorderLaw::rademacher();
  if (family == "discrete-table") {
    const auto& t = j.at("table");
    return DisorderLaw::discrete(t.at("values").get<std::vector<double>>(),
                                 t.at("probs").get<std::vector<double>>());
  }
  if (family == "bounded-continuous-table") {
    const auto& t = j.at("table");
    return DisorderLaw::continuous(t.at("grid").get<std::vector<double>>(),
                                   t.at("density").get<std::vector<double>>());
  }
  throw InvalidParameter("unknown disorder family '" + family + "'");
}

double TiltedLaw::density_ratio(double x) const { return std::exp(beta * x - base.log_mgf(beta)); }

double mgf(const DisorderLaw& law, double lambda) { return law.mgf(lambda); }

TiltedLaw tilt(const DisorderLaw& law, double beta) { return {law, beta, law.mgf(beta)}; }

double relative_entropy_tilt(const DisorderLaw& law, double beta) {
  if (beta == 0.0) return 0.0;
  const double h = beta * law.tilted_mean(beta) - law.log_mgf(beta);
  return std::max(h, 0.0);
}

double xi(const DisorderLaw& law, double beta) {
  return std::exp(law.log_mgf(2.0 * beta) - 2.0 * law.log_mgf(beta));
}

TiltedSampler::TiltedSampler(const DisorderLaw& law, double beta) : law_(&law), beta_(beta) {
  if (law.finitely_supported()) {
    const double lm = law.log_mgf(beta);
    double c = 0.0;
    for (std::size_t i = 0; i < law.values().size(); ++i) {
      if (law.probs()[i] > 0.0) c += std::exp(std::log(law.probs()[i]) + beta * law.values()[i] - lm);
      cumulative_.push_back(c);
    }
  } else if (law.family() == DisorderFamily::continuous_table) {
    const auto& g = law.grid();
    const auto& d = law.density();
    const double shift = beta >= 0.0 ? law.w() : g.front();
    double c = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
      c += integrate_segment(g, d, i, beta, shift, 0);
      cumulative_.push_back(c);
      // Max of (d0 + s t) e^{beta (x - shift)} over the segment.
      const double L = g[i + 1] - g[i];
      const double slope = (d[i + 1] - d[i]) / L;
      auto value = [&](double t) { return (d[i] + slope * t) * std::exp(beta * (g[i] + t - shift)); };
      double m = std::max(value(0.0), value(L));
      if (beta != 0.0 && slope != 0.0) {
        const double t = -(slope + beta * d[i]) / (beta * slope);
        if (t > 0.0 && t < L) m = std::max(m, value(t));
      }
      segment_max_.push_back(m);
    }
  }
}

double TiltedSampler::operator()(RngStream& stream) const {
  switch (law_->family()) {
    case DisorderFamily::gaussian:
      return stream.normal() + beta_;
    case DisorderFamily::rademacher:
    case DisorderFamily::discrete_table: {
      const double u = stream.uniform01() * cumulative_.back();
      auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      if (it == cumulative_.end()) --it;
      return law_->values()[static_cast<std::size_t>(it - cumulative_.begin())];
    }
    case DisorderFamily::continuous_table: {
      const auto& g = law_->grid();
      const auto& d = law_->density();
      const double u = stream.uniform01() * cumulative_.back();
      auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      if (it == cumulative_.end()) --it;
      const auto i = static_cast<std::size_t>(it - cumulative_.begin());
      const double shift = beta_ >= 0.0 ? law_->w() : g.front();
      const double L = g[i + 1] - g[i];
      const double slope = (d[i + 1] - d[i]) / L;
      for (;;) {
        const double t = stream.uniform01() * L;
        const double target = (d[i] + slope * t) * std::exp(beta_ * (g[i] + t - shift));
        if (stream.uniform01() * segment_max_[i] <= target) return g[i] + t;
      }
    }
  }
  return 0.0;
}

std::vector<double> sample(const DisorderLaw& law, RngStream& stream, std::size_t count) {
  const TiltedSampler s(law, 0.0);
  std::vector<double> out(count);
  for (auto& x : out) x = s(stream);
  return out;
}

std::vector<double> sample(const TiltedLaw& law, RngStream& stream, std::size_t count) {
  const TiltedSampler s(law.base, law.beta);
  std::vector<double> out(count);
  for (auto& x : out) x = s(stream);
  return out;
}

}  // namespace pinlab
