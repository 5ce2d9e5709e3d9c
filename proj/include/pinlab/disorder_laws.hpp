#pragma once

// Charge distributions mu0 (mean 0, variance 1), their moment generating
// functions, exponential tilts mu_beta and samplers.

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "pinlab/rng.hpp"

namespace pinlab {

enum class DisorderFamily { gaussian, rademacher, discrete_table, continuous_table };

class DisorderLaw {
 public:
  static DisorderLaw gaussian();
  static DisorderLaw rademacher();
  // Finite law; values are shifted and scaled to mean 0, variance 1.
  static DisorderLaw discrete(std::vector<double> values, std::vector<double> probs);
  // Piecewise-linear density on a bounded grid; normalized, then standardized.
  static DisorderLaw continuous(std::vector<double> grid, std::vector<double> density);

  DisorderFamily family() const { return family_; }
  std::string family_name() const;
  // Essential supremum of the support (+inf for gaussian).
  double w() const;
  // mu0({w}).
  double atom_at_w() const;

  double mgf(double lambda) const;
  double log_mgf(double lambda) const;
  // M'(lambda) / M(lambda), the mean of mu_lambda.
  double tilted_mean(double lambda) const;

  // Discrete support (empty for continuous families).
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& probs() const { return probs_; }
  // Continuous table (empty otherwise).
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& density() const { return density_; }
  bool finitely_supported() const {
    return family_ == DisorderFamily::rademacher || family_ == DisorderFamily::discrete_table;
  }

 private:
  DisorderLaw() = default;
  double segment_integral(std::size_t i, double lambda, double shift, int moment) const;

  DisorderFamily family_ = DisorderFamily::gaussian;
  std::vector<double> values_;
  std::vector<double> probs_;
  std::vector<double> grid_;
  std::vector<double> density_;
};

nlohmann::json to_json(const DisorderLaw& law);
DisorderLaw disorder_from_json(const nlohmann::json& j);

// mu_beta with d mu_beta / d mu0 (x) = e^{beta x} / M(beta).
struct TiltedLaw {
  DisorderLaw base;
  double beta;
  double normalizer;  // M(beta)
  double mean() const { return base.tilted_mean(beta); }
  // Radon-Nikodym derivative with respect to the base law.
  double density_ratio(double x) const;
};

double mgf(const DisorderLaw& law, double lambda);
TiltedLaw tilt(const DisorderLaw& law, double beta);
// h(mu_beta | mu0) = beta M'(beta)/M(beta) - log M(beta).
double relative_entropy_tilt(const DisorderLaw& law, double beta);
// Xi(beta) = M(2 beta) / M(beta)^2.
double xi(const DisorderLaw& law, double beta);

// Draws from mu_beta (beta = 0 gives mu0). The randomness consumed per draw does
// not depend on beta for gaussian and finite laws, so draws at different beta
// from the same stream are coupled monotonically.
class TiltedSampler {
 public:
  TiltedSampler(const DisorderLaw& law, double beta);
  double operator()(RngStream& stream) const;

 private:
  const DisorderLaw* law_;
  double beta_;
  std::vector<double> cumulative_;  // tilted CDF over atoms or segments
  std::vector<double> segment_max_;
};

std::vector<double> sample(const DisorderLaw& law, RngStream& stream, std::size_t count);
std::vector<double> sample(const TiltedLaw& law, RngStream& stream, std::size_t count);

}  // namespace pinlab
