#include "erasurelab/probmodel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "erasurelab/error.hpp"
#include "erasurelab/logmath.hpp"

namespace erasurelab {

NoiseDistribution::NoiseDistribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.size() < 2) {
    throw InvalidArgument("noise distribution needs at least two symbols");
  }
  CompensatedSum total;
  for (double p : probs_) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw InvalidArgument("noise probabilities must lie in (0, 1], got " +
                            std::to_string(p));
    }
    total.add(p);
  }
  if (std::abs(total.value() - 1.0) > kSumTolerance) {
    throw InvalidArgument("noise probabilities sum to " +
                          std::to_string(total.value()) + ", not 1");
  }
  log_probs_.reserve(probs_.size());
  for (double p : probs_) log_probs_.push_back(std::log(p));
}

NoiseDistribution NoiseDistribution::uniform(std::size_t d) {
  if (d < 2) throw InvalidArgument("alphabet size must be at least 2");
  return NoiseDistribution(std::vector<double>(d, 1.0 / static_cast<double>(d)));
}

double entropy(const NoiseDistribution& p) {
  CompensatedSum h;
  for (std::size_t z = 0; z < p.size(); ++z) h.add(-p.prob(z) * p.log_prob(z));
  return h.value();
}

double varentropy(const NoiseDistribution& p) {
  const double h = entropy(p);
  CompensatedSum v;
  for (std::size_t z = 0; z < p.size(); ++z) {
    const double dev = -p.log_prob(z) - h;
    v.add(p.prob(z) * dev * dev);
  }
  return v.value();
}

double renyi_cgf(const NoiseDistribution& p, double s) {
  // sum_z P^(1-s) = 1 + sum_z P (exp(-s log P) - 1) + (sum_z P - 1); the
  // expm1/log1p form keeps full relative accuracy for small |s|.
  CompensatedSum excess;
  for (std::size_t z = 0; z < p.size(); ++z) {
    excess.add(p.prob(z) * std::expm1(-s * p.log_prob(z)));
  }
  CompensatedSum mass;
  for (std::size_t z = 0; z < p.size(); ++z) mass.add(p.prob(z));
  mass.add(-1.0);
  return -std::log1p(excess.value() + mass.value());
}

double gaussian_pdf(double x) {
  return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

double gaussian_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

}  // namespace erasurelab
