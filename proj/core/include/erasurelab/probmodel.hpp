#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace erasurelab {

/// Probability vector on the additive group Z_d with strictly positive
/// entries. Validated once at construction and immutable afterwards; inputs
/// that do not sum to one within 1e-12 are rejected, never renormalized.
class NoiseDistribution {
 public:
  static constexpr double kSumTolerance = 1e-12;

  explicit NoiseDistribution(std::vector<double> probs);

  std::size_t size() const { return probs_.size(); }
  double prob(std::size_t z) const { return probs_[z]; }
  double log_prob(std::size_t z) const { return log_probs_[z]; }
  std::span<const double> probs() const { return probs_; }
  std::span<const double> log_probs() const { return log_probs_; }

  // Uniform distribution on Z_d.
  static NoiseDistribution uniform(std::size_t d);

 private:
  std::vector<double> probs_;
  std::vector<double> log_probs_;
};

// Shannon entropy in nats.
double entropy(const NoiseDistribution& p);

// Variance of the self-information -log P(Z), Z ~ P.
double varentropy(const NoiseDistribution& p);

// psi(s) = -log sum_z P(z)^(1-s). psi(0) = 0, psi'(0) = -H, psi''(0) = -V.
double renyi_cgf(const NoiseDistribution& p, double s);

// Standard normal density and distribution function.
double gaussian_pdf(double x);
double gaussian_cdf(double x);

}  // namespace erasurelab
