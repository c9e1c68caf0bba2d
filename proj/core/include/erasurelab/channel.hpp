#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "erasurelab/error.hpp"
#include "erasurelab/probmodel.hpp"
#include "erasurelab/rng.hpp"

namespace erasurelab {

using Symbol = std::uint8_t;
using Word = std::vector<Symbol>;
using WordView = std::span<const Symbol>;

class GeneralDmc;

/// Additive channel Y = X + Z (mod d), Z ~ P, so W(y|x) = P(y - x mod d).
class AdditiveChannel {
 public:
  static constexpr std::size_t kMaxAlphabet = 256;

  explicit AdditiveChannel(NoiseDistribution noise);

  std::size_t d() const { return noise_.size(); }
  const NoiseDistribution& noise() const { return noise_; }

  // log W(y|x) for single letters.
  double log_w(Symbol y, Symbol x) const {
    return noise_.log_prob(static_cast<std::size_t>((y + d() - x) % d()));
  }

  // C = log d - H(P), nats.
  double capacity() const;

  GeneralDmc to_general() const;

  // Draws one noise symbol from P.
  Symbol sample_noise(Rng& rng) const;

 private:
  NoiseDistribution noise_;
  std::vector<double> cdf_;
};

// sum_i log P(y_i - x_i mod d). Throws InvalidArgument on length mismatch.
double log_likelihood(const AdditiveChannel& ch, WordView x, WordView y);

// y = x + z with z i.i.d. from the noise distribution.
Word sample_output(const AdditiveChannel& ch, WordView x, Rng& rng);

/// Row-stochastic transition matrix W(y|x); rows are inputs.
class GeneralDmc {
 public:
  static constexpr double kRowTolerance = 1e-12;

  explicit GeneralDmc(std::vector<std::vector<double>> rows);

  std::size_t inputs() const { return rows_.size(); }
  std::size_t outputs() const { return rows_.front().size(); }
  double w(std::size_t y, std::size_t x) const { return rows_[x][y]; }
  const std::vector<double>& row(std::size_t x) const { return rows_[x]; }

  // Output distribution P_X W.
  std::vector<double> output_distribution(std::span<const double> px) const;

 private:
  std::vector<std::vector<double>> rows_;
};

// Reads a whitespace-separated matrix, one input per line. Blank lines and
// lines starting with '#' are ignored.
GeneralDmc load_dmc_matrix(const std::filesystem::path& path);

struct CapacityResult {
  double capacity = 0.0;           // nats; the mutual information at input_dist
  std::vector<double> input_dist;  // one capacity-achieving input distribution
  std::size_t iterations = 0;
  double gap = 0.0;                // upper bound minus capacity, >= 0
  std::vector<double> history;     // mutual information after each iteration
};

/// Thrown when Blahut-Arimoto does not certify its gap within max_iter.
class CapacityNotConverged : public SolverFailure {
 public:
  CapacityNotConverged(const std::string& what, CapacityResult best)
      : SolverFailure(what), best_(std::move(best)) {}
  const CapacityResult& best() const { return best_; }

 private:
  CapacityResult best_;
};

// Blahut-Arimoto iteration from the uniform input. Stops when
// max_x D(W(.|x) || P_X W) - I(P_X, W) <= tol, which bounds the distance
// to capacity.
CapacityResult blahut_arimoto(const GeneralDmc& w, double tol = 1e-12,
                              std::size_t max_iter = 100000);

// V(P_X, W): input-averaged variance of the information density.
double cond_info_variance(const GeneralDmc& w, std::span<const double> px);

// U(P_X, W): variance of the information density centred at `capacity`.
double uncond_info_variance(const GeneralDmc& w, std::span<const double> px,
                            double capacity);

/// Dispersion reported for a channel. Exact for additive channels (where
/// V_min = V_max = V(P)); for general channels only V at one returned caid.
struct DispersionReport {
  double capacity = 0.0;
  double dispersion = 0.0;
  std::vector<double> caid;
  bool exact = false;  // true only when V_min = V_max is known to hold
};

DispersionReport dispersion(const AdditiveChannel& ch);
DispersionReport dispersion(const GeneralDmc& w, double tol = 1e-12);

}  // namespace erasurelab
