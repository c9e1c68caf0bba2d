#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "erasurelab/channel.hpp"
#include "erasurelab/coding.hpp"
#include "erasurelab/decoder.hpp"

namespace erasurelab {

/// Cap on exhaustive enumeration. The default of 2^24 points keeps the exact
/// suites fast; ERASURELAB_BUDGET_OVERRIDE=<points> (or "unlimited") lifts it.
struct EnumerationBudget {
  static constexpr std::uint64_t kDefaultPoints = std::uint64_t{1} << 24;
  std::uint64_t max_points = kDefaultPoints;

  static EnumerationBudget from_environment();
  // Throws BudgetExceeded when `points` (a double, to survive overflow) is
  // above the cap.
  void require(double points, const std::string& what) const;
};

struct MessageErrors {
  double correct = 0.0;
  double erasure = 0.0;
  double undetected = 0.0;
  double total() const { return erasure + undetected; }
};

/// Exact error probabilities. `per_message` is filled for single codebooks
/// and left empty for ensemble averages.
struct ExactErrors {
  std::vector<MessageErrors> per_message;
  double p_correct = 0.0;
  double p_erasure = 0.0;
  double p_undetected = 0.0;
  double p_total() const { return p_erasure + p_undetected; }
};

// Exhaustive sum over y in Z_d^n of Pr(E1|C) and Pr(E2|C) per message.
ExactErrors exact_error_probs(const Codebook& cb, const AdditiveChannel& ch,
                              const DecoderSpec& spec,
                              EnumerationBudget budget = EnumerationBudget::from_environment(),
                              unsigned workers = 1);

enum class EnsembleMethod {
  // First codeword fixed to 0^n by group symmetry; the other M-1 enumerated.
  first_codeword_fixed,
  // Every codebook in (Z_d^n)^M, averaged over messages. Reference path.
  full_enumeration,
};

// E_C[Pr(E_i|C)] under uniform random coding, by exhaustive enumeration.
ExactErrors exact_ensemble(std::size_t n, std::size_t d, std::size_t m,
                           const AdditiveChannel& ch, const DecoderSpec& spec,
                           EnsembleMethod method = EnsembleMethod::first_codeword_fixed,
                           EnumerationBudget budget = EnumerationBudget::from_environment(),
                           unsigned workers = 1);

// Exact ensemble averages for the information-spectrum rule in product form:
// each codeword clears the level independently, so with p = Pr(own word
// clears) and q = Pr(a uniform word clears),
//   correct = p (1-q)^(M-1),  undetected = (1-p) (M-1) q (1-q)^(M-2).
// Sums run over n-types, so this scales to codebooks far beyond enumeration.
ExactErrors exact_ensemble_infospec(std::size_t n, const AdditiveChannel& ch, std::uint64_t m,
                                    const InfoSpecRule& rule);

// E[N^s] for N ~ Binomial(L, M2/M1), with 0^0 = 1.
double exact_EN_s(std::uint64_t L, std::uint64_t M1, std::uint64_t M2, double s);

// floor(L M2/M1 (1-eps))^s * (1 - exp(-L M2/(2 M1) eps^2)), s > 0, 0 < eps < 1.
double concentration_bound(std::uint64_t L, std::uint64_t M1, std::uint64_t M2, double s,
                           double eps);

// log A = -n log d - n psi(s).
double exact_A(std::size_t n, const NoiseDistribution& p, double s);

// log( d^-n sum_x P^n(y - x)^(1-s) ) by enumeration over x in Z_d^n.
double enumerate_A(std::size_t n, const NoiseDistribution& p, double s, WordView y,
                   EnumerationBudget budget = EnumerationBudget::from_environment());

// CSV with instance parameters, decoder id, p_total and p_undetected.
struct OracleRow {
  std::size_t n = 0;
  std::size_t d = 0;
  std::uint64_t m = 0;
  std::string decoder;
  double threshold = 0.0;  // T for Forney, margin for infospec
  std::string scope;       // "codebook" or "ensemble"
  std::uint64_t seed = 0;
  ExactErrors errors;
};
void write_oracle_csv(std::ostream& out, const std::vector<OracleRow>& rows);

}  // namespace erasurelab
