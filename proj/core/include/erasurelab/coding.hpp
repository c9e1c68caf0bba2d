#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "erasurelab/channel.hpp"
#include "erasurelab/error.hpp"

namespace erasurelab {

/// Knobs of one experiment: blocklength n, back-off exponent t, code-size
/// back-off a, threshold scale b and the channel capacity (nats).
///   log M_n = n C - a n^(1-t),   T_n = b n^(-t).
struct RegimeParams {
  std::size_t n = 0;
  double t = 0.5;
  double a = 0.0;
  double b = 0.0;
  double capacity = 0.0;

  // Throws InvalidArgument unless 0 < t <= 1/2, b > 0, n >= 1, and a > b
  // whenever t < 1/2.
  void validate() const;

  // n^(1-t)
  double backoff_scale() const;
  // n C - a n^(1-t), the unrounded log code size.
  double log_code_size() const;
  // n T_n = b n^(1-t), the log-likelihood-ratio margin used by both decoders.
  double log_threshold() const;
};

inline constexpr std::uint64_t kMaxCodeSize = std::uint64_t{1} << 31;

// Nearest integer to exp(n C - a n^(1-t)). Throws InfeasibleSchedule when the
// exponent is below log 2 or the result exceeds kMaxCodeSize.
std::uint64_t code_size(const RegimeParams& params);

// T_n = b / n^t.
double threshold(const RegimeParams& params);

/// M codewords of length n over Z_d, stored row-major.
class Codebook {
 public:
  Codebook(std::size_t n, std::size_t d, std::vector<Symbol> symbols,
           std::uint64_t seed = 0, std::optional<RegimeParams> schedule = std::nullopt);

  std::size_t n() const { return n_; }
  std::size_t d() const { return d_; }
  std::size_t size() const { return n_ == 0 ? 0 : symbols_.size() / n_; }
  std::uint64_t seed() const { return seed_; }
  const std::optional<RegimeParams>& schedule() const { return schedule_; }

  WordView word(std::size_t m) const { return WordView(symbols_).subspan(m * n_, n_); }
  std::span<const Symbol> symbols() const { return symbols_; }

  friend bool operator==(const Codebook& a, const Codebook& b) {
    return a.n_ == b.n_ && a.d_ == b.d_ && a.symbols_ == b.symbols_;
  }

 private:
  std::size_t n_;
  std::size_t d_;
  std::vector<Symbol> symbols_;
  std::uint64_t seed_;
  std::optional<RegimeParams> schedule_;
};

// M * n symbols i.i.d. uniform on Z_d, drawn from stream split(seed, 0).
Codebook sample_codebook(std::size_t n, std::size_t d, std::size_t m, std::uint64_t seed);

// Same, filling the symbols in place from an existing stream.
void fill_uniform(std::span<Symbol> out, std::size_t d, Rng& rng);

// Binary layout, little-endian:
//   "ERLB" | version u16 | n u32 | d u16 | M u64 | seed u64 | M*n bytes
inline constexpr std::uint16_t kCodebookFormatVersion = 1;
void write_codebook(std::ostream& out, const Codebook& cb);
Codebook read_codebook(std::istream& in);

struct ErrorPair {
  double total = 0.0;       // Pr(E1 | C)
  double undetected = 0.0;  // Pr(E2 | C)
};

// Per-codebook error probabilities, exact or estimated.
using CodebookEstimator = std::function<ErrorPair(const Codebook&)>;

struct DerandomizeResult {
  Codebook codebook;
  ErrorPair errors;
  std::size_t rejections = 0;
};

class DerandomizeFailure : public SolverFailure {
 public:
  DerandomizeFailure(const std::string& what, std::size_t tried, ErrorPair best_total,
                     ErrorPair best_undetected)
      : SolverFailure(what), tried_(tried), best_total_(best_total),
        best_undetected_(best_undetected) {}
  std::size_t tried() const { return tried_; }
  // Candidates minimising each error component.
  ErrorPair best_total() const { return best_total_; }
  ErrorPair best_undetected() const { return best_undetected_; }

 private:
  std::size_t tried_;
  ErrorPair best_total_;
  ErrorPair best_undetected_;
};

// Markov-inequality derandomization with theta = 1/2: returns the first
// candidate codebook with Pr(E1|C) <= 2 target.total and
// Pr(E2|C) <= 2 target.undetected.
DerandomizeResult derandomize(std::size_t n, std::size_t d, std::size_t m, ErrorPair targets,
                              std::span<const std::uint64_t> candidate_seeds,
                              const CodebookEstimator& estimator);

// Schedule form: M = code_size(params), alphabet from the channel.
DerandomizeResult derandomize(const RegimeParams& params, const AdditiveChannel& ch,
                              ErrorPair targets, std::span<const std::uint64_t> candidate_seeds,
                              const CodebookEstimator& estimator);

}  // namespace erasurelab
