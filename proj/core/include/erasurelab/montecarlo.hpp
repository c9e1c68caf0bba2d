#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "erasurelab/channel.hpp"
#include "erasurelab/coding.hpp"
#include "erasurelab/decoder.hpp"
#include "erasurelab/rng.hpp"

namespace erasurelab {

// Law of the channel output when sampling
//   F_n = log sum_{m' != 1} W^n(Y|X_m') - log W^n(Y|X_1).
enum class Measure {
  P,       // Y drawn from the transmitted codeword X_1
  QPrime,  // Y drawn from a uniformly chosen wrong codeword X_m', m' != 1
};

enum class SamplerKind {
  automatic,
  // Draws the M x n codebook explicitly: O(M n) per sample.
  explicit_codebook,
  // Draws the type-class enumerators of the shifted competitor words as one
  // multinomial over n-types: O(#types) per sample, independent of M. Exact
  // in distribution because, given Y, the shifted words Y - X_m' of the
  // competitors are i.i.d. uniform and W^n(Y|X_m') depends only on their type.
  type_enumerator,
};

std::string to_string(SamplerKind k);
SamplerKind sampler_from_string(const std::string& s);

/// Random-coding experiment over an additive channel: M uniform codewords of
/// length n and the Forney margin n T_n.
struct McConfig {
  AdditiveChannel channel;
  std::size_t n = 0;
  std::uint64_t M = 2;
  double log_threshold = 0.0;  // n T_n = b n^(1-t)
  SamplerKind sampler = SamplerKind::automatic;
  unsigned workers = 1;
  double z = 1.96;

  // M = code_size(params), n T_n = b n^(1-t).
  static McConfig from_regime(const AdditiveChannel& ch, const RegimeParams& params);
  void validate() const;
};

struct FnSample {
  double value = 0.0;
  Measure measure = Measure::P;
};

/// Draws F_n realizations. Construction precomputes the type tables when the
/// type-enumerator path is selected; sample() is const and thread-safe.
class FnSampler {
 public:
  explicit FnSampler(const McConfig& config);
  ~FnSampler();
  FnSampler(FnSampler&&) noexcept;
  FnSampler& operator=(FnSampler&&) noexcept;

  FnSample sample(Measure measure, Rng& rng) const;
  SamplerKind kind() const { return kind_; }

 private:
  struct TypeTables;
  McConfig config_;
  SamplerKind kind_;
  std::unique_ptr<TypeTables> tables_;
  double sample_explicit(Measure measure, Rng& rng) const;
  double sample_types(Measure measure, Rng& rng) const;
};

// One F_n realization; builds a sampler per call, prefer FnSampler in loops.
FnSample sample_Fn(const McConfig& config, Rng& rng, Measure measure);

// trials realizations; sample k uses stream split(seed, k).
std::vector<double> sample_Fn_batch(const McConfig& config, Measure measure,
                                    std::size_t trials, std::uint64_t seed);

struct ErrorEstimate {
  std::string estimator_id;
  double estimate = 0.0;
  double std_error = 0.0;
  double ci_radius = 0.0;  // z * std_error
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::string interval;    // "normal" or "wilson"
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;  // samples inside the event
  double relative_error = 0.0;
  bool zero_hits = false;  // estimate is 0; only upper_bound is informative
  double upper_bound = 0.0;
};

// E[Pr(E1)] = Pr_P(F_n > -n T_n).
ErrorEstimate estimate_E1(const McConfig& config, std::size_t trials, std::uint64_t seed);

enum class E2Method {
  // (M-1) Pr_Q'(F_n <= -n T_n)
  exchange,
  // E_P[exp(F_n) 1{F_n <= -n T_n}]
  reweight,
};

std::string to_string(E2Method m);

ErrorEstimate estimate_E2(const McConfig& config, std::size_t trials, std::uint64_t seed,
                          E2Method method);

// Reweight above n = 100, or when the exchange event (probability at most
// exp(-n T_n) / (M-1) under Q') would be hit fewer than 10 times.
E2Method preferred_E2_method(const McConfig& config, std::size_t trials);

/// theta -> log mean exp(theta X) on a grid.
struct EmpiricalCgf {
  std::vector<double> theta_grid;
  std::vector<double> values;
  std::size_t sample_count = 0;

  bool convex(double tol = 1e-9) const;
};

EmpiricalCgf empirical_cgf(std::span<const double> samples, std::span<const double> theta_grid);

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double std_error = 0.0; // of the mean
};

SampleSummary summarize(std::span<const double> samples);

// Wilson score interval for hits/trials at normal quantile z.
std::pair<double, double> wilson_interval(std::uint64_t hits, std::uint64_t trials, double z);

struct CodebookErrorEstimates {
  ErrorEstimate total;
  ErrorEstimate undetected;
};

// Pr(E1|C) and Pr(E2|C) for a fixed codebook: each trial sends a uniformly
// chosen message through the channel and decodes.
CodebookErrorEstimates estimate_codebook_errors(const Codebook& cb, const AdditiveChannel& ch,
                                                const DecoderSpec& spec, std::size_t trials,
                                                std::uint64_t seed, unsigned workers = 1,
                                                double z = 1.96);

}  // namespace erasurelab
