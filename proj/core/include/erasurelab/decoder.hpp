#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "erasurelab/channel.hpp"
#include "erasurelab/coding.hpp"

namespace erasurelab {

/// Decoder output: a message index (0-based) or an erasure.
struct DecodeOutcome {
  std::optional<std::size_t> message;
  std::vector<double> log_scores;  // per-message log-likelihoods, if requested

  bool erasure() const { return !message.has_value(); }
  static DecodeOutcome erased() { return {}; }
  static DecodeOutcome decoded(std::size_t m) { return DecodeOutcome{m, {}}; }
};

/// Forney's threshold test: decode m iff
///   W^n(y|x_m) / sum_{m' != m} W^n(y|x_m') >= exp(n T),   T > 0.
struct ForneyRule {
  double T = 0.0;
};

/// Information-spectrum rule with uniform output distribution (additive
/// channels): m is a candidate iff
///   log W^n(y|x_m) + n log d >= log M_n + margin,   margin = b n^(1-t).
/// Decodes iff exactly one candidate exists, erases otherwise.
struct InfoSpecRule {
  double log_code_size = 0.0;
  double margin = 0.0;

  static InfoSpecRule from_regime(std::uint64_t code_size, double b, double t, std::size_t n);
};

using DecoderSpec = std::variant<ForneyRule, InfoSpecRule>;

std::string decoder_id(const DecoderSpec& spec);

// Throws InvalidArgument for T <= 0 (list decoding) or a codebook with M < 2.
DecodeOutcome forney_decode(const Codebook& cb, const AdditiveChannel& ch, WordView y,
                            double T, bool keep_scores = false);

DecodeOutcome infospec_decode(const Codebook& cb, const AdditiveChannel& ch, WordView y,
                              const InfoSpecRule& rule, bool keep_scores = false);
DecodeOutcome infospec_decode(const Codebook& cb, const AdditiveChannel& ch, WordView y,
                              std::uint64_t code_size, double b, double t);

DecodeOutcome decode(const DecoderSpec& spec, const Codebook& cb, const AdditiveChannel& ch,
                     WordView y);

// Verdict from precomputed per-message log-likelihoods of a length-n output
// over Z_d. Shared by the decoders and the exact oracle.
std::optional<std::size_t> verdict_from_scores(const DecoderSpec& spec,
                                               std::span<const double> log_scores,
                                               std::size_t n, std::size_t d);

// Decodes a batch of outputs; element i of the result belongs to ys[i].
std::vector<DecodeOutcome> decode_batch(const DecoderSpec& spec, const Codebook& cb,
                                        const AdditiveChannel& ch, std::span<const Word> ys,
                                        unsigned workers = 1);

}  // namespace erasurelab
