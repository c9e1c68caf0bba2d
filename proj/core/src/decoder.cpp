#include "erasurelab/decoder.hpp"

#include <cmath>

#include "erasurelab/logmath.hpp"
#include "erasurelab/parallel.hpp"

namespace erasurelab {

InfoSpecRule InfoSpecRule::from_regime(std::uint64_t code_size, double b, double t,
                                       std::size_t n) {
  if (code_size < 1) throw InvalidArgument("code size must be at least 1");
  if (!(b > 0.0)) throw InvalidArgument("b must be positive (b <= 0 is list decoding)");
  return InfoSpecRule{std::log(static_cast<double>(code_size)),
                      b * std::pow(static_cast<double>(n), 1.0 - t)};
}

std::string decoder_id(const DecoderSpec& spec) {
  return std::holds_alternative<ForneyRule>(spec) ? "forney" : "infospec";
}

namespace {

std::vector<double> all_log_likelihoods(const Codebook& cb, const AdditiveChannel& ch,
                                        WordView y) {
  if (y.size() != cb.n()) throw InvalidArgument("output length differs from codeword length");
  if (cb.d() != ch.d()) throw InvalidArgument("codebook and channel alphabets differ");
  std::vector<double> ll(cb.size());
  for (std::size_t m = 0; m < cb.size(); ++m) ll[m] = log_likelihood(ch, cb.word(m), y);
  return ll;
}

std::optional<std::size_t> forney_verdict(std::span<const double> ll, std::size_t n, double T) {
  // With T > 0 only a strict maximiser can pass the test.
  std::size_t best = 0;
  for (std::size_t m = 1; m < ll.size(); ++m) {
    if (ll[m] > ll[best]) best = m;
  }
  double rest_max = kNegInf;
  for (std::size_t m = 0; m < ll.size(); ++m) {
    if (m != best) rest_max = std::max(rest_max, ll[m]);
  }
  if (rest_max == ll[best]) return std::nullopt;
  CompensatedSum rest;
  for (std::size_t m = 0; m < ll.size(); ++m) {
    if (m != best) rest.add(std::exp(ll[m] - rest_max));
  }
  const double log_rest = rest_max + std::log(rest.value());
  if (ll[best] >= static_cast<double>(n) * T + log_rest) return best;
  return std::nullopt;
}

std::optional<std::size_t> infospec_verdict(std::span<const double> ll, std::size_t n,
                                            std::size_t d, const InfoSpecRule& rule) {
  const double shift = static_cast<double>(n) * std::log(static_cast<double>(d));
  const double level = rule.log_code_size + rule.margin;
  std::optional<std::size_t> hit;
  for (std::size_t m = 0; m < ll.size(); ++m) {
    if (ll[m] + shift >= level) {
      if (hit) return std::nullopt;  // two candidates: confusion, erase
      hit = m;
    }
  }
  return hit;
}

void check_forney(const Codebook& cb, double T) {
  if (!(T > 0.0)) throw InvalidArgument("Forney threshold must be positive (T <= 0 is list decoding)");
  if (cb.size() < 2) throw InvalidArgument("Forney decoding needs at least two codewords");
}

}  // namespace

std::optional<std::size_t> verdict_from_scores(const DecoderSpec& spec,
                                               std::span<const double> log_scores,
                                               std::size_t n, std::size_t d) {
  if (const auto* f = std::get_if<ForneyRule>(&spec)) {
    return forney_verdict(log_scores, n, f->T);
  }
  return infospec_verdict(log_scores, n, d, std::get<InfoSpecRule>(spec));
}

DecodeOutcome forney_decode(const Codebook& cb, const AdditiveChannel& ch, WordView y, double T,
                            bool keep_scores) {
  check_forney(cb, T);
  auto ll = all_log_likelihoods(cb, ch, y);
  DecodeOutcome out{forney_verdict(ll, cb.n(), T), {}};
  if (keep_scores) out.log_scores = std::move(ll);
  return out;
}

DecodeOutcome infospec_decode(const Codebook& cb, const AdditiveChannel& ch, WordView y,
                              const InfoSpecRule& rule, bool keep_scores) {
  auto ll = all_log_likelihoods(cb, ch, y);
  DecodeOutcome out{infospec_verdict(ll, cb.n(), cb.d(), rule), {}};
  if (keep_scores) out.log_scores = std::move(ll);
  return out;
}

DecodeOutcome infospec_decode(const Codebook& cb, const AdditiveChannel& ch, WordView y,
                              std::uint64_t code_size, double b, double t) {
  return infospec_decode(cb, ch, y, InfoSpecRule::from_regime(code_size, b, t, cb.n()));
}

DecodeOutcome decode(const DecoderSpec& spec, const Codebook& cb, const AdditiveChannel& ch,
                     WordView y) {
  if (const auto* f = std::get_if<ForneyRule>(&spec)) return forney_decode(cb, ch, y, f->T);
  return infospec_decode(cb, ch, y, std::get<InfoSpecRule>(spec));
}

std::vector<DecodeOutcome> decode_batch(const DecoderSpec& spec, const Codebook& cb,
                                        const AdditiveChannel& ch, std::span<const Word> ys,
                                        unsigned workers) {
  if (const auto* f = std::get_if<ForneyRule>(&spec)) check_forney(cb, f->T);
  auto chunks = run_chunked(ys.size(), 256, workers, [&](std::size_t begin, std::size_t end) {
    std::vector<DecodeOutcome> part;
    part.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) part.push_back(decode(spec, cb, ch, ys[i]));
    return part;
  });
  std::vector<DecodeOutcome> out;
  out.reserve(ys.size());
  for (auto& c : chunks) {
    for (auto& o : c) out.push_back(std::move(o));
  }
  return out;
}

}  // namespace erasurelab
