#include "erasurelab/coding.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

namespace erasurelab {

void RegimeParams::validate() const {
  if (n == 0) throw InvalidArgument("blocklength must be positive");
  if (!(t > 0.0 && t <= 0.5)) throw InvalidArgument("t must lie in (0, 1/2]");
  if (!(b > 0.0)) throw InvalidArgument("b must be positive (b <= 0 is list decoding)");
  if (t < 0.5 && !(a > b)) {
    throw InvalidArgument("moderate-deviations regime (t < 1/2) requires a > b");
  }
  if (!std::isfinite(a) || !std::isfinite(capacity) || capacity < 0.0) {
    throw InvalidArgument("a and capacity must be finite, capacity nonnegative");
  }
}

double RegimeParams::backoff_scale() const {
  return std::pow(static_cast<double>(n), 1.0 - t);
}

double RegimeParams::log_code_size() const {
  return static_cast<double>(n) * capacity - a * backoff_scale();
}

double RegimeParams::log_threshold() const { return b * backoff_scale(); }

std::uint64_t code_size(const RegimeParams& params) {
  params.validate();
  const double e = params.log_code_size();
  if (e < std::log(2.0)) {
    throw InfeasibleSchedule("rate schedule infeasible at this n: log M_n = " +
                             std::to_string(e) + " < log 2 (n = " +
                             std::to_string(params.n) + ")");
  }
  const double m = std::round(std::exp(e));
  if (!(m <= static_cast<double>(kMaxCodeSize))) {
    throw InfeasibleSchedule("code size exp(" + std::to_string(e) + ") exceeds the 2^31 cap (n = " +
                             std::to_string(params.n) + "); use a lower-capacity channel");
  }
  return static_cast<std::uint64_t>(m);
}

double threshold(const RegimeParams& params) {
  params.validate();
  return params.b * std::pow(static_cast<double>(params.n), -params.t);
}

Codebook::Codebook(std::size_t n, std::size_t d, std::vector<Symbol> symbols,
                   std::uint64_t seed, std::optional<RegimeParams> schedule)
    : n_(n), d_(d), symbols_(std::move(symbols)), seed_(seed), schedule_(schedule) {
  if (n_ == 0) throw InvalidArgument("codeword length must be positive");
  if (d_ < 2 || d_ > AdditiveChannel::kMaxAlphabet) {
    throw InvalidArgument("alphabet size must lie in [2, 256]");
  }
  if (symbols_.size() % n_ != 0) {
    throw InvalidArgument("symbol count is not a multiple of the codeword length");
  }
  for (auto s : symbols_) {
    if (s >= d_) throw InvalidArgument("codeword symbol outside Z_d");
  }
}

void fill_uniform(std::span<Symbol> out, std::size_t d, Rng& rng) {
  if (std::has_single_bit(d)) {
    const int bits = std::countr_zero(d);
    const int per_draw = 64 / bits;
    const std::uint64_t mask = d - 1;
    std::size_t i = 0;
    while (i < out.size()) {
      std::uint64_t r = rng();
      for (int k = 0; k < per_draw && i < out.size(); ++k, ++i) {
        out[i] = static_cast<Symbol>(r & mask);
        r >>= bits;
      }
    }
    return;
  }
  for (auto& s : out) s = static_cast<Symbol>(uniform_below(rng, d));
}

Codebook sample_codebook(std::size_t n, std::size_t d, std::size_t m, std::uint64_t seed) {
  if (m < 1) throw InvalidArgument("codebook needs at least one codeword");
  if (n == 0) throw InvalidArgument("codeword length must be positive");
  if (d < 2 || d > AdditiveChannel::kMaxAlphabet) {
    throw InvalidArgument("alphabet size must lie in [2, 256]");
  }
  std::vector<Symbol> symbols(n * m);
  auto rng = make_stream(seed, 0);
  fill_uniform(symbols, d, rng);
  return Codebook(n, d, std::move(symbols), seed);
}

namespace {

template <class T>
void put_le(std::ostream& out, T v) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
  }
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) {
    throw InvalidArgument("truncated codebook header");
  }
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return static_cast<T>(v);
}

}  // namespace

void write_codebook(std::ostream& out, const Codebook& cb) {
  out.write("ERLB", 4);
  put_le<std::uint16_t>(out, kCodebookFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cb.n()));
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(cb.d()));
  put_le<std::uint64_t>(out, cb.size());
  put_le<std::uint64_t>(out, cb.seed());
  const auto sym = cb.symbols();
  out.write(reinterpret_cast<const char*>(sym.data()), static_cast<std::streamsize>(sym.size()));
  if (!out) throw Error("failed to write codebook");
}

Codebook read_codebook(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::string(magic, 4) != "ERLB") {
    throw InvalidArgument("not an ERLB codebook stream");
  }
  const auto version = get_le<std::uint16_t>(in);
  if (version != kCodebookFormatVersion) {
    throw InvalidArgument("unsupported codebook format version " + std::to_string(version));
  }
  const auto n = get_le<std::uint32_t>(in);
  const auto d = get_le<std::uint16_t>(in);
  const auto m = get_le<std::uint64_t>(in);
  const auto seed = get_le<std::uint64_t>(in);
  if (n == 0 || m > std::numeric_limits<std::size_t>::max() / n) {
    throw InvalidArgument("corrupt codebook dimensions");
  }
  std::vector<Symbol> symbols(static_cast<std::size_t>(m) * n);
  if (!in.read(reinterpret_cast<char*>(symbols.data()),
               static_cast<std::streamsize>(symbols.size()))) {
    throw InvalidArgument("truncated codebook body");
  }
  return Codebook(n, d, std::move(symbols), seed);
}

DerandomizeResult derandomize(std::size_t n, std::size_t d, std::size_t m, ErrorPair targets,
                              std::span<const std::uint64_t> candidate_seeds,
                              const CodebookEstimator& estimator) {
  std::size_t rejections = 0;
  ErrorPair best_total{std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::infinity()};
  ErrorPair best_undetected = best_total;
  for (auto seed : candidate_seeds) {
    auto cb = sample_codebook(n, d, m, seed);
    const auto e = estimator(cb);
    if (e.total <= 2.0 * targets.total && e.undetected <= 2.0 * targets.undetected) {
      return DerandomizeResult{std::move(cb), e, rejections};
    }
    ++rejections;
    if (e.total < best_total.total) best_total = e;
    if (e.undetected < best_undetected.undetected) best_undetected = e;
  }
  throw DerandomizeFailure("all " + std::to_string(rejections) +
                               " candidate codebooks exceed twice the error targets",
                           rejections, best_total, best_undetected);
}

DerandomizeResult derandomize(const RegimeParams& params, const AdditiveChannel& ch,
                              ErrorPair targets, std::span<const std::uint64_t> candidate_seeds,
                              const CodebookEstimator& estimator) {
  const auto m = code_size(params);
  auto res = derandomize(params.n, ch.d(), static_cast<std::size_t>(m), targets,
                         candidate_seeds, estimator);
  res.codebook = Codebook(params.n, ch.d(),
                          std::vector<Symbol>(res.codebook.symbols().begin(),
                                              res.codebook.symbols().end()),
                          res.codebook.seed(), params);
  return res;
}

}  // namespace erasurelab
