#include "erasurelab/oracle.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>

#include "erasurelab/csv.hpp"
#include "erasurelab/logmath.hpp"
#include "erasurelab/parallel.hpp"
#include "erasurelab/typesys.hpp"

namespace erasurelab {

EnumerationBudget EnumerationBudget::from_environment() {
  EnumerationBudget b;
  const char* env = std::getenv("ERASURELAB_BUDGET_OVERRIDE");
  if (env == nullptr || *env == '\0') return b;
  const std::string v(env);
  if (v == "unlimited") {
    b.max_points = std::numeric_limits<std::uint64_t>::max();
    return b;
  }
  std::size_t used = 0;
  unsigned long long parsed = 0;
  try {
    parsed = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size()) {
    throw InvalidArgument("ERASURELAB_BUDGET_OVERRIDE must be a point count or 'unlimited'");
  }
  b.max_points = parsed;
  return b;
}

void EnumerationBudget::require(double points, const std::string& what) const {
  if (max_points != std::numeric_limits<std::uint64_t>::max() && points > static_cast<double>(max_points)) {
    throw BudgetExceeded(what + " needs " + format_double(points) +
                         " enumeration points, above the budget of " +
                         std::to_string(max_points) +
                         " (set ERASURELAB_BUDGET_OVERRIDE to lift it)");
  }
}

namespace {

double power(std::size_t base, std::size_t exp) {
  return std::pow(static_cast<double>(base), static_cast<double>(exp));
}

std::uint64_t ipow(std::size_t base, std::size_t exp) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) r *= base;
  return r;
}

// Writes the base-d digits of idx (least significant first) into w.
void index_to_word(std::uint64_t idx, std::size_t d, std::span<Symbol> w) {
  for (auto& s : w) {
    s = static_cast<Symbol>(idx % d);
    idx /= d;
  }
}

struct LogBuckets {
  std::vector<LogSumAccumulator> correct, erasure, undetected;
  explicit LogBuckets(std::size_t m = 0) : correct(m), erasure(m), undetected(m) {}
};

// Accumulates, for a fixed codebook, the outcome mass of every message over
// outputs y with index in [begin, end). Only messages < `senders` are tracked.
LogBuckets accumulate_outputs(const Codebook& cb, const AdditiveChannel& ch,
                              const DecoderSpec& spec, std::size_t senders,
                              std::uint64_t begin, std::uint64_t end) {
  const auto n = cb.n();
  const auto m = cb.size();
  LogBuckets acc(senders);
  Word y(n);
  std::vector<double> ll(m);
  for (std::uint64_t idx = begin; idx < end; ++idx) {
    index_to_word(idx, cb.d(), y);
    for (std::size_t k = 0; k < m; ++k) ll[k] = log_likelihood(ch, cb.word(k), y);
    const auto v = verdict_from_scores(spec, ll, n, cb.d());
    for (std::size_t k = 0; k < senders; ++k) {
      if (!v) {
        acc.erasure[k].add(ll[k]);
      } else if (*v == k) {
        acc.correct[k].add(ll[k]);
      } else {
        acc.undetected[k].add(ll[k]);
      }
    }
  }
  return acc;
}

void merge_into(LogBuckets& into, const LogBuckets& part) {
  for (std::size_t k = 0; k < into.correct.size(); ++k) {
    into.correct[k].merge(part.correct[k]);
    into.erasure[k].merge(part.erasure[k]);
    into.undetected[k].merge(part.undetected[k]);
  }
}

MessageErrors to_linear(const LogBuckets& b, std::size_t k) {
  auto lin = [](const LogSumAccumulator& a) { return a.empty() ? 0.0 : std::exp(a.value()); };
  return MessageErrors{lin(b.correct[k]), lin(b.erasure[k]), lin(b.undetected[k])};
}

void check_spec(const DecoderSpec& spec, std::size_t m) {
  if (const auto* f = std::get_if<ForneyRule>(&spec)) {
    if (!(f->T > 0.0)) throw InvalidArgument("Forney threshold must be positive");
    if (m < 2) throw InvalidArgument("Forney decoding needs at least two codewords");
  }
}

// Errors of the first `senders` messages of one codebook, single-threaded.
LogBuckets codebook_buckets(const Codebook& cb, const AdditiveChannel& ch,
                            const DecoderSpec& spec, std::size_t senders) {
  return accumulate_outputs(cb, ch, spec, senders, 0, ipow(cb.d(), cb.n()));
}

}  // namespace

ExactErrors exact_error_probs(const Codebook& cb, const AdditiveChannel& ch,
                              const DecoderSpec& spec, EnumerationBudget budget,
                              unsigned workers) {
  if (cb.d() != ch.d()) throw InvalidArgument("codebook and channel alphabets differ");
  check_spec(spec, cb.size());
  budget.require(power(cb.d(), cb.n()), "exact error probabilities");
  const auto total = ipow(cb.d(), cb.n());
  const auto m = cb.size();
  auto parts = run_chunked(total, 4096, workers, [&](std::size_t begin, std::size_t end) {
    return accumulate_outputs(cb, ch, spec, m, begin, end);
  });
  LogBuckets acc(m);
  for (const auto& p : parts) merge_into(acc, p);

  ExactErrors out;
  CompensatedSum c, e, u;
  for (std::size_t k = 0; k < m; ++k) {
    out.per_message.push_back(to_linear(acc, k));
    c.add(out.per_message.back().correct);
    e.add(out.per_message.back().erasure);
    u.add(out.per_message.back().undetected);
  }
  const double inv = 1.0 / static_cast<double>(m);
  out.p_correct = c.value() * inv;
  out.p_erasure = e.value() * inv;
  out.p_undetected = u.value() * inv;
  return out;
}

ExactErrors exact_ensemble(std::size_t n, std::size_t d, std::size_t m,
                           const AdditiveChannel& ch, const DecoderSpec& spec,
                           EnsembleMethod method, EnumerationBudget budget, unsigned workers) {
  if (d != ch.d()) throw InvalidArgument("alphabet differs from the channel");
  if (m < 1 || n < 1) throw InvalidArgument("need n >= 1 and M >= 1");
  check_spec(spec, m);
  const bool fixed = method == EnsembleMethod::first_codeword_fixed;
  const std::size_t free_words = fixed ? m - 1 : m;
  budget.require(power(d, n * free_words) * power(d, n), "exact ensemble");

  const auto codebooks = ipow(d, n * free_words);
  const std::size_t offset = fixed ? n : 0;
  const std::size_t senders = fixed ? 1 : m;

  struct Partial {
    CompensatedSum correct, erasure, undetected;
  };
  auto parts = run_chunked(codebooks, 64, workers, [&](std::size_t begin, std::size_t end) {
    Partial p;
    std::vector<Symbol> symbols(n * m, 0);
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      index_to_word(idx, d, std::span<Symbol>(symbols).subspan(offset));
      const Codebook cb(n, d, symbols);
      const auto b = codebook_buckets(cb, ch, spec, senders);
      CompensatedSum c, e, u;
      for (std::size_t k = 0; k < senders; ++k) {
        const auto me = to_linear(b, k);
        c.add(me.correct);
        e.add(me.erasure);
        u.add(me.undetected);
      }
      const double inv = 1.0 / static_cast<double>(senders);
      p.correct.add(c.value() * inv);
      p.erasure.add(e.value() * inv);
      p.undetected.add(u.value() * inv);
    }
    return p;
  });
  CompensatedSum c, e, u;
  for (const auto& p : parts) {
    c.add(p.correct.value());
    e.add(p.erasure.value());
    u.add(p.undetected.value());
  }
  const double w = 1.0 / static_cast<double>(codebooks);
  ExactErrors out;
  out.p_correct = c.value() * w;
  out.p_erasure = e.value() * w;
  out.p_undetected = u.value() * w;
  return out;
}

ExactErrors exact_ensemble_infospec(std::size_t n, const AdditiveChannel& ch, std::uint64_t m,
                                    const InfoSpecRule& rule) {
  if (m < 1) throw InvalidArgument("code size must be at least 1");
  const auto& p = ch.noise();
  const double log_d = std::log(static_cast<double>(ch.d()));
  const double level = rule.log_code_size + rule.margin;
  CompensatedSum own, other;
  for (const auto& q : enumerate_types(n, ch.d())) {
    const double lseq = log_sequence_prob(q, p);
    if (lseq + static_cast<double>(n) * log_d < level) continue;
    const double lsize = type_class_log_size(q);
    own.add(std::exp(lsize + lseq));
    other.add(std::exp(lsize - static_cast<double>(n) * log_d));
  }
  const double pc = std::min(1.0, own.value());
  const double qc = std::min(1.0, other.value());
  const double mm = static_cast<double>(m);
  // (1-q)^k computed as exp(k log1p(-q)), with 0^0 = 1.
  auto miss = [&](double k) { return k == 0.0 ? 1.0 : std::exp(k * std::log1p(-qc)); };
  ExactErrors out;
  out.p_correct = pc * miss(mm - 1.0);
  out.p_undetected = m < 2 ? 0.0 : (1.0 - pc) * (mm - 1.0) * qc * miss(mm - 2.0);
  out.p_erasure = std::max(0.0, 1.0 - out.p_correct - out.p_undetected);
  return out;
}

double exact_EN_s(std::uint64_t L, std::uint64_t M1, std::uint64_t M2, double s) {
  if (L < 1) throw InvalidArgument("L must be at least 1");
  if (M1 < 1 || M2 > M1) throw InvalidArgument("need 0 <= M2 <= M1 and M1 >= 1");
  auto power_s = [s](double l) { return l == 0.0 ? (s == 0.0 ? 1.0 : 0.0) : std::pow(l, s); };
  const double Ld = static_cast<double>(L);
  if (M2 == 0) return power_s(0.0);
  if (M2 == M1) return power_s(Ld);
  const double p = static_cast<double>(M2) / static_cast<double>(M1);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double lg_L = std::lgamma(Ld + 1.0);
  CompensatedSum acc;
  for (std::uint64_t l = 0; l <= L; ++l) {
    const double ld = static_cast<double>(l);
    const double log_pmf = lg_L - std::lgamma(ld + 1.0) - std::lgamma(Ld - ld + 1.0) +
                           ld * log_p + (Ld - ld) * log_q;
    acc.add(power_s(ld) * std::exp(log_pmf));
  }
  return acc.value();
}

double concentration_bound(std::uint64_t L, std::uint64_t M1, std::uint64_t M2, double s,
                           double eps) {
  if (!(s > 0.0)) throw InvalidArgument("concentration bound requires s > 0");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("concentration bound requires 0 < eps < 1");
  if (M1 < 1 || M2 > M1) throw InvalidArgument("need 0 <= M2 <= M1 and M1 >= 1");
  const double mean = static_cast<double>(L) * static_cast<double>(M2) / static_cast<double>(M1);
  const double base = std::floor(mean * (1.0 - eps));
  if (base < 1.0) return 0.0;
  return std::pow(base, s) * -std::expm1(-mean * 0.5 * eps * eps);
}

double exact_A(std::size_t n, const NoiseDistribution& p, double s) {
  const double nd = static_cast<double>(n);
  return -nd * std::log(static_cast<double>(p.size())) - nd * renyi_cgf(p, s);
}

double enumerate_A(std::size_t n, const NoiseDistribution& p, double s, WordView y,
                   EnumerationBudget budget) {
  const auto d = p.size();
  if (y.size() != n) throw InvalidArgument("output length differs from n");
  budget.require(power(d, n), "A-term enumeration");
  const auto total = ipow(d, n);
  LogSumAccumulator acc;
  Word x(n);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    index_to_word(idx, d, x);
    double lp = 0.0;
    for (std::size_t i = 0; i < n; ++i) lp += p.log_prob((y[i] + d - x[i]) % d);
    acc.add((1.0 - s) * lp);
  }
  return acc.value() - static_cast<double>(n) * std::log(static_cast<double>(d));
}

void write_oracle_csv(std::ostream& out, const std::vector<OracleRow>& rows) {
  CsvWriter csv(out, {"n", "d", "M", "decoder", "threshold", "scope", "seed", "p_correct",
                      "p_erasure", "p_total", "p_undetected"});
  for (const auto& r : rows) {
    csv.cell(static_cast<std::uint64_t>(r.n))
        .cell(static_cast<std::uint64_t>(r.d))
        .cell(r.m)
        .cell(r.decoder)
        .cell(r.threshold)
        .cell(r.scope)
        .cell(r.seed)
        .cell(r.errors.p_correct)
        .cell(r.errors.p_erasure)
        .cell(r.errors.p_total())
        .cell(r.errors.p_undetected);
    csv.end_row();
  }
}

}  // namespace erasurelab
