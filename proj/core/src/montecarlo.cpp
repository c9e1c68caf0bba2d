#include "erasurelab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "erasurelab/logmath.hpp"
#include "erasurelab/parallel.hpp"
#include "erasurelab/typesys.hpp"

namespace erasurelab {

namespace {

constexpr std::size_t kChunk = 1024;
// Type path is chosen automatically only below this many n-types.
constexpr double kAutoTypeLimit = 2e5;

}  // namespace

std::string to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::automatic: return "auto";
    case SamplerKind::explicit_codebook: return "explicit";
    case SamplerKind::type_enumerator: return "types";
  }
  return "auto";
}

SamplerKind sampler_from_string(const std::string& s) {
  if (s == "auto") return SamplerKind::automatic;
  if (s == "explicit") return SamplerKind::explicit_codebook;
  if (s == "types") return SamplerKind::type_enumerator;
  throw InvalidArgument("unknown sampler '" + s + "' (expected auto, explicit or types)");
}

std::string to_string(E2Method m) {
  return m == E2Method::exchange ? "e2_exchange" : "e2_reweight";
}

McConfig McConfig::from_regime(const AdditiveChannel& ch, const RegimeParams& params) {
  McConfig c{ch};
  c.n = params.n;
  c.M = code_size(params);
  c.log_threshold = params.log_threshold();
  return c;
}

void McConfig::validate() const {
  if (n == 0) throw InvalidArgument("blocklength must be positive");
  if (M < 2) throw InvalidArgument("F_n needs at least two codewords");
  if (!(log_threshold > 0.0)) throw InvalidArgument("threshold margin n T_n must be positive");
  if (!(z > 0.0)) throw InvalidArgument("confidence quantile must be positive");
}

// Tables for the type-enumerator path. Types are ordered by decreasing
// probability under a uniform word so the sequential-binomial multinomial draw
// exhausts its count early.
struct FnSampler::TypeTables {
  std::vector<double> seq_log_prob;  // log P^n(w) for w of the type
  std::vector<double> cond_prob;     // uniform mass of type i given types >= i
  std::vector<double> cumulative;    // uniform CDF in the sorted order
  std::vector<double> noise_cond;    // P(z) / sum_{z' >= z} P(z')
};

FnSampler::FnSampler(const McConfig& config) : config_(config), kind_(config.sampler) {
  config_.validate();
  const auto d = config_.channel.d();
  if (kind_ == SamplerKind::automatic) {
    const double types = type_count(config_.n, d);
    const double explicit_cost = static_cast<double>(config_.M - 1) * static_cast<double>(config_.n);
    kind_ = (types <= kAutoTypeLimit && explicit_cost > 4.0 * types)
                ? SamplerKind::type_enumerator
                : SamplerKind::explicit_codebook;
  }
  if (kind_ != SamplerKind::type_enumerator) return;

  const auto types = enumerate_types(config_.n, d);
  const double n_log_d = static_cast<double>(config_.n) * std::log(static_cast<double>(d));
  std::vector<double> log_uniform(types.size());
  for (std::size_t i = 0; i < types.size(); ++i) {
    log_uniform[i] = type_class_log_size(types[i]) - n_log_d;
  }
  std::vector<std::size_t> order(types.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return log_uniform[a] > log_uniform[b]; });

  tables_ = std::make_unique<TypeTables>();
  auto& t = *tables_;
  const auto k = types.size();
  t.seq_log_prob.resize(k);
  t.cond_prob.resize(k);
  t.cumulative.resize(k);
  std::vector<double> mass(k);
  for (std::size_t i = 0; i < k; ++i) {
    t.seq_log_prob[i] = log_sequence_prob(types[order[i]], config_.channel.noise());
    mass[i] = std::exp(log_uniform[order[i]]);
  }
  // Tail sums from the small end keep the conditional probabilities accurate.
  CompensatedSum tail;
  for (std::size_t i = k; i-- > 0;) {
    tail.add(mass[i]);
    t.cond_prob[i] = std::clamp(mass[i] / tail.value(), 0.0, 1.0);
  }
  t.cond_prob[k - 1] = 1.0;
  CompensatedSum cum;
  for (std::size_t i = 0; i < k; ++i) {
    cum.add(mass[i]);
    t.cumulative[i] = cum.value();
  }

  const auto& p = config_.channel.noise();
  t.noise_cond.resize(d);
  CompensatedSum ptail;
  for (std::size_t z = d; z-- > 0;) {
    ptail.add(p.prob(z));
    t.noise_cond[z] = std::clamp(p.prob(z) / ptail.value(), 0.0, 1.0);
  }
  t.noise_cond[d - 1] = 1.0;
}

FnSampler::~FnSampler() = default;
FnSampler::FnSampler(FnSampler&&) noexcept = default;
FnSampler& FnSampler::operator=(FnSampler&&) noexcept = default;

FnSample FnSampler::sample(Measure measure, Rng& rng) const {
  const double v = kind_ == SamplerKind::type_enumerator ? sample_types(measure, rng)
                                                         : sample_explicit(measure, rng);
  return FnSample{v, measure};
}

double FnSampler::sample_explicit(Measure measure, Rng& rng) const {
  const auto& ch = config_.channel;
  const auto n = config_.n;
  const auto m = static_cast<std::size_t>(config_.M);
  const auto d = ch.d();
  std::vector<Symbol> cb(m * n);
  fill_uniform(cb, d, rng);
  std::size_t sender = 0;
  if (measure == Measure::QPrime) sender = 1 + static_cast<std::size_t>(uniform_below(rng, m - 1));
  Word y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<Symbol>((cb[sender * n + i] + ch.sample_noise(rng)) % d);
  }
  const WordView all(cb);
  const double own = log_likelihood(ch, all.subspan(0, n), y);
  LogSumAccumulator rest;
  for (std::size_t j = 1; j < m; ++j) rest.add(log_likelihood(ch, all.subspan(j * n, n), y));
  return rest.value() - own;
}

double FnSampler::sample_types(Measure measure, Rng& rng) const {
  const auto& t = *tables_;
  const auto& p = config_.channel.noise();
  const auto d = p.size();

  // log P^n(z) for z ~ P^n, via its type drawn as a multinomial.
  auto noise_log_prob = [&] {
    std::uint64_t remaining = config_.n;
    double lp = 0.0;
    for (std::size_t z = 0; z < d && remaining > 0; ++z) {
      std::uint64_t c = remaining;
      if (z + 1 < d) c = std::binomial_distribution<std::uint64_t>(remaining, t.noise_cond[z])(rng);
      lp += static_cast<double>(c) * p.log_prob(z);
      remaining -= c;
    }
    return lp;
  };

  // Adds the likelihoods of `count` independent uniform shifted words.
  auto add_uniform_words = [&](std::uint64_t count, LogSumAccumulator& acc) {
    std::uint64_t remaining = count;
    for (std::size_t i = 0; i < t.cond_prob.size() && remaining > 0; ++i) {
      const std::uint64_t c =
          std::binomial_distribution<std::uint64_t>(remaining, t.cond_prob[i])(rng);
      if (c > 0) acc.add_weighted(t.seq_log_prob[i], static_cast<double>(c));
      remaining -= c;
    }
  };

  LogSumAccumulator competitors;
  double own = 0.0;
  if (measure == Measure::P) {
    own = noise_log_prob();
    add_uniform_words(config_.M - 1, competitors);
  } else {
    // Y = X_m' + Z: competitor m' contributes P^n(Z); the transmitted word
    // of message 1 and the remaining M-2 competitors are uniform shifts.
    competitors.add(noise_log_prob());
    const double u = uniform01(rng) * t.cumulative.back();
    const auto it = std::upper_bound(t.cumulative.begin(), t.cumulative.end(), u);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - t.cumulative.begin()),
                                           t.cumulative.size() - 1);
    own = t.seq_log_prob[idx];
    add_uniform_words(config_.M - 2, competitors);
  }
  return competitors.value() - own;
}

FnSample sample_Fn(const McConfig& config, Rng& rng, Measure measure) {
  return FnSampler(config).sample(measure, rng);
}

std::vector<double> sample_Fn_batch(const McConfig& config, Measure measure,
                                    std::size_t trials, std::uint64_t seed) {
  const FnSampler sampler(config);
  auto parts = run_chunked(trials, kChunk, config.workers, [&](std::size_t begin, std::size_t end) {
    std::vector<double> v;
    v.reserve(end - begin);
    for (std::size_t k = begin; k < end; ++k) {
      auto rng = make_stream(seed, k);
      v.push_back(sampler.sample(measure, rng).value);
    }
    return v;
  });
  std::vector<double> out;
  out.reserve(trials);
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::pair<double, double> wilson_interval(std::uint64_t hits, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(trials);
  const double ph = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (ph + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(ph * (1.0 - ph) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

namespace {

struct Tally {
  std::uint64_t hits = 0;
  CompensatedSum sum;
  CompensatedSum sum_sq;
};

// Runs `trials` samples under `measure` and tallies value_fn(F) per trial.
template <class ValueFn>
Tally tally(const McConfig& config, Measure measure, std::size_t trials, std::uint64_t seed,
            ValueFn value_fn) {
  const FnSampler sampler(config);
  auto parts = run_chunked(trials, kChunk, config.workers, [&](std::size_t begin, std::size_t end) {
    Tally t;
    for (std::size_t k = begin; k < end; ++k) {
      auto rng = make_stream(seed, k);
      const auto [hit, w] = value_fn(sampler.sample(measure, rng).value);
      if (hit) ++t.hits;
      t.sum.add(w);
      t.sum_sq.add(w * w);
    }
    return t;
  });
  Tally total;
  for (const auto& p : parts) {
    total.hits += p.hits;
    total.sum.add(p.sum.value());
    total.sum_sq.add(p.sum_sq.value());
  }
  return total;
}

// Binomial-proportion estimate scaled by `scale`.
ErrorEstimate proportion_estimate(std::string id, std::uint64_t hits, std::uint64_t trials,
                                  double scale, double z) {
  ErrorEstimate e;
  e.estimator_id = std::move(id);
  e.trials = trials;
  e.hits = hits;
  const double nn = static_cast<double>(trials);
  const double ph = static_cast<double>(hits) / nn;
  e.estimate = scale * ph;
  e.std_error = scale * std::sqrt(ph * (1.0 - ph) / nn);
  e.ci_radius = z * e.std_error;
  if (hits < 30) {
    const auto [lo, hi] = wilson_interval(hits, trials, z);
    e.ci_low = scale * lo;
    e.ci_high = scale * hi;
    e.interval = "wilson";
  } else {
    e.ci_low = std::max(0.0, e.estimate - e.ci_radius);
    e.ci_high = e.estimate + e.ci_radius;
    e.interval = "normal";
  }
  e.relative_error = e.estimate > 0.0 ? e.std_error / e.estimate : 0.0;
  e.zero_hits = hits == 0;
  e.upper_bound = e.ci_high;
  return e;
}

}  // namespace

ErrorEstimate estimate_E1(const McConfig& config, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw InvalidArgument("trials must be positive");
  const double level = -config.log_threshold;
  const auto t = tally(config, Measure::P, trials, seed, [level](double f) {
    const bool hit = f > level;
    return std::pair{hit, hit ? 1.0 : 0.0};
  });
  return proportion_estimate("e1", t.hits, trials, 1.0, config.z);
}

ErrorEstimate estimate_E2(const McConfig& config, std::size_t trials, std::uint64_t seed,
                          E2Method method) {
  if (trials == 0) throw InvalidArgument("trials must be positive");
  const double level = -config.log_threshold;
  if (method == E2Method::exchange) {
    const auto t = tally(config, Measure::QPrime, trials, seed, [level](double f) {
      const bool hit = f <= level;
      return std::pair{hit, hit ? 1.0 : 0.0};
    });
    return proportion_estimate(to_string(method), t.hits, trials,
                               static_cast<double>(config.M - 1), config.z);
  }
  const auto t = tally(config, Measure::P, trials, seed, [level](double f) {
    const bool hit = f <= level;
    return std::pair{hit, hit ? std::exp(f) : 0.0};
  });
  ErrorEstimate e;
  e.estimator_id = to_string(method);
  e.trials = trials;
  e.hits = t.hits;
  const double nn = static_cast<double>(trials);
  e.estimate = t.sum.value() / nn;
  const double var = std::max(0.0, (t.sum_sq.value() - nn * e.estimate * e.estimate) / (nn - 1.0));
  e.std_error = trials > 1 ? std::sqrt(var / nn) : 0.0;
  e.ci_radius = config.z * e.std_error;
  e.ci_low = std::max(0.0, e.estimate - e.ci_radius);
  e.ci_high = e.estimate + e.ci_radius;
  e.interval = "normal";
  e.relative_error = e.estimate > 0.0 ? e.std_error / e.estimate : 0.0;
  e.zero_hits = t.hits == 0;
  // Every weight on the event is at most exp(-n T_n).
  e.upper_bound = e.zero_hits ? std::exp(level) : e.ci_high;
  return e;
}

E2Method preferred_E2_method(const McConfig& config, std::size_t trials) {
  if (config.n > 100) return E2Method::reweight;
  const double q_event = std::exp(-config.log_threshold) / static_cast<double>(config.M - 1);
  return q_event < 10.0 / static_cast<double>(trials) ? E2Method::reweight : E2Method::exchange;
}

bool EmpiricalCgf::convex(double tol) const {
  for (std::size_t i = 1; i + 1 < theta_grid.size(); ++i) {
    const double h0 = theta_grid[i] - theta_grid[i - 1];
    const double h1 = theta_grid[i + 1] - theta_grid[i];
    if (!(h0 > 0.0 && h1 > 0.0)) continue;
    // value at i must not exceed the chord between i-1 and i+1.
    const double chord = (values[i - 1] * h1 + values[i + 1] * h0) / (h0 + h1);
    if (values[i] > chord + tol) return false;
  }
  return true;
}

EmpiricalCgf empirical_cgf(std::span<const double> samples, std::span<const double> theta_grid) {
  if (samples.empty()) throw InvalidArgument("empirical CGF needs at least one sample");
  EmpiricalCgf out;
  out.theta_grid.assign(theta_grid.begin(), theta_grid.end());
  out.sample_count = samples.size();
  const double log_n = std::log(static_cast<double>(samples.size()));
  std::vector<double> scaled(samples.size());
  for (double theta : theta_grid) {
    if (!std::isfinite(theta)) throw InvalidArgument("theta grid must be finite");
    if (theta == 0.0) {
      out.values.push_back(0.0);
      continue;
    }
    for (std::size_t i = 0; i < samples.size(); ++i) scaled[i] = theta * samples[i];
    out.values.push_back(log_sum_exp(scaled) - log_n);
  }
  return out;
}

SampleSummary summarize(std::span<const double> samples) {
  SampleSummary s;
  s.count = samples.size();
  if (samples.empty()) return s;
  CompensatedSum sum;
  for (double x : samples) sum.add(x);
  s.mean = sum.value() / static_cast<double>(s.count);
  if (s.count < 2) return s;
  CompensatedSum sq;
  for (double x : samples) sq.add((x - s.mean) * (x - s.mean));
  s.variance = sq.value() / static_cast<double>(s.count - 1);
  s.std_error = std::sqrt(s.variance / static_cast<double>(s.count));
  return s;
}

CodebookErrorEstimates estimate_codebook_errors(const Codebook& cb, const AdditiveChannel& ch,
                                                const DecoderSpec& spec, std::size_t trials,
                                                std::uint64_t seed, unsigned workers, double z) {
  if (trials == 0) throw InvalidArgument("trials must be positive");
  struct Counts {
    std::uint64_t total = 0;
    std::uint64_t undetected = 0;
  };
  auto parts = run_chunked(trials, kChunk, workers, [&](std::size_t begin, std::size_t end) {
    Counts c;
    for (std::size_t k = begin; k < end; ++k) {
      auto rng = make_stream(seed, k);
      const auto m = static_cast<std::size_t>(uniform_below(rng, cb.size()));
      const auto y = sample_output(ch, cb.word(m), rng);
      const auto v = decode(spec, cb, ch, y).message;
      if (v != m) ++c.total;
      if (v && *v != m) ++c.undetected;
    }
    return c;
  });
  Counts all;
  for (const auto& p : parts) {
    all.total += p.total;
    all.undetected += p.undetected;
  }
  return CodebookErrorEstimates{proportion_estimate("codebook_e1", all.total, trials, 1.0, z),
                                proportion_estimate("codebook_e2", all.undetected, trials, 1.0, z)};
}

}  // namespace erasurelab
