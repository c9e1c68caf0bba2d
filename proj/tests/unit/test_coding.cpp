#include <cmath>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "erasurelab/coding.hpp"
#include "erasurelab/error.hpp"
#include "erasurelab/oracle.hpp"
#include "reference.hpp"

using namespace erasurelab;

TEST(CodeSize, Examples) {
  EXPECT_EQ(code_size({100, 0.5, 1.0, 0.5, 0.2}), static_cast<std::uint64_t>(std::llround(std::exp(10.0))));
  EXPECT_EQ(code_size({50, 0.5, 0.0, 0.5, 0.1}), static_cast<std::uint64_t>(std::llround(std::exp(5.0))));
  // Exponent just below log 2.
  const double c = (std::log(2.0) - 1e-9) / 10.0;
  EXPECT_THROW(code_size({10, 0.5, 0.0, 0.5, c}), InfeasibleSchedule);
  EXPECT_EQ(code_size({10, 0.5, 0.0, 0.5, (std::log(2.0) + 1e-9) / 10.0}), 2u);
  // Cap at 2^31.
  EXPECT_THROW(code_size({100, 0.5, 0.0, 0.5, 0.3}), InfeasibleSchedule);
}

TEST(CodeSize, Monotone) {
  for (double a = 0.0; a < 2.0; a += 0.25) {
    for (std::size_t n = 20; n < 200; n += 20) {
      const RegimeParams p{n, 0.5, a, 0.1, 0.12};
      const RegimeParams more_a{n, 0.5, a + 0.25, 0.1, 0.12};
      const RegimeParams more_c{n, 0.5, a, 0.1, 0.13};
      try {
        const auto m = code_size(p);
        try {
          EXPECT_LE(code_size(more_a), m);
        } catch (const InfeasibleSchedule&) {
        }
        EXPECT_GE(code_size(more_c), m);
      } catch (const InfeasibleSchedule&) {
      }
    }
  }
}

TEST(Threshold, Examples) {
  EXPECT_NEAR(threshold({100, 0.5, 1.0, 0.5, 0.2}), 0.05, 1e-15);
  EXPECT_NEAR(threshold({10000, 0.5, 1.0, 0.1, 0.2}), 0.001, 1e-15);
  EXPECT_THROW(threshold({100, 0.5, 1.0, 0.0, 0.2}), InvalidArgument);
  double prev = 1e9;
  for (std::size_t n = 1; n < 500; n += 7) {
    const double t = threshold({n, 0.3, 1.0, 0.4, 0.2});
    EXPECT_LT(t, prev);
    EXPECT_GT(t, 0.0);
    prev = t;
  }
}

TEST(RegimeParams, Validation) {
  EXPECT_THROW(RegimeParams({10, 0.3, 0.1, 0.2, 0.1}).validate(), InvalidArgument);  // a <= b, t < 1/2
  EXPECT_NO_THROW(RegimeParams({10, 0.5, 0.1, 0.2, 0.1}).validate());
  EXPECT_THROW(RegimeParams({10, 0.6, 1.0, 0.2, 0.1}).validate(), InvalidArgument);
  EXPECT_THROW(RegimeParams({10, 0.0, 1.0, 0.2, 0.1}).validate(), InvalidArgument);
  EXPECT_THROW(RegimeParams({0, 0.5, 1.0, 0.2, 0.1}).validate(), InvalidArgument);
}

TEST(SampleCodebook, Deterministic) {
  const auto a = sample_codebook(16, 3, 50, 99);
  const auto b = sample_codebook(16, 3, 50, 99);
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a == sample_codebook(16, 3, 50, 100));
  EXPECT_EQ(a.size(), 50u);
  EXPECT_EQ(a.seed(), 99u);
}

TEST(SampleCodebook, UniformSymbols) {
  for (std::size_t d : {2u, 3u, 4u, 5u}) {
    const auto cb = sample_codebook(1000, d, 1000, 7 + d);
    std::vector<double> count(d, 0.0);
    for (auto s : cb.symbols()) ++count[s];
    const double total = 1e6, p = 1.0 / d;
    for (double c : count) EXPECT_NEAR(c / total, p, 4 * std::sqrt(p * (1 - p) / total));
  }
}

TEST(SampleCodebook, SeedSweepHitsAllBooks) {
  std::set<std::vector<Symbol>> seen;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto cb = sample_codebook(1, 2, 2, s);
    seen.insert(std::vector<Symbol>(cb.symbols().begin(), cb.symbols().end()));
  }
  EXPECT_EQ(seen.size(), 4u);
}

TEST(Codebook, SerializationRoundTrip) {
  const auto cb = sample_codebook(7, 5, 13, 1234);
  std::stringstream ss;
  write_codebook(ss, cb);
  const std::string bytes = ss.str();
  ASSERT_EQ(bytes.substr(0, 4), "ERLB");
  EXPECT_EQ(bytes.size(), 4u + 2 + 4 + 2 + 8 + 8 + 7 * 13);
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1);  // version, little-endian
  const auto back = read_codebook(ss);
  EXPECT_EQ(back, cb);
  EXPECT_EQ(back.seed(), 1234u);
  std::stringstream bad("XXXX");
  EXPECT_THROW(read_codebook(bad), InvalidArgument);
  std::stringstream truncated(bytes.substr(0, bytes.size() - 1));
  EXPECT_THROW(read_codebook(truncated), InvalidArgument);
}

namespace {

ErrorPair exact_pair(const Codebook& cb, const AdditiveChannel& ch, double T) {
  const auto e = exact_error_probs(cb, ch, ForneyRule{T});
  return {e.p_total(), e.p_undetected};
}

}  // namespace

TEST(Derandomize, VacuousTargets) {
  AdditiveChannel ch(NoiseDistribution({0.9, 0.1}));
  std::vector<std::uint64_t> seeds = {5, 6, 7};
  int calls = 0;
  const auto r = derandomize(3, 2, 2, {1.0, 1.0}, seeds, [&](const Codebook& cb) {
    ++calls;
    return exact_pair(cb, ch, 0.1);
  });
  EXPECT_EQ(r.rejections, 0u);
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(r.codebook, sample_codebook(3, 2, 2, 5));
}

TEST(Derandomize, MarkovFractionAndFailure) {
  // n=3, d=2, M=2: every codebook, exact errors; targets at the ensemble means.
  AdditiveChannel ch(NoiseDistribution({0.9, 0.1}));
  const double T = 0.1;
  const auto ens = exact_ensemble(3, 2, 2, ch, ForneyRule{T}, EnsembleMethod::full_enumeration);
  const ErrorPair targets{ens.p_total(), ens.p_undetected};
  int accepted = 0, total = 0;
  double min_total = 1.0;
  for (const auto& x1 : reference::all_words(3, 2)) {
    for (const auto& x2 : reference::all_words(3, 2)) {
      std::vector<Symbol> sym(x1.begin(), x1.end());
      sym.insert(sym.end(), x2.begin(), x2.end());
      const auto e = exact_pair(Codebook(3, 2, sym), ch, T);
      min_total = std::min(min_total, e.total);
      ++total;
      if (e.total <= 2 * targets.total && e.undetected <= 2 * targets.undetected) ++accepted;
    }
  }
  // Markov with factor 2: under half the books fail each budget, so some pass both.
  EXPECT_GT(accepted, 0);
  std::vector<std::uint64_t> seeds(64);
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = i;
  const auto r = derandomize(3, 2, 2, targets, seeds, [&](const Codebook& cb) { return exact_pair(cb, ch, T); });
  EXPECT_LE(r.errors.total, 2 * targets.total);
  EXPECT_LE(r.errors.undetected, 2 * targets.undetected);
  EXPECT_EQ(exact_pair(r.codebook, ch, T).total, r.errors.total);

  try {
    derandomize(3, 2, 2, {min_total / 4, 1.0}, seeds, [&](const Codebook& cb) { return exact_pair(cb, ch, T); });
    FAIL() << "expected failure";
  } catch (const DerandomizeFailure& f) {
    EXPECT_EQ(f.tried(), seeds.size());
    EXPECT_GE(f.best_total().total, min_total);
  }
}

TEST(Derandomize, ScheduleForm) {
  AdditiveChannel ch(NoiseDistribution({0.999, 0.001}));
  const RegimeParams p{4, 0.5, 1.0, 0.3, ch.capacity()};
  std::vector<std::uint64_t> seeds = {1};
  const auto r = derandomize(p, ch, {1.0, 1.0}, seeds, [&](const Codebook& cb) {
    EXPECT_EQ(cb.size(), code_size(p));
    return exact_pair(cb, ch, threshold(p));
  });
  EXPECT_TRUE(r.codebook.schedule().has_value());
}
