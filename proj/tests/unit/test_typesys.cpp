#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "erasurelab/error.hpp"
#include "erasurelab/logmath.hpp"
#include "erasurelab/typesys.hpp"
#include "reference.hpp"

using namespace erasurelab;

TEST(EnumerateTypes, Counts) {
  EXPECT_EQ(enumerate_types(4, 2).size(), 5u);
  EXPECT_EQ(enumerate_types(2, 3).size(), 6u);
  for (std::size_t n = 1; n <= 20; ++n) {
    for (std::size_t d = 2; d <= 4; ++d) {
      const auto types = enumerate_types(n, d);
      EXPECT_EQ(types.size(), reference::type_count(n, d)) << n << "," << d;
      EXPECT_EQ(type_count(n, d), static_cast<double>(reference::type_count(n, d)));
      for (std::size_t i = 1; i < types.size(); ++i) EXPECT_LT(types[i - 1], types[i]);
      for (const auto& q : types) EXPECT_EQ(q.n(), n);
    }
  }
  EXPECT_THROW(enumerate_types(200, 8), BudgetExceeded);
}

TEST(TypeClassSize, Examples) {
  EXPECT_EQ(type_class_log_size(TypeVector({5, 0, 0})), 0.0);
  EXPECT_NEAR(type_class_log_size(TypeVector({2, 2})), std::log(6.0), 1e-14);
}

TEST(TypeClassSize, Sandwich) {
  for (std::size_t n = 1; n <= 20; ++n) {
    for (std::size_t d = 2; d <= 3; ++d) {
      for (const auto& q : enumerate_types(n, d)) {
        const double nh = n * type_entropy(q);
        const double v = type_class_log_size(q);
        EXPECT_LE(v, nh + 1e-12);
        EXPECT_GE(v, nh - (d - 1.0) * std::log(n + 1.0) - 1e-12);
      }
    }
  }
}

TEST(TypeVector, SequenceProbabilityIdentity) {
  // exp(-n [D(Q||P) + H(Q)]) is the P^n-probability of each sequence of type Q.
  const std::vector<double> p = {0.65, 0.35};
  NoiseDistribution P(p);
  for (std::size_t n = 1; n <= 8; ++n) {
    for (const auto& w : reference::all_words(n, 2)) {
      const auto q = TypeVector::of(Word(w.begin(), w.end()), 2);
      const double lhs = -static_cast<double>(n) * (type_divergence(q, P) + type_entropy(q));
      const double direct = std::log(reference::to_double(reference::likelihood(p, Word(n, 0), w)));
      EXPECT_NEAR(lhs, direct, 1e-12);
      EXPECT_NEAR(log_sequence_prob(q, P), direct, 1e-12);
    }
  }
}

TEST(SelectPn, Example) {
  NoiseDistribution p({0.75, 0.25});
  const auto q = nearest_type_with_entropy(p, 4, 0.6);
  EXPECT_EQ(std::vector<std::uint32_t>(q.counts().begin(), q.counts().end()), (std::vector<std::uint32_t>{2, 2}));
  EXPECT_NEAR(l1_distance(q, p), 0.5, 1e-15);
  // Inactive constraint: the l1-nearest type overall.
  const auto r = nearest_type_with_entropy(p, 4, 0.0);
  EXPECT_EQ(std::vector<std::uint32_t>(r.counts().begin(), r.counts().end()), (std::vector<std::uint32_t>{3, 1}));
  EXPECT_THROW(nearest_type_with_entropy(p, 4, std::log(2.0) + 1e-9), InvalidArgument);
}

TEST(SelectPn, OptimalAndFeasible) {
  NoiseDistribution p({0.5, 0.3, 0.2});
  for (std::size_t n : {3u, 7u, 12u}) {
    for (double a : {0.05, 0.2}) {
      const double target = entropy(p) + 2 * a * std::pow(n, -0.3);
      if (target > std::log(3.0)) continue;
      TypeVector q({1, 1, 1});
      try {
        q = select_Pn(p, n, a, 0.3);
      } catch (const InvalidArgument&) {
        for (const auto& r : enumerate_types(n, 3)) EXPECT_LT(type_entropy(r), target);
        continue;
      }
      EXPECT_GE(type_entropy(q), target);
      const double dq = l1_distance(q, p);
      for (const auto& r : enumerate_types(n, 3)) {
        if (type_entropy(r) < target) continue;
        EXPECT_GE(l1_distance(r, p), dq);
        if (l1_distance(r, p) == dq) EXPECT_LE(q, r);  // lexicographic tie-break
      }
    }
  }
}

TEST(TypeEnumerator, SingletonAndSum) {
  const auto cb = sample_codebook(5, 2, 2, 1);
  const Word y = {0, 1, 1, 0, 1};
  const auto e = type_enumerator(cb, y, 0);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e.begin()->second, 1u);
  const auto big = sample_codebook(6, 3, 40, 2);
  std::uint64_t total = 0;
  for (const auto& [q, c] : type_enumerator(big, Word{0, 1, 2, 0, 1, 2}, 7)) total += c;
  EXPECT_EQ(total, 39u);
}

TEST(TypeEnumerator, LikelihoodIdentity) {
  const std::vector<double> p = {0.5, 0.3, 0.2};
  NoiseDistribution P(p);
  AdditiveChannel ch(P);
  const auto cb = sample_codebook(6, 3, 30, 9);
  const Word y = {2, 2, 1, 0, 0, 1};
  LogSumAccumulator via_types, direct;
  for (const auto& [q, c] : type_enumerator(cb, y, 3)) {
    via_types.add_weighted(-6.0 * (type_divergence(q, P) + type_entropy(q)), static_cast<double>(c));
  }
  for (std::size_t m = 0; m < cb.size(); ++m)
    if (m != 3) direct.add(log_likelihood(ch, cb.word(m), y));
  EXPECT_NEAR(std::exp(via_types.value()), std::exp(direct.value()), 1e-10);
}

TEST(TypeEnumerator, EnsembleMean) {
  // Mean of N(Q) over random codebooks is (M-1) |T_Q| / d^n.
  const std::size_t n = 6, M = 5;
  const Word y = {0, 1, 0, 0, 1, 1};
  const auto types = enumerate_types(n, 2);
  std::vector<double> sum(types.size(), 0.0), sq(types.size(), 0.0);
  const int reps = 100000;
  for (int r = 0; r < reps; ++r) {
    const auto e = type_enumerator(sample_codebook(n, 2, M, 1000 + r), y, 0);
    for (std::size_t i = 0; i < types.size(); ++i) {
      const auto it = e.find(types[i]);
      const double c = it == e.end() ? 0.0 : static_cast<double>(it->second);
      sum[i] += c;
      sq[i] += c * c;
    }
  }
  for (std::size_t i = 0; i < types.size(); ++i) {
    const double mean = sum[i] / reps;
    const double sd = std::sqrt((sq[i] / reps - mean * mean) / reps);
    const double expect = (M - 1) * std::exp(type_class_log_size(types[i])) / 64.0;
    EXPECT_NEAR(mean, expect, 4 * sd + 1e-12);
  }
}

TEST(TypesCsv, Columns) {
  std::ostringstream out;
  NoiseDistribution p({0.75, 0.25});
  write_types_csv(out, enumerate_types(2, 2), &p);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "c0,c1,entropy,divergence,log_class_size");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
}
