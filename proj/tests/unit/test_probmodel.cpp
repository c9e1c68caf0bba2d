#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "erasurelab/error.hpp"
#include "erasurelab/probmodel.hpp"
#include "reference.hpp"

using namespace erasurelab;

TEST(NoiseDistribution, RejectsInvalid) {
  EXPECT_THROW(NoiseDistribution({1.0}), InvalidArgument);
  EXPECT_THROW(NoiseDistribution({0.5, 0.5000001}), InvalidArgument);
  EXPECT_THROW(NoiseDistribution({1.0, 0.0}), InvalidArgument);
  EXPECT_THROW(NoiseDistribution({1.2, -0.2}), InvalidArgument);
  EXPECT_NO_THROW(NoiseDistribution({0.5, 0.5 + 5e-13}));
}

TEST(Entropy, Uniform) {
  EXPECT_NEAR(entropy(NoiseDistribution::uniform(2)), std::log(2.0), 1e-15);
  EXPECT_NEAR(entropy(NoiseDistribution::uniform(4)), std::log(4.0), 1e-15);
}

TEST(Entropy, MatchesHighPrecision) {
  const std::vector<double> p = {0.89, 0.11};
  EXPECT_NEAR(entropy(NoiseDistribution(p)), reference::to_double(reference::entropy(p)), 1e-15);
}

TEST(Varentropy, UniformIsZero) {
  for (std::size_t d = 2; d <= 7; ++d) EXPECT_NEAR(varentropy(NoiseDistribution::uniform(d)), 0.0, 1e-15);
}

TEST(Varentropy, MatchesHighPrecision) {
  for (const auto& p : {std::vector<double>{0.75, 0.25}, std::vector<double>{0.6, 0.4},
                        std::vector<double>{0.7, 0.1, 0.1, 0.1}}) {
    EXPECT_NEAR(varentropy(NoiseDistribution(p)), reference::to_double(reference::varentropy(p)),
                1e-15);
  }
  const double h = reference::to_double(reference::entropy({0.75, 0.25}));
  const double direct = 0.75 * std::pow(std::log(4.0 / 3.0) - h, 2) + 0.25 * std::pow(std::log(4.0) - h, 2);
  EXPECT_NEAR(varentropy(NoiseDistribution({0.75, 0.25})), direct, 1e-15);
}

TEST(Probmodel, GridProperties) {
  // Binary and ternary grids: 0 <= V, H <= log d, equality exactly at uniform.
  for (int i = 1; i < 100; ++i) {
    const double q = i / 100.0;
    NoiseDistribution p({q, 1.0 - q});
    EXPECT_GE(varentropy(p), 0.0);
    EXPECT_LE(entropy(p), std::log(2.0) + 1e-15);
    if (i != 50) {
      EXPECT_GT(varentropy(p), 1e-12);
      EXPECT_LT(entropy(p), std::log(2.0));
    }
  }
  for (int i = 1; i < 20; ++i) {
    for (int j = 1; i + j < 20; ++j) {
      const double a = i / 20.0, b = j / 20.0;
      NoiseDistribution p({a, b, 1.0 - a - b});
      EXPECT_GE(varentropy(p), 0.0);
      EXPECT_LE(entropy(p), std::log(3.0) + 1e-15);
    }
  }
}

TEST(RenyiCgf, DerivativesAtZero) {
  NoiseDistribution p({0.6, 0.4});
  EXPECT_EQ(renyi_cgf(p, 0.0), 0.0);
  const double h = 1e-5;
  const double d1 = (renyi_cgf(p, h) - renyi_cgf(p, -h)) / (2 * h);
  EXPECT_NEAR(d1, -entropy(p), 1e-8);
  const double d2 = (renyi_cgf(p, h) - 2 * renyi_cgf(p, 0.0) + renyi_cgf(p, -h)) / (h * h);
  EXPECT_NEAR(d2, -varentropy(p), 1e-6);
}

TEST(RenyiCgf, MidpointConcavity) {
  // -psi(s) = log E[P(Z)^-s] is the CGF of the self-information, so convex.
  NoiseDistribution p({0.5, 0.3, 0.2});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const double s1 = u(rng), s2 = u(rng);
    const double mid = -renyi_cgf(p, 0.5 * (s1 + s2));
    const double chord = 0.5 * (-renyi_cgf(p, s1) - renyi_cgf(p, s2));
    EXPECT_LE(mid, chord + 1e-12);
  }
}

TEST(Gaussian, Cdf) {
  EXPECT_EQ(gaussian_cdf(0.0), 0.5);
  EXPECT_NEAR(gaussian_cdf(10.0), 1.0, 1e-12);
  EXPECT_NEAR(gaussian_cdf(1.96), reference::gaussian_cdf(1.96), 1e-15);
  EXPECT_NEAR(gaussian_cdf(1.96), 0.975, 1e-4);
  for (double x = -8; x <= 8; x += 0.37) {
    EXPECT_NEAR(gaussian_cdf(x) + gaussian_cdf(-x), 1.0, 1e-12);
    EXPECT_NEAR(gaussian_cdf(x), reference::gaussian_cdf(x), 1e-15);
    EXPECT_LT(gaussian_cdf(x), gaussian_cdf(x + 0.01));
  }
  EXPECT_NEAR(gaussian_pdf(0.0), 1.0 / std::sqrt(2 * M_PI), 1e-16);
}
