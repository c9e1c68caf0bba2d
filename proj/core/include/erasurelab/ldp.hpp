#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "erasurelab/channel.hpp"

namespace erasurelab {

// How the normalizing sequences of a shifted CGF expansion
//   mu_n(theta0 + gamma_n y) = alpha_n + beta_n nu1 + beta_n gamma_n nu2_n(y)
// relate asymptotically.
enum class ScaleRelation {
  diverging,   // beta_n gamma_n -> infinity
  reciprocal,  // beta_n = 1 / gamma_n
  other,
};

enum class GeCase {
  ia,   // theta0 < 0, beta_n gamma_n -> infinity
  ib,   // theta0 < 0, beta_n = 1/gamma_n, nu2 quadratic
  ii,   // theta0 = 0, y0 < 0, alpha_n = nu1 = 0, beta_n gamma_n -> infinity
  outside_hypotheses,
};

std::string to_string(GeCase c);

struct GeProblem {
  double theta0 = 0.0;  // <= 0
  double nu1 = 0.0;
  std::function<double(double)> nu2;
  std::function<double(double)> nu2_prime;  // optional
  // Open interval G on which nu2 is C^2 and strictly convex; must contain 0.
  double domain_low = -std::numeric_limits<double>::infinity();
  double domain_high = std::numeric_limits<double>::infinity();
  double x = 0.0;
  ScaleRelation scales = ScaleRelation::diverging;
  bool alpha_vanishes = false;

  // theta0 <= 0, nu2 present, 0 in G, |nu2(0)| <= 1e-12.
  void validate() const;
  // nu2' from the analytic derivative if given, else central differences with
  // step 1e-6 and one Richardson extrapolation.
  double slope(double y) const;
};

enum class GeStatus {
  ok,
  unverified,  // strict convexity failed a midpoint check
};

struct GeSolution {
  double y0 = 0.0;
  double rate = 0.0;          // y0 x - nu2(y0)
  double leading_term = 0.0;  // theta0 x - nu1, the coefficient of beta_n
  GeStatus status = GeStatus::ok;
  GeCase theorem_case = GeCase::outside_hypotheses;
  bool quadratic = false;
};

// Solves nu2'(y0) = x by bracketing outwards from y = 0 and bisecting.
// Throws InvalidArgument("x outside achievable slope range") when no bracket
// exists inside G.
GeSolution ge_rate(const GeProblem& problem);

// Midpoint test of strict convexity on `samples` random pairs in G (or a
// bounded window of it).
bool sampled_strictly_convex(const std::function<double(double)>& f, double low, double high,
                             int samples = 200);

enum class SignDomain { nonnegative, nonpositive };

struct FenchelResult {
  double value = 0.0;  // +inf when unbounded above
  double argmax = 0.0;
  bool infinite = false;
  // Largest s x - xi(s) over the 100 random certificate points; never above
  // value.
  double certificate_max = -std::numeric_limits<double>::infinity();
};

// sup over the sign domain of s x - xi(s), xi convex. Points where xi is NaN or
// +inf are treated as outside the effective domain.
FenchelResult fenchel_legendre(const std::function<double(double)>& xi, double x,
                               SignDomain domain = SignDomain::nonnegative);

enum class Regime { moderate, mixed };

/// Asymptotic error behaviour of the random-coding ensemble (or a direct
/// construction) at backoff a n^-t and decoder margin b n^(1-t).
struct RegimePrediction {
  Regime regime = Regime::moderate;
  double t = 0.0, a = 0.0, b = 0.0, V = 0.0;

  // Moderate: -log Pr(E1) ~ e1_value n^(1-2t). Mixed: Pr(E1) -> e1_value.
  double e1_value = 0.0;
  bool e1_is_limit = false;
  double e1_power = 0.0;

  // -log Pr(E2) >= e2_leading n^(1-t) + e2_second_order n^(1-2t) (+ o).
  double e2_leading = 0.0;
  double e2_leading_power = 0.0;
  double e2_second_order = 0.0;
  double e2_second_power = 0.0;

  // Leading-order values at blocklength n.
  double e1_at(double n) const;
  double e2_log_lower(double n) const;  // lower-bound side of -log Pr(E2)
};

// a > b > 0, 0 < t < 1/2, V > 0.
RegimePrediction predict_md(double a, double b, double t, double V);
// t = 1/2; b > 0, V > 0.
RegimePrediction predict_mixed(double a, double b, double V);

struct DirectOptions {
  // Set when the caller knows the capacity-achieving input is unique, so
  // V_min = V_max = V at the computed caid.
  bool unique_caid = false;
  double tol = 1e-12;
};

// V_min / V_max rule of the direct results. Additive channels (detected from
// the matrix) use V(P); other channels need DirectOptions::unique_caid.
RegimePrediction predict_direct(const GeneralDmc& w, double a, double b, double t,
                                DirectOptions options = {});
RegimePrediction predict_direct(const AdditiveChannel& ch, double a, double b, double t);

struct ParetoPoint {
  double b = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
};

// (b, e1 exponent, e2 leading exponent) along b_grid for t < 1/2; for t = 1/2
// e1 is the limiting probability.
std::vector<ParetoPoint> pareto_curve(double a, double t, double V,
                                      const std::vector<double>& b_grid);

// Returns the noise distribution when every row of w is the cyclic shift of
// row 0 (within 1e-12), i.e. w is additive.
std::optional<NoiseDistribution> as_additive(const GeneralDmc& w);

struct PredictionRow {
  std::size_t n = 0;
  std::size_t d = 0;
  std::uint64_t seed = 0;
  RegimePrediction prediction;
};

// One row per predicted quantity (e1, e2) keyed by n, t, a, b, d, seed so it
// joins with the measurement CSV. For e2 the value is exp(-e2_log_lower).
void write_predictions_csv(std::ostream& out, const std::vector<PredictionRow>& rows);

}  // namespace erasurelab
