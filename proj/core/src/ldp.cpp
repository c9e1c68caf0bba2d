#include "erasurelab/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "erasurelab/csv.hpp"
#include "erasurelab/error.hpp"
#include "erasurelab/probmodel.hpp"

namespace erasurelab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDiffStep = 1e-6;

// Window used for sampled checks when G is unbounded.
std::pair<double, double> sample_window(double low, double high) {
  const double lo = std::isfinite(low) ? low : -10.0;
  const double hi = std::isfinite(high) ? high : 10.0;
  return {std::max(lo, -10.0), std::min(hi, 10.0)};
}

// A quadratic has a constant second difference; compared on a few spans.
bool looks_quadratic(const std::function<double(double)>& f, double low, double high) {
  const auto [lo, hi] = sample_window(low, high);
  const double h = 0.125 * (hi - lo);
  double ref = 0.0;
  for (int i = 0; i < 6; ++i) {
    const double c = lo + h * (i + 1);
    const double s2 = (f(c + h) - 2.0 * f(c) + f(c - h)) / (h * h);
    const double scale = std::abs(f(c + h)) + std::abs(f(c)) + std::abs(f(c - h));
    if (i == 0) {
      ref = s2;
    } else if (std::abs(s2 - ref) > 1e-6 * (1.0 + std::abs(ref) + scale / (h * h))) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::string to_string(GeCase c) {
  switch (c) {
    case GeCase::ia: return "ia";
    case GeCase::ib: return "ib";
    case GeCase::ii: return "ii";
    case GeCase::outside_hypotheses: return "outside theorem hypotheses";
  }
  return "outside theorem hypotheses";
}

void GeProblem::validate() const {
  if (!(theta0 <= 0.0)) throw InvalidArgument("theta0 must be <= 0");
  if (!nu2) throw InvalidArgument("nu2 is required");
  if (!(domain_low < 0.0 && 0.0 < domain_high)) {
    throw InvalidArgument("the domain of nu2 must be an open interval containing 0");
  }
  const double at0 = nu2(0.0);
  if (!(std::abs(at0) <= 1e-12)) {
    throw InvalidArgument("nu2(0) must vanish, got " + std::to_string(at0));
  }
  if (!std::isfinite(x)) throw InvalidArgument("x must be finite");
}

double GeProblem::slope(double y) const {
  if (nu2_prime) return nu2_prime(y);
  // Keep the stencil inside G.
  double h = kDiffStep;
  const double room = std::min(y - domain_low, domain_high - y);
  if (room <= h) h = 0.5 * room;
  const auto central = [&](double step) { return (nu2(y + step) - nu2(y - step)) / (2.0 * step); };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

bool sampled_strictly_convex(const std::function<double(double)>& f, double low, double high,
                             int samples) {
  const auto [lo, hi] = sample_window(low, high);
  std::mt19937_64 rng(0x5eedc0de);
  std::uniform_real_distribution<double> u(lo, hi);
  for (int i = 0; i < samples; ++i) {
    const double p = u(rng);
    const double q = u(rng);
    if (std::abs(p - q) < 1e-6 * (hi - lo)) continue;
    const double mid = f(0.5 * (p + q));
    const double chord = 0.5 * (f(p) + f(q));
    if (!(mid < chord)) return false;
  }
  return true;
}

GeSolution ge_rate(const GeProblem& problem) {
  problem.validate();
  GeSolution out;
  out.leading_term = problem.theta0 * problem.x - problem.nu1;
  out.status = sampled_strictly_convex(problem.nu2, problem.domain_low, problem.domain_high)
                   ? GeStatus::ok
                   : GeStatus::unverified;
  out.quadratic = looks_quadratic(problem.nu2, problem.domain_low, problem.domain_high);

  const double x = problem.x;
  // For a quadratic nu2 any symmetric secant is exact, and a wide one carries
  // far less roundoff than the 1e-6 stencil. It is used only where it agrees
  // with the stencil to within the stencil's own noise.
  const bool wide_secant = out.quadratic && !problem.nu2_prime;
  const auto slope = [&](double y) {
    const double fine = problem.slope(y);
    if (!wide_secant) return fine;
    const double room = std::min(y - problem.domain_low, problem.domain_high - y);
    const double h = std::min(std::max(1.0, std::abs(y)), 0.5 * room);
    const double wide = (problem.nu2(y + h) - problem.nu2(y - h)) / (2.0 * h);
    const double noise = 1e-6 * (1.0 + std::abs(problem.nu2(y)) + std::abs(fine));
    return std::abs(wide - fine) <= noise ? wide : fine;
  };
  const auto g = [&](double y) { return slope(y) - x; };
  const double g0 = g(0.0);
  if (std::abs(g0) <= 1e-10) {
    out.y0 = 0.0;
    out.rate = 0.0;
  } else {
    // Slope increases, so the root lies on the side where g changes sign.
    const double dir = g0 < 0.0 ? 1.0 : -1.0;
    const double boundary = dir > 0.0 ? problem.domain_high : problem.domain_low;
    double inner = 0.0;
    double outer = 0.0;
    double step = 1.0;
    bool bracketed = false;
    for (int it = 0; it < 2100; ++it) {
      double cand = dir * step;
      if (std::isfinite(boundary) && std::abs(cand) >= std::abs(boundary)) {
        cand = 0.5 * (inner + boundary);  // creep towards the open end
        if (cand == inner) break;
      }
      const double gc = g(cand);
      if (std::isnan(gc)) break;
      if ((gc >= 0.0) == (dir > 0.0)) {
        outer = cand;
        bracketed = true;
        break;
      }
      inner = cand;
      step *= 2.0;
      if (!std::isfinite(step)) break;
    }
    if (!bracketed) throw InvalidArgument("x outside achievable slope range");
    double lo = std::min(inner, outer);
    double hi = std::max(inner, outer);
    for (int it = 0; it < 400; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double gm = g(mid);
      if (gm == 0.0) {
        lo = hi = mid;
        break;
      }
      (gm < 0.0 ? lo : hi) = mid;
    }
    const double glo = std::abs(g(lo));
    const double ghi = std::abs(g(hi));
    out.y0 = glo <= ghi ? lo : hi;
    out.rate = out.y0 * x - problem.nu2(out.y0);
  }

  if (problem.theta0 < 0.0) {
    if (problem.scales == ScaleRelation::diverging) {
      out.theorem_case = GeCase::ia;
    } else if (problem.scales == ScaleRelation::reciprocal && out.quadratic) {
      out.theorem_case = GeCase::ib;
    }
  } else if (problem.scales == ScaleRelation::diverging && problem.alpha_vanishes &&
             problem.nu1 == 0.0 && out.y0 < 0.0) {
    out.theorem_case = GeCase::ii;
  }
  return out;
}

FenchelResult fenchel_legendre(const std::function<double(double)>& xi, double x,
                               SignDomain domain) {
  const double sign = domain == SignDomain::nonnegative ? 1.0 : -1.0;
  // Objective in r = |s| >= 0; concave.
  const auto h = [&](double r) {
    const double s = sign * r;
    const double v = xi(s);
    if (std::isnan(v) || v == kInf) return -kInf;
    return s * x - v;
  };

  FenchelResult res;
  const double h0 = h(0.0);
  // Expand until the objective turns down; the maximizer then lies between the
  // point before the last rise and hi.
  double before = 0.0;
  double last = 0.0;
  double hi = 1.0;
  double prev = h0;
  for (int it = 0;; ++it) {
    const double v = h(hi);
    if (!(v > prev) || v == -kInf) break;
    if (it > 1100 || !std::isfinite(v) || hi > 1e300) {
      res.infinite = true;
      res.value = kInf;
      res.argmax = sign * kInf;
      return res;
    }
    before = last;
    last = hi;
    prev = v;
    hi *= 2.0;
  }
  const double lo = before;

  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double hc = h(c);
  double hd = h(d);
  for (int it = 0; it < 300 && (b - a) > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (hc >= hd) {
      b = d;
      d = c;
      hd = hc;
      c = b - kInvPhi * (b - a);
      hc = h(c);
    } else {
      a = c;
      c = d;
      hc = hd;
      d = a + kInvPhi * (b - a);
      hd = h(d);
    }
  }
  double best_r = hc >= hd ? c : d;
  double best = std::max(hc, hd);
  if (h0 >= best) {
    best = h0;
    best_r = 0.0;
  }

  // Certificate: the supremum is at least every sampled value.
  std::mt19937_64 rng(0xfe11c4e7);
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::max(best_r, 1.0));
  for (int i = 0; i < 100; ++i) {
    const double r = u(rng);
    const double v = h(r);
    res.certificate_max = std::max(res.certificate_max, v);
    if (v > best) {
      best = v;
      best_r = r;
    }
  }
  res.value = best;
  res.argmax = sign * best_r;
  return res;
}

double RegimePrediction::e1_at(double n) const {
  if (e1_is_limit) return e1_value;
  return std::exp(-e1_value * std::pow(n, e1_power));
}

double RegimePrediction::e2_log_lower(double n) const {
  return e2_leading * std::pow(n, e2_leading_power) +
         e2_second_order * std::pow(n, e2_second_power);
}

RegimePrediction predict_md(double a, double b, double t, double V) {
  if (!(a > b && b > 0.0)) throw InvalidArgument("moderate deviations need a > b > 0");
  if (!(t > 0.0 && t < 0.5)) throw InvalidArgument("moderate deviations need 0 < t < 1/2");
  if (!(V > 0.0)) throw InvalidArgument("dispersion must be positive");
  RegimePrediction p;
  p.regime = Regime::moderate;
  p.t = t;
  p.a = a;
  p.b = b;
  p.V = V;
  p.e1_value = (a - b) * (a - b) / (2.0 * V);
  p.e1_power = 1.0 - 2.0 * t;
  p.e2_leading = b;
  p.e2_leading_power = 1.0 - t;
  p.e2_second_order = p.e1_value;
  p.e2_second_power = 1.0 - 2.0 * t;
  return p;
}

RegimePrediction predict_mixed(double a, double b, double V) {
  if (!(b > 0.0)) throw InvalidArgument("the mixed regime needs b > 0");
  if (!(V > 0.0)) throw InvalidArgument("dispersion must be positive");
  RegimePrediction p;
  p.regime = Regime::mixed;
  p.t = 0.5;
  p.a = a;
  p.b = b;
  p.V = V;
  p.e1_value = gaussian_cdf((b - a) / std::sqrt(V));
  p.e1_is_limit = true;
  p.e1_power = 0.0;
  p.e2_leading = b;
  p.e2_leading_power = 0.5;
  p.e2_second_order = (a - b) * (a - b) / (2.0 * V);
  p.e2_second_power = 0.0;
  return p;
}

std::optional<NoiseDistribution> as_additive(const GeneralDmc& w) {
  const auto d = w.inputs();
  if (d != w.outputs() || d < 2) return std::nullopt;
  for (std::size_t x = 1; x < d; ++x) {
    for (std::size_t y = 0; y < d; ++y) {
      if (std::abs(w.w(y, x) - w.w((y + d - x) % d, 0)) > 1e-12) return std::nullopt;
    }
  }
  for (std::size_t y = 0; y < d; ++y) {
    if (!(w.w(y, 0) > 0.0)) return std::nullopt;
  }
  try {
    return NoiseDistribution(w.row(0));
  } catch (const InvalidArgument&) {
    return std::nullopt;
  }
}

namespace {

RegimePrediction predict_with(double v_min, double v_max, double a, double b, double t) {
  if (t == 0.5) return predict_mixed(a, b, a <= 0.0 ? v_max : v_min);
  return predict_md(a, b, t, v_min);
}

}  // namespace

RegimePrediction predict_direct(const AdditiveChannel& ch, double a, double b, double t) {
  const double v = varentropy(ch.noise());
  return predict_with(v, v, a, b, t);
}

RegimePrediction predict_direct(const GeneralDmc& w, double a, double b, double t,
                                DirectOptions options) {
  if (auto p = as_additive(w)) return predict_direct(AdditiveChannel(*p), a, b, t);
  if (!options.unique_caid) {
    throw InvalidArgument(
        "V_min and V_max need the full set of capacity-achieving inputs; this channel is not "
        "additive, so pass unique_caid only if its capacity-achieving input is unique");
  }
  const auto rep = dispersion(w, options.tol);
  return predict_with(rep.dispersion, rep.dispersion, a, b, t);
}

std::vector<ParetoPoint> pareto_curve(double a, double t, double V,
                                      const std::vector<double>& b_grid) {
  std::vector<ParetoPoint> out;
  out.reserve(b_grid.size());
  for (double b : b_grid) {
    const auto p = t == 0.5 ? predict_mixed(a, b, V) : predict_md(a, b, t, V);
    out.push_back({b, p.e1_value, p.e2_leading});
  }
  return out;
}

void write_predictions_csv(std::ostream& out, const std::vector<PredictionRow>& rows) {
  CsvWriter csv(out, {"n", "t", "a", "b", "d", "seed", "estimator", "quantity", "value",
                      "neg_log_value", "V", "regime"});
  for (const auto& r : rows) {
    const auto& p = r.prediction;
    const double n = static_cast<double>(r.n);
    const double e1 = p.e1_at(n);
    const double e2_neg_log = p.e2_log_lower(n);
    const std::string_view regime = p.regime == Regime::moderate ? "moderate" : "mixed";
    for (int q = 0; q < 2; ++q) {
      csv.cell(static_cast<std::uint64_t>(r.n));
      csv.cell(p.t);
      csv.cell(p.a);
      csv.cell(p.b);
      csv.cell(static_cast<std::uint64_t>(r.d));
      csv.cell(r.seed);
      csv.cell(std::string_view("ldp"));
      if (q == 0) {
        csv.cell(std::string_view("e1"));
        csv.cell(e1);
        csv.cell(-std::log(e1));
      } else {
        csv.cell(std::string_view("e2"));
        csv.cell(std::exp(-e2_neg_log));
        csv.cell(e2_neg_log);
      }
      csv.cell(p.V);
      csv.cell(regime);
      csv.end_row();
    }
  }
}

}  // namespace erasurelab
