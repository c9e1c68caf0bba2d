#include "erasurelab/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "erasurelab/logmath.hpp"

namespace erasurelab {

AdditiveChannel::AdditiveChannel(NoiseDistribution noise) : noise_(std::move(noise)) {
  if (noise_.size() > kMaxAlphabet) {
    throw InvalidArgument("alphabet size above 256 is not supported");
  }
  cdf_.reserve(noise_.size());
  CompensatedSum acc;
  for (double p : noise_.probs()) {
    acc.add(p);
    cdf_.push_back(acc.value());
  }
}

double AdditiveChannel::capacity() const {
  return std::log(static_cast<double>(d())) - entropy(noise_);
}

GeneralDmc AdditiveChannel::to_general() const {
  std::vector<std::vector<double>> rows(d(), std::vector<double>(d()));
  for (std::size_t x = 0; x < d(); ++x) {
    for (std::size_t y = 0; y < d(); ++y) rows[x][y] = noise_.prob((y + d() - x) % d());
  }
  return GeneralDmc(std::move(rows));
}

Symbol AdditiveChannel::sample_noise(Rng& rng) const {
  const double u = uniform01(rng) * cdf_.back();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto z = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), d() - 1);
  return static_cast<Symbol>(z);
}

double log_likelihood(const AdditiveChannel& ch, WordView x, WordView y) {
  if (x.size() != y.size()) {
    throw InvalidArgument("codeword and output lengths differ");
  }
  double ll = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) ll += ch.log_w(y[i], x[i]);
  return ll;
}

Word sample_output(const AdditiveChannel& ch, WordView x, Rng& rng) {
  Word y(x.size());
  const auto d = ch.d();
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = static_cast<Symbol>((x[i] + ch.sample_noise(rng)) % d);
  }
  return y;
}

GeneralDmc::GeneralDmc(std::vector<std::vector<double>> rows) : rows_(std::move(rows)) {
  if (rows_.empty() || rows_.front().empty()) {
    throw InvalidArgument("transition matrix is empty");
  }
  const auto ny = rows_.front().size();
  for (const auto& r : rows_) {
    if (r.size() != ny) throw InvalidArgument("transition matrix rows differ in length");
    CompensatedSum s;
    for (double v : r) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw InvalidArgument("transition probabilities must be finite and nonnegative");
      }
      s.add(v);
    }
    if (std::abs(s.value() - 1.0) > kRowTolerance) {
      throw InvalidArgument("transition matrix row sums to " + std::to_string(s.value()));
    }
  }
}

std::vector<double> GeneralDmc::output_distribution(std::span<const double> px) const {
  std::vector<double> q(outputs(), 0.0);
  for (std::size_t y = 0; y < outputs(); ++y) {
    CompensatedSum s;
    for (std::size_t x = 0; x < inputs(); ++x) s.add(px[x] * rows_[x][y]);
    q[y] = s.value();
  }
  return q;
}

GeneralDmc load_dmc_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open matrix file " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    std::vector<double> row;
    std::string tok;
    while (ss >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) {
        throw InvalidArgument("malformed matrix entry '" + tok + "' in " + path.string());
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return GeneralDmc(std::move(rows));
}

namespace {

void check_input_distribution(const GeneralDmc& w, std::span<const double> px) {
  if (px.size() != w.inputs()) {
    throw InvalidArgument("input distribution size does not match the channel");
  }
  CompensatedSum s;
  for (double p : px) {
    if (!(p >= 0.0)) throw InvalidArgument("input distribution has a negative entry");
    s.add(p);
  }
  if (std::abs(s.value() - 1.0) > 1e-9) {
    throw InvalidArgument("input distribution does not sum to 1");
  }
}

// D(W(.|x) || q) for every x.
std::vector<double> divergences(const GeneralDmc& w, std::span<const double> q) {
  std::vector<double> out(w.inputs());
  for (std::size_t x = 0; x < w.inputs(); ++x) {
    CompensatedSum s;
    for (std::size_t y = 0; y < w.outputs(); ++y) {
      const double wy = w.w(y, x);
      if (wy > 0.0) s.add(wy * std::log(wy / q[y]));
    }
    out[x] = s.value();
  }
  return out;
}

// Calls fn(x, y, information density) for all pairs with P_X(x) W(y|x) > 0.
template <class Fn>
void for_each_density(const GeneralDmc& w, std::span<const double> px, Fn&& fn) {
  const auto q = w.output_distribution(px);
  for (std::size_t x = 0; x < w.inputs(); ++x) {
    if (px[x] <= 0.0) continue;
    for (std::size_t y = 0; y < w.outputs(); ++y) {
      const double wy = w.w(y, x);
      if (wy <= 0.0) continue;
      if (!(q[y] > 0.0)) {
        throw InvalidArgument("W(.|x) is not absolutely continuous w.r.t. P_X W");
      }
      fn(x, y, std::log(wy / q[y]));
    }
  }
}

}  // namespace

CapacityResult blahut_arimoto(const GeneralDmc& w, double tol, std::size_t max_iter) {
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  const auto nx = w.inputs();
  CapacityResult res;
  res.input_dist.assign(nx, 1.0 / static_cast<double>(nx));
  for (std::size_t it = 0;; ++it) {
    const auto q = w.output_distribution(res.input_dist);
    const auto div = divergences(w, q);
    CompensatedSum info;
    for (std::size_t x = 0; x < nx; ++x) info.add(res.input_dist[x] * div[x]);
    const double upper = *std::max_element(div.begin(), div.end());
    res.capacity = info.value();
    res.gap = std::max(0.0, upper - res.capacity);
    res.iterations = it;
    res.history.push_back(res.capacity);
    if (res.gap <= tol) return res;
    if (it == max_iter) {
      throw CapacityNotConverged("Blahut-Arimoto did not reach gap " + std::to_string(tol) +
                                     " within " + std::to_string(max_iter) + " iterations",
                                 res);
    }
    CompensatedSum norm;
    std::vector<double> next(nx);
    for (std::size_t x = 0; x < nx; ++x) {
      next[x] = res.input_dist[x] * std::exp(div[x] - upper);
      norm.add(next[x]);
    }
    for (auto& p : next) p /= norm.value();
    res.input_dist = std::move(next);
  }
}

double cond_info_variance(const GeneralDmc& w, std::span<const double> px) {
  check_input_distribution(w, px);
  const auto q = w.output_distribution(px);
  const auto div = divergences(w, q);
  CompensatedSum v;
  for_each_density(w, px, [&](std::size_t x, std::size_t y, double i) {
    const double dev = i - div[x];
    v.add(px[x] * w.w(y, x) * dev * dev);
  });
  return v.value();
}

double uncond_info_variance(const GeneralDmc& w, std::span<const double> px,
                            double capacity) {
  check_input_distribution(w, px);
  CompensatedSum v;
  for_each_density(w, px, [&](std::size_t x, std::size_t y, double i) {
    const double dev = i - capacity;
    v.add(px[x] * w.w(y, x) * dev * dev);
  });
  return v.value();
}

DispersionReport dispersion(const AdditiveChannel& ch) {
  DispersionReport r;
  r.capacity = ch.capacity();
  r.dispersion = varentropy(ch.noise());
  r.caid.assign(ch.d(), 1.0 / static_cast<double>(ch.d()));
  r.exact = true;
  return r;
}

DispersionReport dispersion(const GeneralDmc& w, double tol) {
  const auto cap = blahut_arimoto(w, tol);
  DispersionReport r;
  r.capacity = cap.capacity;
  r.dispersion = cond_info_variance(w, cap.input_dist);
  r.caid = cap.input_dist;
  r.exact = false;
  return r;
}

}  // namespace erasurelab
