#include "erasurelab/typesys.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "erasurelab/csv.hpp"
#include "erasurelab/logmath.hpp"

namespace erasurelab {

TypeVector::TypeVector(std::vector<std::uint32_t> counts) : counts_(std::move(counts)) {
  if (counts_.size() < 2) throw InvalidArgument("a type needs at least two symbols");
  n_ = std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
  if (n_ == 0) throw InvalidArgument("a type needs a positive blocklength");
}

TypeVector TypeVector::of(WordView word, std::size_t d) {
  std::vector<std::uint32_t> c(d, 0);
  for (auto s : word) {
    if (s >= d) throw InvalidArgument("symbol outside Z_d");
    ++c[s];
  }
  return TypeVector(std::move(c));
}

double type_count(std::size_t n, std::size_t d) {
  // C(n + d - 1, d - 1) by the multiplicative formula.
  double c = 1.0;
  for (std::size_t k = 1; k < d; ++k) {
    c = c * static_cast<double>(n + k) / static_cast<double>(k);
  }
  return std::round(c);
}

std::vector<TypeVector> enumerate_types(std::size_t n, std::size_t d) {
  if (d < 2) throw InvalidArgument("alphabet size must be at least 2");
  if (n == 0) throw InvalidArgument("blocklength must be positive");
  const double count = type_count(n, d);
  if (count > kMaxTypesEnumerated) {
    throw BudgetExceeded("enumerating " + std::to_string(count) + " types exceeds the budget");
  }
  std::vector<TypeVector> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<std::uint32_t> c(d, 0);
  // Odometer over compositions: the first d-1 parts are free, the last takes
  // the remainder. Incrementing from the right keeps lexicographic order.
  auto emit = [&](std::uint32_t used) {
    c[d - 1] = static_cast<std::uint32_t>(n) - used;
    out.emplace_back(c);
  };
  std::uint32_t used = 0;
  for (;;) {
    emit(used);
    // Advance position k = d-2 down to 0.
    std::size_t k = d - 1;
    for (;;) {
      if (k == 0) return out;
      --k;
      if (used < n) {
        ++c[k];
        ++used;
        break;
      }
      used -= c[k];
      c[k] = 0;
    }
  }
}

double type_class_log_size(const TypeVector& q) {
  double s = std::lgamma(static_cast<double>(q.n()) + 1.0);
  for (auto c : q.counts()) s -= std::lgamma(static_cast<double>(c) + 1.0);
  return std::max(0.0, s);
}

double type_entropy(const TypeVector& q) {
  CompensatedSum h;
  for (std::size_t z = 0; z < q.d(); ++z) {
    const double f = q.frequency(z);
    if (f > 0.0) h.add(-f * std::log(f));
  }
  return h.value();
}

double type_divergence(const TypeVector& q, const NoiseDistribution& p) {
  if (q.d() != p.size()) throw InvalidArgument("type and distribution alphabets differ");
  CompensatedSum dv;
  for (std::size_t z = 0; z < q.d(); ++z) {
    const double f = q.frequency(z);
    if (f > 0.0) dv.add(f * (std::log(f) - p.log_prob(z)));
  }
  return dv.value();
}

double log_sequence_prob(const TypeVector& q, const NoiseDistribution& p) {
  if (q.d() != p.size()) throw InvalidArgument("type and distribution alphabets differ");
  CompensatedSum s;
  for (std::size_t z = 0; z < q.d(); ++z) {
    s.add(static_cast<double>(q.count(z)) * p.log_prob(z));
  }
  return s.value();
}

double l1_distance(const TypeVector& q, const NoiseDistribution& p) {
  if (q.d() != p.size()) throw InvalidArgument("type and distribution alphabets differ");
  CompensatedSum s;
  for (std::size_t z = 0; z < q.d(); ++z) s.add(std::abs(q.frequency(z) - p.prob(z)));
  return s.value();
}

TypeVector nearest_type_with_entropy(const NoiseDistribution& p, std::size_t n,
                                     double min_entropy) {
  const double max_entropy = std::log(static_cast<double>(p.size()));
  if (min_entropy > max_entropy) {
    throw InvalidArgument("entropy threshold " + std::to_string(min_entropy) +
                          " exceeds log d = " + std::to_string(max_entropy));
  }
  const auto types = enumerate_types(n, p.size());
  const TypeVector* best = nullptr;
  double best_dist = 0.0;
  for (const auto& q : types) {
    if (type_entropy(q) < min_entropy) continue;
    const double dist = l1_distance(q, p);
    if (best == nullptr || dist < best_dist) {
      best = &q;
      best_dist = dist;
    }
  }
  if (best == nullptr) {
    throw InvalidArgument("no " + std::to_string(n) + "-type reaches entropy " +
                          std::to_string(min_entropy));
  }
  return *best;
}

TypeVector select_Pn(const NoiseDistribution& p, std::size_t n, double a, double t) {
  if (n == 0) throw InvalidArgument("blocklength must be positive");
  const double target = entropy(p) + 2.0 * a * std::pow(static_cast<double>(n), -t);
  return nearest_type_with_entropy(p, n, target);
}

std::map<TypeVector, std::uint64_t> type_enumerator(const Codebook& cb, WordView y,
                                                    std::size_t excluded) {
  if (y.size() != cb.n()) throw InvalidArgument("output length differs from codeword length");
  if (excluded >= cb.size()) throw InvalidArgument("excluded message index out of range");
  std::map<TypeVector, std::uint64_t> out;
  const auto d = cb.d();
  std::vector<std::uint32_t> c(d);
  for (std::size_t m = 0; m < cb.size(); ++m) {
    if (m == excluded) continue;
    std::fill(c.begin(), c.end(), 0);
    const auto x = cb.word(m);
    for (std::size_t i = 0; i < y.size(); ++i) ++c[(y[i] + d - x[i]) % d];
    ++out[TypeVector(c)];
  }
  return out;
}

void write_types_csv(std::ostream& out, std::span<const TypeVector> types,
                     const NoiseDistribution* p) {
  if (types.empty()) return;
  const auto d = types.front().d();
  std::vector<std::string> header;
  for (std::size_t z = 0; z < d; ++z) header.push_back("c" + std::to_string(z));
  header.insert(header.end(), {"entropy", "divergence", "log_class_size"});
  CsvWriter csv(out, std::move(header));
  for (const auto& q : types) {
    for (auto c : q.counts()) csv.cell(static_cast<std::uint64_t>(c));
    csv.cell(type_entropy(q));
    if (p != nullptr) {
      csv.cell(type_divergence(q, *p));
    } else {
      csv.cell(std::string_view(""));
    }
    csv.cell(type_class_log_size(q));
    csv.end_row();
  }
}

}  // namespace erasurelab
