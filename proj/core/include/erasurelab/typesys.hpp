#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "erasurelab/channel.hpp"
#include "erasurelab/coding.hpp"
#include "erasurelab/probmodel.hpp"

namespace erasurelab {

/// Composition of n into d nonnegative parts: the counts of each symbol in a
/// length-n sequence over Z_d.
class TypeVector {
 public:
  explicit TypeVector(std::vector<std::uint32_t> counts);

  std::size_t n() const { return n_; }
  std::size_t d() const { return counts_.size(); }
  std::uint32_t count(std::size_t z) const { return counts_[z]; }
  std::span<const std::uint32_t> counts() const { return counts_; }
  double frequency(std::size_t z) const {
    return static_cast<double>(counts_[z]) / static_cast<double>(n_);
  }

  static TypeVector of(WordView word, std::size_t d);

  auto operator<=>(const TypeVector& other) const { return counts_ <=> other.counts_; }
  bool operator==(const TypeVector& other) const { return counts_ == other.counts_; }

 private:
  std::vector<std::uint32_t> counts_;
  std::size_t n_;
};

inline constexpr double kMaxTypesEnumerated = 1e7;

// C(n+d-1, d-1) as a double (exact below 2^53).
double type_count(std::size_t n, std::size_t d);

// All n-types over Z_d in lexicographic order of their count vectors.
// Throws BudgetExceeded when there are more than kMaxTypesEnumerated.
std::vector<TypeVector> enumerate_types(std::size_t n, std::size_t d);

// log |T_Q| = log( n! / prod_z Q_z! ).
double type_class_log_size(const TypeVector& q);

// H(Q) of the empirical distribution, nats.
double type_entropy(const TypeVector& q);

// D(Q || P) with 0 log 0 = 0.
double type_divergence(const TypeVector& q, const NoiseDistribution& p);

// log P^n(z) for any z of type Q: sum_z Q_z log P(z).
double log_sequence_prob(const TypeVector& q, const NoiseDistribution& p);

// || Q - P ||_1
double l1_distance(const TypeVector& q, const NoiseDistribution& p);

// The l1-nearest n-type to P among those with H(Q) >= min_entropy; ties go
// to the lexicographically smallest count vector. Throws InvalidArgument when
// no n-type qualifies.
TypeVector nearest_type_with_entropy(const NoiseDistribution& p, std::size_t n,
                                     double min_entropy);

// P_n: nearest type with H(Q) >= H(P) + 2 a n^(-t).
TypeVector select_Pn(const NoiseDistribution& p, std::size_t n, double a, double t);

// Counts of the shifted words y - x_m' over m' != excluded, keyed by type.
std::map<TypeVector, std::uint64_t> type_enumerator(const Codebook& cb, WordView y,
                                                    std::size_t excluded);

// CSV listing of the types: c0..c{d-1}, entropy, divergence (when p is given),
// log_class_size.
void write_types_csv(std::ostream& out, std::span<const TypeVector> types,
                     const NoiseDistribution* p);

}  // namespace erasurelab
