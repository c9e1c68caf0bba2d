#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace erasurelab {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  void scale(double f) {
    sum_ *= f;
    comp_ *= f;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Accumulates log(sum_i exp(x_i)) in a single pass. The running sum is kept
// relative to the largest term seen so far and rescaled when it changes.
class LogSumAccumulator {
 public:
  void add(double log_term) {
    if (log_term == kNegInf) return;
    if (log_term > max_) {
      if (max_ != kNegInf) sum_.scale(std::exp(max_ - log_term));
      max_ = log_term;
    }
    sum_.add(std::exp(log_term - max_));
  }
  // Adds count * exp(log_term).
  void add_weighted(double log_term, double count) {
    if (count <= 0.0) return;
    add(log_term + std::log(count));
  }
  void merge(const LogSumAccumulator& other) {
    if (other.max_ == kNegInf) return;
    add(other.value());
  }
  double value() const {
    if (max_ == kNegInf) return kNegInf;
    return max_ + std::log(sum_.value());
  }
  bool empty() const { return max_ == kNegInf; }

 private:
  double max_ = kNegInf;
  CompensatedSum sum_;
};

// log(sum_i exp(xs[i])); -inf for an empty range.
inline double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return kNegInf;
  const double m = *std::max_element(xs.begin(), xs.end());
  if (m == kNegInf) return kNegInf;
  if (m == std::numeric_limits<double>::infinity()) return m;
  CompensatedSum s;
  for (double x : xs) s.add(std::exp(x - m));
  return m + std::log(s.value());
}

// log(exp(a) + exp(b))
inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace erasurelab
