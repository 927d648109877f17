#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace myopic {

inline constexpr double kLn2 = 0.69314718055994530942;

/// -x log x with the 0 log 0 := 0 convention (nats).
inline double entropy_term(double x) {
  return x > 0.0 ? -x * std::log(x) : 0.0;
}

/// Binary entropy B2(q) in nats.
inline double binary_entropy(double q) {
  return entropy_term(q) + entropy_term(1.0 - q);
}

/// Shannon entropy in nats of a (not necessarily normalized) nonnegative
/// vector, normalized internally.
double shannon_entropy(std::span<const double> weights);

/// log(sum(exp(v))) without overflow; -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> values);

inline double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

/// Pairwise (cascade) summation; error grows as O(log n) rather than O(n).
double pairwise_sum(std::span<const double> values);

/// log C(n, k) via lgamma.
double log_binomial(std::size_t n, std::size_t k);

inline double nats_to_bits(double nats) { return nats / kLn2; }

}  // namespace myopic
