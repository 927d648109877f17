#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "myopic/process.hpp"

namespace myopic {

/// Associative store of belief vectors identified up to a tolerance.
///
/// Two beliefs match when every coordinate agrees to within
/// tolerance * max(|a_s|, |b_s|). This implies the L-infinity bound, and it
/// keeps posteriors that are both close to zero but differ by a large factor
/// (a concentrating mixture posterior, say) apart.
///
/// Lookup keys on a fixed positive linear projection of the belief: two
/// vectors within `tolerance` in L-infinity have keys within
/// tolerance * sum(weights), so an ordered range query followed by an
/// exact beliefs_match check finds every candidate. No grid is involved, so
/// nearby beliefs are never split across cell boundaries.
class BeliefIndex {
 public:
  BeliefIndex(std::size_t dimension, double tolerance);

  /// Lowest-id stored belief within tolerance of `belief`, if any.
  std::optional<std::size_t> find(const RowVector& belief) const;
  /// Returns (id, inserted).
  std::pair<std::size_t, bool> find_or_insert(const RowVector& belief);

  std::size_t size() const { return beliefs_.size(); }
  const RowVector& operator[](std::size_t id) const { return beliefs_.at(id); }
  double tolerance() const { return tolerance_; }

 private:
  double key(const RowVector& belief) const;

  std::vector<double> weights_;
  double tolerance_;
  double reach_;
  std::multimap<double, std::size_t> by_key_;
  std::vector<RowVector> beliefs_;
};

/// L-infinity distance between two equal-length vectors.
double linf_distance(const RowVector& a, const RowVector& b);
/// The coordinatewise relative match used by BeliefIndex.
bool beliefs_match(const RowVector& a, const RowVector& b, double tolerance);

}  // namespace myopic
