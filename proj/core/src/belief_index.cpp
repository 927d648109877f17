#include "myopic/belief_index.hpp"

#include <algorithm>
#include <cmath>

#include "myopic/errors.hpp"

namespace myopic {

namespace {
constexpr double kGoldenFraction = 0.61803398874989484820;
// Slack for the rounding error of the projection itself.
constexpr double kKeySlack = 1e-13;
}  // namespace

BeliefIndex::BeliefIndex(std::size_t dimension, double tolerance)
    : tolerance_(tolerance) {
  if (!(tolerance >= 0.0)) throw ValidationError("merge tolerance must be nonnegative");
  weights_.resize(dimension);
  double total = 0.0;
  for (std::size_t i = 0; i < dimension; ++i) {
    const double frac = std::fmod(static_cast<double>(i + 1) * kGoldenFraction, 1.0);
    weights_[i] = 1.0 + frac;
    total += weights_[i];
  }
  reach_ = tolerance * total + kKeySlack;
}

double BeliefIndex::key(const RowVector& belief) const {
  double k = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    k += weights_[i] * belief(static_cast<Eigen::Index>(i));
  }
  return k;
}

std::optional<std::size_t> BeliefIndex::find(const RowVector& belief) const {
  const double k = key(belief);
  std::optional<std::size_t> best;
  for (auto it = by_key_.lower_bound(k - reach_); it != by_key_.end() && it->first <= k + reach_;
       ++it) {
    if (beliefs_match(beliefs_[it->second], belief, tolerance_)) {
      if (!best || it->second < *best) best = it->second;
    }
  }
  return best;
}

std::pair<std::size_t, bool> BeliefIndex::find_or_insert(const RowVector& belief) {
  if (auto hit = find(belief)) return {*hit, false};
  const std::size_t id = beliefs_.size();
  beliefs_.push_back(belief);
  by_key_.emplace(key(belief), id);
  return {id, true};
}

double linf_distance(const RowVector& a, const RowVector& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

bool beliefs_match(const RowVector& a, const RowVector& b, double tolerance) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double scale = std::max(std::abs(a(i)), std::abs(b(i)));
    if (std::abs(a(i) - b(i)) > tolerance * scale) return false;
  }
  return true;
}

}  // namespace myopic
