#include "myopic/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "myopic/belief_index.hpp"
#include "myopic/errors.hpp"
#include "myopic/fit.hpp"
#include "myopic/numeric.hpp"

namespace myopic {

const char* to_string(CurveMethod m) {
  return m == CurveMethod::msp_operator ? "msp-operator" : "layered-beliefs";
}

CurveMethod parse_curve_method(std::string_view text) {
  if (text == "msp-operator" || text == "msp") return CurveMethod::msp_operator;
  if (text == "layered-beliefs" || text == "layered") return CurveMethod::layered_beliefs;
  throw ValidationError("unknown curve method '" + std::string(text) +
                        "' (expected msp-operator or layered-beliefs)");
}

const char* to_string(CurveKind k) {
  switch (k) {
    case CurveKind::myopic_entropy:
      return "myopic_entropy";
    case CurveKind::loss_bound:
      return "loss_lower_bound";
    case CurveKind::plugin_estimate:
      break;
  }
  return "plugin_estimate";
}

namespace {

struct LayeredResult {
  std::vector<double> values;
  bool truncated = false;
};

// Weighted belief set propagated one token at a time; beliefs are merged
// within a layer only.
LayeredResult layered_curve(const HiddenMarkovProcess& process, std::size_t length,
                            double tolerance, std::size_t cap, bool throw_on_cap) {
  const std::size_t nx = process.alphabet_size();
  std::vector<RowVector> beliefs{process.initial()};
  std::vector<double> masses{1.0};
  LayeredResult out;
  out.values.reserve(length);
  std::vector<RowVector> joint(nx);
  std::vector<double> p(nx);
  for (std::size_t pos = 1; pos <= length; ++pos) {
    const bool last = pos == length;
    BeliefIndex index(process.state_count(), tolerance);
    std::vector<double> next_mass;
    std::vector<double> terms;
    terms.reserve(beliefs.size());
    for (std::size_t i = 0; i < beliefs.size(); ++i) {
      double h = 0.0;
      for (Token x = 0; x < nx; ++x) {
        joint[x] = beliefs[i] * process.transition(x);
        p[x] = joint[x].sum();
        h += entropy_term(p[x]);
      }
      terms.push_back(masses[i] * h);
      if (last) continue;
      for (Token x = 0; x < nx; ++x) {
        if (!(p[x] > 0.0)) continue;
        auto [id, inserted] = index.find_or_insert(joint[x] / p[x]);
        if (inserted) next_mass.push_back(0.0);
        next_mass[id] += masses[i] * p[x];
      }
      if (index.size() > cap) {
        if (throw_on_cap) {
          throw CapabilityError("layered beliefs: layer " + std::to_string(pos) + " exceeds " +
                                std::to_string(cap) + " distinct beliefs");
        }
        out.values.push_back(pairwise_sum(terms));
        out.truncated = true;
        return out;
      }
    }
    out.values.push_back(pairwise_sum(terms));
    if (last) break;
    beliefs.clear();
    for (std::size_t id = 0; id < index.size(); ++id) beliefs.push_back(index[id]);
    masses = std::move(next_mass);
  }
  return out;
}

void fill_metadata(EntropyCurve& curve, const HiddenMarkovProcess& process, std::string method,
                   double tolerance) {
  curve.method = std::move(method);
  curve.merge_tolerance = tolerance;
  curve.stationary_start = is_stationary(process);
  curve.alphabet_size = process.alphabet_size();
}

}  // namespace

EntropyCurve myopic_entropy_curve(const MixedStatePresentation& msp, std::size_t length) {
  if (length < 1) throw ValidationError("curve length must be >= 1");
  if (length - 1 > msp.valid_depth()) {
    throw CapabilityError("MSP is open at depth " + std::to_string(msp.construction_depth()) +
                          "; L = " + std::to_string(length) +
                          " needs W^" + std::to_string(length - 1) +
                          " (raise max_depth or use layered-beliefs)");
  }
  EntropyCurve curve;
  curve.values.reserve(length);
  MspWalker walker(msp);
  for (std::size_t pos = 1; pos <= length; ++pos) {
    curve.values.push_back(walker.expected_entropy());
    if (pos < length) walker.advance();
  }
  curve.method = to_string(CurveMethod::msp_operator);
  curve.merge_tolerance = msp.merge_tolerance();
  curve.alphabet_size = msp.alphabet().size();
  return curve;
}

EntropyCurve myopic_entropy_curve(const HiddenMarkovProcess& process, std::size_t length,
                                  const CurveOptions& options) {
  if (length < 1) throw ValidationError("curve length must be >= 1");
  require_valid(process);
  EntropyCurve curve;
  if (options.method == CurveMethod::msp_operator) {
    const std::size_t depth = options.max_depth.value_or(length - 1);
    const auto msp = build_msp(process, depth, options.merge_tolerance);
    curve = myopic_entropy_curve(msp, length);
  } else {
    curve.values = layered_curve(process, length, options.merge_tolerance,
                                 options.max_layer_beliefs, true)
                       .values;
  }
  fill_metadata(curve, process, to_string(options.method), options.merge_tolerance);
  return curve;
}

EntropyCurve myopic_entropy_curve(const ZooProcess& process, std::size_t length,
                                  const CurveOptions& options) {
  auto curve = myopic_entropy_curve(process.process, length, options);
  curve.process_name = process.descriptor.name;
  curve.descriptor = process.descriptor;
  return curve;
}

EntropyCurve heldout_loss_lower_bound(const HiddenMarkovProcess& process, std::size_t length,
                                      const CurveOptions& options) {
  auto curve = myopic_entropy_curve(process, length, options);
  curve.kind = CurveKind::loss_bound;
  return curve;
}

EntropyCurve heldout_loss_lower_bound(const ZooProcess& process, std::size_t length,
                                      const CurveOptions& options) {
  auto curve = myopic_entropy_curve(process, length, options);
  curve.kind = CurveKind::loss_bound;
  return curve;
}

double max_increase(const EntropyCurve& curve) {
  double worst = 0.0;
  for (std::size_t i = 1; i < curve.values.size(); ++i) {
    worst = std::max(worst, curve.values[i] - curve.values[i - 1]);
  }
  return worst;
}

bool is_non_increasing(const EntropyCurve& curve, double tolerance) {
  return max_increase(curve) <= tolerance;
}

EntropyRate entropy_rate(const MixedStatePresentation& msp) {
  if (!msp.closed()) throw CapabilityError("exact entropy rate needs a closed MSP");
  const auto& nodes = msp.nodes();
  std::vector<double> pi(nodes.size(), 0.0), next(nodes.size(), 0.0);
  pi[MixedStatePresentation::origin()] = 1.0;
  // Lazy walk: aperiodic, so it converges to the stationary mix of the
  // recurrent classes reachable from the origin.
  constexpr double kTolerance = 1e-15;
  constexpr std::size_t kMaxIterations = 20'000'000;
  bool converged = false;
  for (std::size_t it = 0; it < kMaxIterations && !converged; ++it) {
    for (std::size_t i = 0; i < pi.size(); ++i) next[i] = 0.5 * pi[i];
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (pi[i] == 0.0) continue;
      for (const auto& e : nodes[i].edges) next[e.target] += 0.5 * pi[i] * e.probability;
    }
    double change = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) change = std::max(change, std::abs(next[i] - pi[i]));
    std::swap(pi, next);
    converged = change <= kTolerance;
  }
  std::vector<double> terms(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) terms[i] = pi[i] * nodes[i].entropy;
  EntropyRate rate;
  rate.value = rate.lower = rate.upper = pairwise_sum(terms);
  rate.method = "msp-stationary";
  rate.exact = converged;
  rate.converged = converged;
  return rate;
}

EntropyRate bracket_entropy_rate(const EntropyCurve& curve, double tolerance) {
  const auto& v = curve.values;
  if (v.empty()) throw ValidationError("cannot bracket an empty curve");
  EntropyRate rate;
  rate.method = "aitken-bracket";
  rate.horizon = v.size();
  const double last = v.back();
  double extrapolated = last;
  if (v.size() >= 3) {
    const double d1 = v[v.size() - 2] - v[v.size() - 3];
    const double d2 = last - v[v.size() - 2];
    const double denom = d2 - d1;
    if (d2 != 0.0 && std::abs(denom) > 1e-300) extrapolated = last - d2 * d2 / denom;
    if (!std::isfinite(extrapolated)) extrapolated = last;
  }
  extrapolated = std::max(extrapolated, 0.0);
  rate.lower = std::min(extrapolated, last);
  rate.upper = curve.stationary_start ? last : std::max(extrapolated, last);
  rate.value = std::clamp(extrapolated, rate.lower, rate.upper);
  rate.converged = rate.width() <= tolerance;
  return rate;
}

EntropyRate entropy_rate(const HiddenMarkovProcess& process, const RateOptions& options) {
  require_valid(process);
  try {
    const auto msp = build_msp(process, options.msp_depth, options.merge_tolerance,
                               options.max_layer_beliefs);
    if (msp.closed()) {
      auto rate = entropy_rate(msp);
      if (rate.converged) return rate;
    }
  } catch (const CapabilityError&) {
    // Too many beliefs for an exact pass; fall through to the bracket.
  }
  EntropyCurve curve;
  auto layered = layered_curve(process, options.horizon, options.merge_tolerance,
                               options.max_layer_beliefs, false);
  curve.values = std::move(layered.values);
  curve.stationary_start = is_stationary(process);
  return bracket_entropy_rate(curve, options.tolerance);
}

EntropyRate entropy_rate(const MixtureProcess& mixture, const RateOptions& options) {
  require_valid(mixture);
  EntropyRate rate;
  rate.method = "ergodic-decomposition";
  rate.exact = true;
  rate.converged = true;
  for (const auto& c : mixture.components()) {
    const auto part = entropy_rate(c.process, options);
    rate.value += c.weight * part.value;
    rate.lower += c.weight * part.lower;
    rate.upper += c.weight * part.upper;
    rate.exact = rate.exact && part.exact;
    rate.converged = rate.converged && part.converged;
    rate.horizon = std::max(rate.horizon, part.horizon);
  }
  return rate;
}

EntropyRate entropy_rate(const ZooProcess& process, const RateOptions& options) {
  if (process.mixture) return entropy_rate(*process.mixture, options);
  return entropy_rate(process.process, options);
}

namespace {

std::vector<double> partial_sums(const std::vector<double>& values, double h) {
  std::vector<double> out(values.size());
  // Kahan-compensated running sum; E_L is needed at every L.
  double sum = 0.0, carry = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double y = (values[i] - h) - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
    out[i] = sum;
  }
  return out;
}

}  // namespace

ExcessEntropy excess_entropy(const EntropyCurve& curve, const EntropyRate& rate) {
  if (curve.values.empty()) throw ValidationError("excess entropy of an empty curve");
  ExcessEntropy out;
  out.partial = partial_sums(curve.values, rate.value);
  out.partial_lower = partial_sums(curve.values, rate.upper);
  out.partial_upper = partial_sums(curve.values, rate.lower);
  out.estimate = out.partial.back();
  out.lower = out.partial_lower.back();
  out.upper = out.partial_upper.back();

  const std::size_t n = curve.values.size();
  std::vector<double> x, lx, ly;
  bool negative = false;
  for (std::size_t i = n / 2; i < n; ++i) {
    const double r = curve.values[i] - rate.value;
    if (r < -1e-10) negative = true;
    if (r > 1e-12) {
      const double pos = static_cast<double>(i + 1);
      x.push_back(pos);
      lx.push_back(std::log(pos));
      ly.push_back(std::log(r));
    }
  }
  if (negative) {
    out.tail_model = "indeterminate";
    return out;
  }
  if (x.size() < 3) {
    out.tail_model = "none";
    return out;
  }
  const auto power = fit_line(lx, ly);
  const auto expo = fit_line(x, ly);
  const double last = static_cast<double>(n);
  if (power.r_squared > expo.r_squared) {
    out.tail_model = "power";
    out.tail_exponent = power.slope;
    out.tail_r_squared = power.r_squared;
    if (power.slope >= kDivergentExponent) {
      out.divergent = true;
      out.estimate = std::numeric_limits<double>::infinity();
      out.upper = std::numeric_limits<double>::infinity();
      return out;
    }
    // sum_{l > L} A l^s ~ integral from L + 1/2.
    const double s = power.slope;
    const double tail = std::exp(power.intercept) * std::pow(last + 0.5, s + 1.0) / (-s - 1.0);
    out.estimate += tail;
    out.lower += tail;
    out.upper += tail;
  } else {
    out.tail_model = "exponential";
    out.tail_exponent = expo.slope;
    out.tail_r_squared = expo.r_squared;
    if (expo.slope >= 0.0) {
      out.divergent = true;
      out.estimate = std::numeric_limits<double>::infinity();
      out.upper = std::numeric_limits<double>::infinity();
      return out;
    }
    const double b = expo.slope;
    const double tail = std::exp(expo.intercept + b * (last + 1.0)) / (1.0 - std::exp(b));
    out.estimate += tail;
    out.lower += tail;
    out.upper += tail;
  }
  return out;
}

ExcessEntropy excess_entropy(const HiddenMarkovProcess& process, std::size_t length,
                             const RateOptions& options) {
  const auto rate = entropy_rate(process, options);
  CurveOptions copts;
  copts.merge_tolerance = options.merge_tolerance;
  const auto curve = myopic_entropy_curve(process, length, copts);
  return excess_entropy(curve, rate);
}

}  // namespace myopic
