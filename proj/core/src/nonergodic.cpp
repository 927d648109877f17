#include "myopic/nonergodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/multiprecision/cpp_int.hpp>

#include "myopic/belief_index.hpp"
#include "myopic/errors.hpp"
#include "myopic/numeric.hpp"

namespace myopic {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

const char* to_string(LossProvenance p) {
  switch (p) {
    case LossProvenance::closed_form:
      return "closed-form";
    case LossProvenance::belief_exact:
      return "belief-exact";
    case LossProvenance::limit_formula:
      break;
  }
  return "limit-formula";
}

EntropyCurve to_entropy_curve(const ComponentLossCurve& curve) {
  EntropyCurve out;
  out.values = curve.values;
  if (!curve.error_estimate.empty()) {
    out.lower.resize(curve.values.size());
    out.upper.resize(curve.values.size());
    for (std::size_t i = 0; i < curve.values.size(); ++i) {
      out.lower[i] = curve.values[i] - curve.error_estimate[i];
      out.upper[i] = curve.values[i] + curve.error_estimate[i];
    }
  }
  out.asymptote = curve.asymptote;
  out.process_name = curve.process_name;
  out.method = to_string(curve.provenance);
  out.alphabet_size = 2;
  return out;
}

ComponentLossCurve component_in_context_loss(const MixtureProcess& mixture, std::size_t c,
                                             std::size_t max_context,
                                             const LayerOptions& options) {
  require_valid(mixture);
  const std::size_t n_comp = mixture.size();
  if (c >= n_comp) {
    throw ValidationError("component " + std::to_string(c) + " out of range (mixture has " +
                          std::to_string(n_comp) + ")");
  }
  const std::size_t nx = mixture.alphabet().size();
  std::size_t block_dim = 0;
  for (const auto& comp : mixture.components()) block_dim += comp.process.state_count();
  const std::size_t tested_dim = mixture[c].process.state_count();

  struct Entry {
    std::vector<double> log_weight;
    std::vector<RowVector> belief;
    double mass = 0.0;
  };
  std::vector<Entry> layer(1);
  for (const auto& comp : mixture.components()) {
    layer[0].log_weight.push_back(comp.weight > 0.0 ? std::log(comp.weight) : kNegInf);
    layer[0].belief.push_back(comp.process.initial());
  }
  layer[0].mass = 1.0;

  ComponentLossCurve out;
  out.component = c;
  out.provenance = LossProvenance::belief_exact;
  out.values.reserve(max_context + 1);

  std::vector<RowVector> joint(n_comp);
  std::vector<double> logq(n_comp), mix_terms(n_comp);
  RowVector key(static_cast<Eigen::Index>(block_dim + tested_dim));
  for (std::size_t ell = 0; ell <= max_context; ++ell) {
    const bool last = ell == max_context;
    BeliefIndex index(block_dim + tested_dim, options.merge_tolerance);
    std::vector<Entry> next;
    std::vector<double> terms;
    for (const auto& e : layer) {
      for (Token x = 0; x < nx; ++x) {
        for (std::size_t d = 0; d < n_comp; ++d) {
          if (e.log_weight[d] == kNegInf) {
            logq[d] = kNegInf;
            continue;
          }
          joint[d] = e.belief[d] * mixture[d].process.transition(x);
          const double q = joint[d].sum();
          logq[d] = q > 0.0 ? std::log(q) : kNegInf;
        }
        if (logq[c] == kNegInf) continue;
        for (std::size_t d = 0; d < n_comp; ++d) mix_terms[d] = e.log_weight[d] + logq[d];
        const double log_pred = log_sum_exp(mix_terms);
        const double qc = std::exp(logq[c]);
        terms.push_back(-e.mass * qc * log_pred);
        if (last) continue;

        Entry fresh;
        fresh.log_weight.resize(n_comp);
        fresh.belief.resize(n_comp);
        Eigen::Index off = 0;
        for (std::size_t d = 0; d < n_comp; ++d) {
          const auto sd = static_cast<Eigen::Index>(mixture[d].process.state_count());
          if (logq[d] == kNegInf) {
            fresh.log_weight[d] = kNegInf;
            fresh.belief[d] = e.belief[d];
            key.segment(off, sd).setZero();
          } else {
            fresh.log_weight[d] = mix_terms[d] - log_pred;
            fresh.belief[d] = joint[d] / std::exp(logq[d]);
            key.segment(off, sd) = std::exp(fresh.log_weight[d]) * fresh.belief[d];
          }
          off += sd;
        }
        key.segment(off, static_cast<Eigen::Index>(tested_dim)) = fresh.belief[c];
        auto [id, inserted] = index.find_or_insert(key);
        if (inserted) {
          fresh.mass = 0.0;
          next.push_back(std::move(fresh));
          if (next.size() > options.max_layer_beliefs) {
            throw CapabilityError("component loss: context length " + std::to_string(ell + 1) +
                                  " exceeds " + std::to_string(options.max_layer_beliefs) +
                                  " distinct beliefs");
          }
        }
        next[id].mass += e.mass * qc;
      }
    }
    out.values.push_back(pairwise_sum(terms));
    layer = std::move(next);
  }
  return out;
}

double ncoin_bias(std::size_t n, std::size_t c) {
  return static_cast<double>(c) / static_cast<double>(n + 1);
}

namespace {

void check_ncoins(std::size_t n) {
  if (n < 1) throw ValidationError("ncoins needs N >= 1");
}

// row[k] = log sum_n p_n^k (1-p_n)^(m-k), k = 0..m.
class LogMomentRows {
 public:
  explicit LogMomentRows(std::size_t n) {
    for (std::size_t i = 1; i <= n; ++i) {
      const double p = ncoin_bias(n, i);
      lp_.push_back(std::log(p));
      lq_.push_back(std::log1p(-p));
    }
    scratch_.resize(n);
  }

  std::vector<double> row(std::size_t m) {
    std::vector<double> r(m + 1);
    for (std::size_t k = 0; k <= m; ++k) {
      const double kk = static_cast<double>(k), rest = static_cast<double>(m - k);
      for (std::size_t i = 0; i < lp_.size(); ++i) scratch_[i] = kk * lp_[i] + rest * lq_[i];
      r[k] = log_sum_exp(scratch_);
    }
    return r;
  }

 private:
  std::vector<double> lp_, lq_, scratch_;
};

void ncoins_warnings(std::size_t n, ComponentLossCurve& out) {
  if (n % 2 == 0) {
    out.warnings.push_back("even N: the fair coin is not among the components");
  }
}

}  // namespace

ComponentLossCurve ncoins_component_loss(std::size_t n, std::size_t c, std::size_t max_context) {
  check_ncoins(n);
  if (c < 1 || c > n) {
    throw ValidationError("coin index must lie in 1.." + std::to_string(n));
  }
  const double p = ncoin_bias(n, c);
  const double lp = std::log(p), lq = std::log1p(-p);
  LogMomentRows rows(n);
  ComponentLossCurve out;
  out.component = c;
  out.provenance = LossProvenance::closed_form;
  out.process_name = "ncoins";
  out.asymptote = CurveAsymptote{binary_entropy(p), binary_entropy(p), binary_entropy(p),
                                 "component-entropy"};
  ncoins_warnings(n, out);
  out.values.reserve(max_context + 1);
  auto r0 = rows.row(0);
  std::vector<double> terms;
  for (std::size_t ell = 0; ell <= max_context; ++ell) {
    auto r1 = rows.row(ell + 1);
    terms.assign(ell + 1, 0.0);
    for (std::size_t k = 0; k <= ell; ++k) {
      const double log_pmf = log_binomial(ell, k) + static_cast<double>(k) * lp +
                             static_cast<double>(ell - k) * lq;
      const double log_heads = r1[k + 1] - r0[k];
      const double log_tails = r1[k] - r0[k];
      terms[k] = -std::exp(log_pmf) * (p * log_heads + (1.0 - p) * log_tails);
    }
    out.values.push_back(pairwise_sum(terms));
    r0 = std::move(r1);
  }
  return out;
}

ComponentLossCurve ncoins_myopic_entropy(std::size_t n, std::size_t max_context) {
  check_ncoins(n);
  LogMomentRows rows(n);
  ComponentLossCurve out;
  out.provenance = LossProvenance::closed_form;
  out.process_name = "ncoins";
  double rate = 0.0;
  for (std::size_t i = 1; i <= n; ++i) rate += binary_entropy(ncoin_bias(n, i));
  rate /= static_cast<double>(n);
  out.asymptote = CurveAsymptote{rate, rate, rate, "ergodic-decomposition"};
  ncoins_warnings(n, out);
  out.values.reserve(max_context + 1);
  const double log_n = std::log(static_cast<double>(n));
  auto r0 = rows.row(0);
  std::vector<double> terms;
  for (std::size_t ell = 0; ell <= max_context; ++ell) {
    auto r1 = rows.row(ell + 1);
    terms.assign(2 * (ell + 1), 0.0);
    for (std::size_t k = 0; k <= ell; ++k) {
      const double lc = log_binomial(ell, k) - log_n;
      const double heads = r1[k + 1], tails = r1[k];
      terms[2 * k] = -std::exp(lc + heads) * (heads - r0[k]);
      terms[2 * k + 1] = -std::exp(lc + tails) * (tails - r0[k]);
    }
    out.values.push_back(pairwise_sum(terms));
    r0 = std::move(r1);
  }
  return out;
}

BetaMoment beta_moment(std::int64_t a, std::int64_t b) {
  if (a < 0 || b < 0) throw ValidationError("beta_moment needs a, b >= 0");
  BetaMoment out;
  if (a + b <= 60) {
    using boost::multiprecision::cpp_int;
    using boost::multiprecision::cpp_rational;
    auto factorial = [](std::int64_t k) {
      cpp_int f = 1;
      for (std::int64_t i = 2; i <= k; ++i) f *= i;
      return f;
    };
    const cpp_rational r(factorial(a) * factorial(b), factorial(a + b + 1));
    out.exact = true;
    out.value = r.convert_to<double>();
    out.rational = boost::multiprecision::numerator(r).str() + "/" +
                   boost::multiprecision::denominator(r).str();
    return out;
  }
  const double da = static_cast<double>(a), db = static_cast<double>(b);
  out.value = std::exp(std::lgamma(da + 1.0) + std::lgamma(db + 1.0) - std::lgamma(da + db + 2.0));
  return out;
}

ComponentLossCurve infinite_coins_myopic_entropy(std::size_t max_context) {
  // sum_k B2((k+1)/(l+2)) = (l+1) log(l+2) - 2 S(l+1) / (l+2) with
  // S(n) = sum_{j<=n} j log j, so each value costs O(1) after a running sum.
  ComponentLossCurve out;
  out.provenance = LossProvenance::limit_formula;
  out.process_name = "ncoins-inf";
  out.asymptote = CurveAsymptote{kInfiniteCoinsEntropyRate, kInfiniteCoinsEntropyRate,
                                 kInfiniteCoinsEntropyRate, "analytic"};
  out.values.reserve(max_context + 1);
  long double s = 0.0L, carry = 0.0L;
  for (std::size_t ell = 0; ell <= max_context; ++ell) {
    const long double j = static_cast<long double>(ell + 1);
    const long double y = j * std::log(j) - carry;
    const long double t = s + y;
    carry = (t - s) - y;
    s = t;
    const long double l2 = static_cast<long double>(ell + 2);
    const long double h = std::log(l2) - 2.0L * s / (j * l2);
    out.values.push_back(static_cast<double>(h));
  }
  return out;
}

ComponentLossCurve infinite_coins_component_loss(double p_c, std::size_t max_context,
                                                 const InfiniteCoinOptions& options) {
  if (!(p_c >= 0.0 && p_c <= 1.0)) throw ValidationError("coin bias must lie in [0, 1]");
  ComponentLossCurve out;
  out.provenance = LossProvenance::limit_formula;
  out.process_name = "ncoins-inf";
  out.asymptote =
      CurveAsymptote{binary_entropy(p_c), binary_entropy(p_c), binary_entropy(p_c), "analytic"};
  out.values.reserve(max_context + 1);
  const double p = p_c, q = 1.0 - p_c;
  bool approximated = false;
  std::vector<double> errors;
  errors.reserve(max_context + 1);
  std::vector<double> terms;
  for (std::size_t ell = 0; ell <= max_context; ++ell) {
    const double l = static_cast<double>(ell);
    const double log_total = std::log(l + 2.0);
    if (p == 0.0 || p == 1.0) {
      out.values.push_back(log_total - std::log(l + 1.0));
      errors.push_back(0.0);
      continue;
    }
    const double mean = l * p, var = l * p * q;
    if (ell > options.normal_threshold) {
      // Delta method for E log(k+1) and E log(l+1-k), k ~ Binomial(l, p),
      // through the third central moment; the fourth-order term bounds the
      // error.
      const double k3 = var * (1.0 - 2.0 * p);
      const double a = mean + 1.0, b = l * q + 1.0;
      const double e_heads = std::log(a) - var / (2.0 * a * a) + k3 / (3.0 * a * a * a);
      const double e_tails = std::log(b) - var / (2.0 * b * b) - k3 / (3.0 * b * b * b);
      out.values.push_back(log_total - p * e_heads - q * e_tails);
      const double m4 = 3.0 * var * var;
      errors.push_back(p * m4 / (4.0 * std::pow(a, 4)) + q * m4 / (4.0 * std::pow(b, 4)));
      approximated = true;
      continue;
    }
    const double sd = std::sqrt(var);
    const double lo = std::max(0.0, std::floor(mean - 40.0 * sd - 10.0));
    const double hi = std::min(l, std::ceil(mean + 40.0 * sd + 10.0));
    const double lp = std::log(p), lq = std::log(q);
    terms.clear();
    for (auto k = static_cast<std::size_t>(lo); k <= static_cast<std::size_t>(hi); ++k) {
      const double kk = static_cast<double>(k);
      const double pmf =
          std::exp(log_binomial(ell, k) + kk * lp + (l - kk) * lq);
      terms.push_back(pmf * (log_total - p * std::log(kk + 1.0) - q * std::log(l + 1.0 - kk)));
    }
    out.values.push_back(pairwise_sum(terms));
    errors.push_back(0.0);
  }
  if (approximated) {
    out.error_estimate = std::move(errors);
    out.warnings.push_back("normal approximation used beyond context " +
                           std::to_string(options.normal_threshold));
  }
  return out;
}

namespace {

PowerLawFit tail_fit(std::span<const double> indices, std::span<const double> values, double h,
                     std::size_t begin, std::size_t end, bool log_x) {
  if (indices.size() != values.size()) {
    throw ValidationError("indices and values differ in length");
  }
  if (begin > end) throw ValidationError("fit window is empty");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const double idx = indices[i];
    if (idx < static_cast<double>(begin) || idx > static_cast<double>(end)) continue;
    const double r = values[i] - h;
    if (!(r > 0.0)) {
      throw ValidationError("non-positive residual entropy " + std::to_string(r) + " at index " +
                            std::to_string(static_cast<long long>(idx)) +
                            " (asymptote mis-specified?)");
    }
    if (log_x && !(idx > 0.0)) throw ValidationError("power-law window must exclude index 0");
    x.push_back(log_x ? std::log(idx) : idx);
    y.push_back(std::log(r));
  }
  if (x.size() < 2) throw ValidationError("fit window holds fewer than two points");
  const auto line = fit_line(x, y);
  PowerLawFit fit;
  fit.slope = line.slope;
  fit.intercept = line.intercept;
  fit.r_squared = line.r_squared;
  fit.residuals = line.residuals;
  fit.window_begin = begin;
  fit.window_end = end;
  fit.points = line.points;
  return fit;
}

std::vector<double> iota_from(std::size_t first, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(first + i);
  return v;
}

}  // namespace

PowerLawFit power_law_diagnostics(std::span<const double> indices, std::span<const double> values,
                                  double h, std::size_t begin, std::size_t end) {
  return tail_fit(indices, values, h, begin, end, true);
}

PowerLawFit exponential_diagnostics(std::span<const double> indices,
                                    std::span<const double> values, double h, std::size_t begin,
                                    std::size_t end) {
  return tail_fit(indices, values, h, begin, end, false);
}

PowerLawFit power_law_diagnostics(const ComponentLossCurve& curve, double h, std::size_t begin,
                                  std::size_t end) {
  const auto idx = iota_from(0, curve.values.size());
  return tail_fit(idx, curve.values, h, begin, end, true);
}

PowerLawFit exponential_diagnostics(const ComponentLossCurve& curve, double h, std::size_t begin,
                                    std::size_t end) {
  const auto idx = iota_from(0, curve.values.size());
  return tail_fit(idx, curve.values, h, begin, end, false);
}

PowerLawFit power_law_diagnostics(const EntropyCurve& curve, double h, std::size_t begin,
                                  std::size_t end) {
  const auto idx = iota_from(1, curve.values.size());
  return tail_fit(idx, curve.values, h, begin, end, true);
}

PowerLawFit exponential_diagnostics(const EntropyCurve& curve, double h, std::size_t begin,
                                    std::size_t end) {
  const auto idx = iota_from(1, curve.values.size());
  return tail_fit(idx, curve.values, h, begin, end, false);
}

}  // namespace myopic
