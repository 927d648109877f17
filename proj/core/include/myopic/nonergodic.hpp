#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "myopic/entropy.hpp"
#include "myopic/fit.hpp"
#include "myopic/process.hpp"

namespace myopic {

enum class LossProvenance { closed_form, belief_exact, limit_formula };
const char* to_string(LossProvenance p);

/// In-context loss indexed by context length: values[l] is the expected
/// loss on token l + 1 after l observed tokens, so values[0] is the prior
/// predictive loss. Nats.
struct ComponentLossCurve {
  /// Component the sequences were drawn from; empty for the mixture average.
  std::optional<std::size_t> component;
  std::vector<double> values;
  LossProvenance provenance = LossProvenance::belief_exact;
  std::string process_name;
  std::optional<CurveAsymptote> asymptote;
  /// Per-context absolute error bound where an approximation was used (empty
  /// when every value is exact).
  std::vector<double> error_estimate;
  std::vector<std::string> warnings;

  std::size_t max_context() const { return values.size() - 1; }
  double at(std::size_t context) const { return values.at(context); }
};

/// Shifts to 1-based positions (context l becomes position l + 1).
EntropyCurve to_entropy_curve(const ComponentLossCurve& curve);

struct LayerOptions {
  double merge_tolerance = kDefaultMergeTolerance;
  std::size_t max_layer_beliefs = std::size_t{1} << 20;
};

/// Expected loss of the Bayes-optimal mixture predictor on sequences from
/// component c, for contexts 0..max_context. Component posteriors are kept
/// in log space. CapabilityError when a layer exceeds the belief cap.
ComponentLossCurve component_in_context_loss(const MixtureProcess& mixture, std::size_t c,
                                             std::size_t max_context,
                                             const LayerOptions& options = {});

/// Bias of coin c (1-based) among N: c / (N + 1).
double ncoin_bias(std::size_t n, std::size_t c);
/// Closed form over head counts; c is 1-based.
ComponentLossCurve ncoins_component_loss(std::size_t n, std::size_t c, std::size_t max_context);
ComponentLossCurve ncoins_myopic_entropy(std::size_t n, std::size_t max_context);

struct BetaMoment {
  double value = 0.0;
  bool exact = false;
  /// "p/q" when exact.
  std::string rational;
};

/// integral_0^1 p^a (1-p)^b dp = a! b! / (a+b+1)!. Exact rational for
/// a + b <= 60, lgamma beyond. ValidationError on negative inputs.
BetaMoment beta_moment(std::int64_t a, std::int64_t b);

inline constexpr double kInfiniteCoinsEntropyRate = 0.5;

/// (1/(l+1)) sum_k B2((k+1)/(l+2)) for l = 0..max_context, with the
/// analytic asymptote 1/2.
ComponentLossCurve infinite_coins_myopic_entropy(std::size_t max_context);

struct InfiniteCoinOptions {
  /// Contexts above this use the normal approximation.
  std::size_t normal_threshold = 100'000;
};

/// Loss of the rule-of-succession predictor on a coin of bias p_c.
ComponentLossCurve infinite_coins_component_loss(double p_c, std::size_t max_context,
                                                 const InfiniteCoinOptions& options = {});

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  /// Fit residuals in log space, one per point of the window.
  std::vector<double> residuals;
  std::size_t window_begin = 0;
  std::size_t window_end = 0;
  std::size_t points = 0;
};

/// Least squares of log(value - h) against log(index) (or index itself for
/// the exponential model) over indices in [begin, end]. ValidationError if
/// any residual entropy is non-positive or the window has < 2 points.
PowerLawFit power_law_diagnostics(std::span<const double> indices, std::span<const double> values,
                                  double h, std::size_t begin, std::size_t end);
PowerLawFit exponential_diagnostics(std::span<const double> indices,
                                    std::span<const double> values, double h, std::size_t begin,
                                    std::size_t end);

/// Context-length indexing.
PowerLawFit power_law_diagnostics(const ComponentLossCurve& curve, double h, std::size_t begin,
                                  std::size_t end);
PowerLawFit exponential_diagnostics(const ComponentLossCurve& curve, double h, std::size_t begin,
                                    std::size_t end);
/// 1-based position indexing.
PowerLawFit power_law_diagnostics(const EntropyCurve& curve, double h, std::size_t begin,
                                  std::size_t end);
PowerLawFit exponential_diagnostics(const EntropyCurve& curve, double h, std::size_t begin,
                                    std::size_t end);

}  // namespace myopic
