#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "myopic/msp.hpp"
#include "myopic/process.hpp"
#include "myopic/zoo.hpp"

namespace myopic {

enum class CurveMethod { msp_operator, layered_beliefs };
const char* to_string(CurveMethod m);
/// "msp-operator" or "layered-beliefs"; ValidationError otherwise.
CurveMethod parse_curve_method(std::string_view text);

/// What the values mean downstream. A loss bound is the same numbers with a
/// different reading: no model evaluated on the process can go below it.
enum class CurveKind { myopic_entropy, loss_bound, plugin_estimate };
const char* to_string(CurveKind k);

struct CurveAsymptote {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::string method;
};

/// values[i] is the entropy at position i + 1, i.e. of token i + 1 given the
/// i preceding tokens. Nats.
struct EntropyCurve {
  std::vector<double> values;
  /// Optional per-position band (same length as values or empty).
  std::vector<double> lower;
  std::vector<double> upper;
  std::optional<CurveAsymptote> asymptote;

  std::string process_name;
  std::optional<ProcessDescriptor> descriptor;
  std::string method;
  double merge_tolerance = kDefaultMergeTolerance;
  CurveKind kind = CurveKind::myopic_entropy;
  /// True when the initial belief is stationary; monotonicity is only
  /// expected in that case.
  bool stationary_start = true;
  std::size_t alphabet_size = 0;

  std::size_t length() const { return values.size(); }
  /// 1-based position.
  double at(std::size_t position) const { return values.at(position - 1); }
};

struct CurveOptions {
  CurveMethod method = CurveMethod::layered_beliefs;
  double merge_tolerance = kDefaultMergeTolerance;
  /// msp-operator only: construction depth (default L - 1). An open MSP
  /// shallower than L - 1 is a CapabilityError.
  std::optional<std::size_t> max_depth;
  /// layered-beliefs only: distinct beliefs allowed in one layer.
  std::size_t max_layer_beliefs = std::size_t{1} << 20;
};

EntropyCurve myopic_entropy_curve(const HiddenMarkovProcess& process, std::size_t length,
                                  const CurveOptions& options = {});
EntropyCurve myopic_entropy_curve(const ZooProcess& process, std::size_t length,
                                  const CurveOptions& options = {});
/// Curve of a closed-or-deep-enough MSP, positions 1..length.
EntropyCurve myopic_entropy_curve(const MixedStatePresentation& msp, std::size_t length);

/// Same curve, tagged as the in-context loss floor for any model evaluated
/// on sequences from `process`.
EntropyCurve heldout_loss_lower_bound(const HiddenMarkovProcess& process, std::size_t length,
                                      const CurveOptions& options = {});
EntropyCurve heldout_loss_lower_bound(const ZooProcess& process, std::size_t length,
                                      const CurveOptions& options = {});

/// Largest increase between consecutive positions (0 when non-increasing).
double max_increase(const EntropyCurve& curve);
bool is_non_increasing(const EntropyCurve& curve, double tolerance = 1e-10);

struct EntropyRate {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  /// "msp-stationary", "ergodic-decomposition", "aitken-bracket" or
  /// "analytic".
  std::string method;
  bool exact = false;
  /// Bracket width within RateOptions::tolerance.
  bool converged = false;
  /// Positions used by the bracket (0 for exact methods).
  std::size_t horizon = 0;

  double width() const { return upper - lower; }
};

struct RateOptions {
  /// Depth tried for an exact closed MSP before falling back to a bracket.
  std::size_t msp_depth = 256;
  std::size_t horizon = 512;
  double merge_tolerance = kDefaultMergeTolerance;
  double tolerance = 1e-10;
  std::size_t max_layer_beliefs = std::size_t{1} << 18;
};

EntropyRate entropy_rate(const HiddenMarkovProcess& process, const RateOptions& options = {});
EntropyRate entropy_rate(const MixtureProcess& mixture, const RateOptions& options = {});
EntropyRate entropy_rate(const ZooProcess& process, const RateOptions& options = {});
/// Stationary node distribution of a closed MSP reached from its origin,
/// paired with the entropy functional.
EntropyRate entropy_rate(const MixedStatePresentation& msp);

/// Aitken delta-squared bracket from the tail of a curve.
EntropyRate bracket_entropy_rate(const EntropyCurve& curve, double tolerance = 1e-10);

struct ExcessEntropy {
  /// partial[i] = E_{i+1} = sum_{l <= i+1} (h_l - h), at the central rate.
  std::vector<double> partial;
  std::vector<double> partial_lower;
  std::vector<double> partial_upper;
  /// Partial sum plus the fitted tail; meaningless when divergent.
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  /// "none" (residuals vanish), "power", "exponential" or "indeterminate".
  std::string tail_model;
  double tail_exponent = 0.0;
  double tail_r_squared = 0.0;
  bool divergent = false;
};

/// A power-law tail with exponent above this is treated as non-summable.
inline constexpr double kDivergentExponent = -1.02;

ExcessEntropy excess_entropy(const EntropyCurve& curve, const EntropyRate& rate);
ExcessEntropy excess_entropy(const HiddenMarkovProcess& process, std::size_t length,
                             const RateOptions& options = {});

}  // namespace myopic
