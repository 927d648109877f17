#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "myopic/process.hpp"

namespace myopic {

struct MarkovOrder {
  enum class Kind { finite, infinite, unknown };
  Kind kind = Kind::unknown;
  std::size_t value = 0;

  static MarkovOrder finite(std::size_t n) { return {Kind::finite, n}; }
  static MarkovOrder infinite() { return {Kind::infinite, 0}; }
  static MarkovOrder unknown() { return {Kind::unknown, 0}; }

  bool is_finite() const { return kind == Kind::finite; }
  std::string to_string() const;
};

using NamedValues = std::vector<std::pair<std::string, double>>;

struct ProcessDescriptor {
  std::string name;
  NamedValues parameters;
  MarkovOrder markov_order;
  std::size_t ergodic_components = 1;
  /// Builder-computed quantities (e.g. parentheses overflow mass).
  NamedValues diagnostics;
  /// Warnings and disclosures (reconstructed parameterizations, even N, ...).
  std::vector<std::string> notes;
};

/// A built process. `process` is always usable by the HMM machinery; for
/// mixtures it is mixture_as_hmm(*mixture).
struct ZooProcess {
  ProcessDescriptor descriptor;
  HiddenMarkovProcess process;
  std::optional<MixtureProcess> mixture;
};

ZooProcess biased_coin(double p);
/// Coins of bias n/(N+1), n = 1..N, drawn uniformly.
ZooProcess n_biased_coins(std::size_t n);
ZooProcess golden_mean(double p = 0.5);
/// A '1' is followed by at least `zeros` forced '0' tokens; afterwards '1'
/// is emitted with probability p. Markov order equals `zeros`.
ZooProcess golden_mean_53(double p = 0.3, std::size_t zeros = 5);
ZooProcess even_process(double p = 0.5);
ZooProcess simple_nonunifilar_source(double p = 0.5, double q = 0.5);
/// Three-token stand-in with both an ephemeral transient belief (drains
/// after one step) and transient beliefs that persist on 1^k contexts.
ZooProcess teddy_bear(double p = 0.5, double q = 0.25);
/// Stack-depth chain on {"(", ")"} with states 0..max_depth started empty.
/// The top state saturates, so statistics are exact for every sequence
/// whose depth stays within max_depth; diagnostics carry "overflow_mass",
/// the probability that the untruncated depth exceeds max_depth within
/// `horizon` tokens (horizon defaults to max_depth).
ZooProcess parentheses_matching(double p_open = 0.5, std::size_t max_depth = 64,
                                std::optional<std::size_t> horizon = std::nullopt);
ZooProcess two_biased_coins(double p1 = 0.25, double p2 = 0.75, double w1 = 0.5);
/// Components 0 ("Wonka") and 1 ("Dursley"): per step "Mr." with
/// probability q, else "blah" (p) or "something" (1-p); the token after
/// "Mr." is the component's name.
ZooProcess wonka_dursley(double p = 0.4, double q = 0.25, double w = 0.5);

/// Probability that the untruncated depth walk exceeds max_depth within
/// `horizon` tokens.
double parentheses_overflow_mass(double p_open, std::size_t max_depth, std::size_t horizon);

using ParameterMap = std::map<std::string, double, std::less<>>;

struct ZooEntry {
  std::string name;
  std::string summary;
  NamedValues defaults;
  MarkovOrder markov_order;
  std::size_t ergodic_components = 1;
  /// False for analytic-only families with no finite HMM (ncoins-inf).
  bool has_hmm = true;
  std::function<ZooProcess(const ParameterMap&)> build;
};

const std::vector<ZooEntry>& zoo_registry();
const ZooEntry& zoo_entry(std::string_view name);
/// Unknown names or parameters raise ValidationError; analytic-only
/// families raise CapabilityError.
ZooProcess build_zoo_process(std::string_view name, const ParameterMap& overrides = {});

/// `list-processes` payload: name, parameters, markov_order, components.
std::string zoo_registry_json(int indent = 2);

}  // namespace myopic
