#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace myopic {

using Token = std::size_t;
using Word = std::vector<Token>;
using RowVector = Eigen::RowVectorXd;
using Matrix = Eigen::MatrixXd;

/// Mealy HMM: T^(x)[s][s'] = Pr(x, s' | s). Row vectors are distributions.
///
/// The constructor checks shapes only; numeric invariants (stochasticity,
/// ranges) are reported by validate() so that malformed inputs can be
/// diagnosed rather than rejected outright.
class HiddenMarkovProcess {
 public:
  HiddenMarkovProcess(std::vector<std::string> alphabet,
                      std::vector<std::string> states, RowVector initial,
                      std::vector<Matrix> transitions);

  const std::vector<std::string>& alphabet() const { return alphabet_; }
  const std::vector<std::string>& states() const { return states_; }
  std::size_t alphabet_size() const { return alphabet_.size(); }
  std::size_t state_count() const { return states_.size(); }

  const RowVector& initial() const { return initial_; }
  const Matrix& transition(Token x) const { return transitions_.at(x); }
  const std::vector<Matrix>& transitions() const { return transitions_; }

  /// T = sum_x T^(x).
  Matrix net_transition() const;

  std::optional<Token> token_index(std::string_view label) const;
  /// Maps labels to token indices; throws ValidationError on unknown labels.
  Word encode(std::span<const std::string> labels) const;
  std::string decode(std::span<const Token> word, std::string_view sep = " ") const;

  /// Same dynamics, different start distribution.
  HiddenMarkovProcess with_initial(RowVector initial) const;

 private:
  std::vector<std::string> alphabet_;
  std::vector<std::string> states_;
  RowVector initial_;
  std::vector<Matrix> transitions_;
};

/// Probability vector over the latent states of one process.
class Belief {
 public:
  explicit Belief(RowVector weights) : weights_(std::move(weights)) {}
  static Belief initial(const HiddenMarkovProcess& process) {
    return Belief(process.initial());
  }

  const RowVector& weights() const { return weights_; }
  std::size_t size() const { return static_cast<std::size_t>(weights_.size()); }
  double operator[](std::size_t i) const { return weights_(static_cast<Eigen::Index>(i)); }

 private:
  RowVector weights_;
};

/// Outcome of conditioning a belief on one token. A zero-probability token
/// is a forbidden continuation: `next` is empty and `probability` is 0.
struct BeliefUpdate {
  double probability = 0.0;
  std::optional<Belief> next;

  bool forbidden() const { return !next.has_value(); }
};

BeliefUpdate belief_update(const HiddenMarkovProcess& process, const Belief& belief,
                           Token token);

/// Pr(x | belief) for every token, i.e. eta T^(x) 1.
std::vector<double> next_token_distribution(const HiddenMarkovProcess& process,
                                            const Belief& belief);

/// H[X | belief] in nats.
double next_token_entropy(const HiddenMarkovProcess& process, const Belief& belief);

/// log Q(w), accumulated along normalized beliefs; -inf for forbidden words.
double log_sequence_probability(const HiddenMarkovProcess& process,
                                std::span<const Token> word);
double sequence_probability(const HiddenMarkovProcess& process,
                            std::span<const Token> word);

struct ValidationIssue {
  enum class Severity { warning, error };
  Severity severity = Severity::error;
  std::string code;
  std::string message;
  std::optional<std::size_t> index;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool valid() const;
  std::vector<ValidationIssue> errors() const;
  std::vector<ValidationIssue> warnings() const;
  std::string summary() const;
};

inline constexpr double kStochasticTolerance = 1e-12;

ValidationReport validate(const HiddenMarkovProcess& process);
/// Throws ValidationError listing every error-level issue.
void require_valid(const HiddenMarkovProcess& process);

struct StationaryDistribution {
  RowVector distribution;
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Lazy power iteration (T + I)/2 started from the process's initial belief,
/// iterated until ||pi T - pi||_inf <= tolerance. On reducible chains the
/// result is the component-weighted stationary distribution reached from the
/// initial belief.
StationaryDistribution stationary_distribution(const HiddenMarkovProcess& process,
                                               double tolerance = 1e-13,
                                               std::size_t max_iterations = 2'000'000);

/// True when initial_belief is invariant under T within `tolerance`.
bool is_stationary(const HiddenMarkovProcess& process, double tolerance = 1e-12);

struct MixtureComponent {
  double weight = 0.0;
  HiddenMarkovProcess process;
};

/// Non-ergodic process: each sequence draws one component by weight.
class MixtureProcess {
 public:
  /// Throws ValidationError if the alphabets differ or the list is empty.
  explicit MixtureProcess(std::vector<MixtureComponent> components);

  const std::vector<MixtureComponent>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }
  const MixtureComponent& operator[](std::size_t c) const { return components_.at(c); }
  const std::vector<std::string>& alphabet() const {
    return components_.front().process.alphabet();
  }
  /// First latent-state index of component c inside mixture_as_hmm().
  std::size_t block_offset(std::size_t c) const;

 private:
  std::vector<MixtureComponent> components_;
};

ValidationReport validate(const MixtureProcess& mixture);
void require_valid(const MixtureProcess& mixture);

/// Block-diagonal realization with concatenated, weight-scaled initial beliefs.
HiddenMarkovProcess mixture_as_hmm(const MixtureProcess& mixture);

}  // namespace myopic
