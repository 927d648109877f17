#include "myopic/process.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "myopic/errors.hpp"
#include "myopic/numeric.hpp"

namespace myopic {

HiddenMarkovProcess::HiddenMarkovProcess(std::vector<std::string> alphabet,
                                         std::vector<std::string> states,
                                         RowVector initial,
                                         std::vector<Matrix> transitions)
    : alphabet_(std::move(alphabet)),
      states_(std::move(states)),
      initial_(std::move(initial)),
      transitions_(std::move(transitions)) {
  if (alphabet_.empty()) throw ValidationError("process alphabet is empty");
  if (states_.empty()) throw ValidationError("process has no latent states");
  const auto n = static_cast<Eigen::Index>(states_.size());
  if (initial_.size() != n) {
    throw ValidationError("initial belief has length " + std::to_string(initial_.size()) +
                          ", expected " + std::to_string(n));
  }
  if (transitions_.size() != alphabet_.size()) {
    throw ValidationError("expected one transition matrix per token (" +
                          std::to_string(alphabet_.size()) + "), got " +
                          std::to_string(transitions_.size()));
  }
  for (std::size_t x = 0; x < transitions_.size(); ++x) {
    if (transitions_[x].rows() != n || transitions_[x].cols() != n) {
      throw ValidationError("transition matrix for token '" + alphabet_[x] +
                            "' is not " + std::to_string(n) + "x" + std::to_string(n));
    }
  }
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    for (std::size_t j = i + 1; j < alphabet_.size(); ++j) {
      if (alphabet_[i] == alphabet_[j]) {
        throw ValidationError("duplicate token label '" + alphabet_[i] + "'");
      }
    }
  }
}

Matrix HiddenMarkovProcess::net_transition() const {
  Matrix total = Matrix::Zero(static_cast<Eigen::Index>(state_count()),
                              static_cast<Eigen::Index>(state_count()));
  for (const auto& t : transitions_) total += t;
  return total;
}

std::optional<Token> HiddenMarkovProcess::token_index(std::string_view label) const {
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    if (alphabet_[i] == label) return i;
  }
  return std::nullopt;
}

Word HiddenMarkovProcess::encode(std::span<const std::string> labels) const {
  Word word;
  word.reserve(labels.size());
  for (const auto& label : labels) {
    auto idx = token_index(label);
    if (!idx) throw ValidationError("token '" + label + "' is not in the alphabet");
    word.push_back(*idx);
  }
  return word;
}

std::string HiddenMarkovProcess::decode(std::span<const Token> word,
                                        std::string_view sep) const {
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) out += sep;
    out += alphabet_.at(word[i]);
  }
  return out;
}

HiddenMarkovProcess HiddenMarkovProcess::with_initial(RowVector initial) const {
  return HiddenMarkovProcess(alphabet_, states_, std::move(initial), transitions_);
}

BeliefUpdate belief_update(const HiddenMarkovProcess& process, const Belief& belief,
                           Token token) {
  if (token >= process.alphabet_size()) {
    throw ValidationError("token index " + std::to_string(token) + " outside alphabet");
  }
  RowVector joint = belief.weights() * process.transition(token);
  const double p = joint.sum();
  if (!(p > 0.0)) return BeliefUpdate{0.0, std::nullopt};
  joint /= p;
  return BeliefUpdate{p, Belief(std::move(joint))};
}

std::vector<double> next_token_distribution(const HiddenMarkovProcess& process,
                                            const Belief& belief) {
  std::vector<double> probs(process.alphabet_size());
  for (Token x = 0; x < process.alphabet_size(); ++x) {
    probs[x] = (belief.weights() * process.transition(x)).sum();
  }
  return probs;
}

double next_token_entropy(const HiddenMarkovProcess& process, const Belief& belief) {
  const auto probs = next_token_distribution(process, belief);
  return shannon_entropy(probs);
}

double log_sequence_probability(const HiddenMarkovProcess& process,
                                std::span<const Token> word) {
  Belief belief = Belief::initial(process);
  double log_p = 0.0;
  for (Token x : word) {
    auto step = belief_update(process, belief, x);
    if (step.forbidden()) return -std::numeric_limits<double>::infinity();
    log_p += std::log(step.probability);
    belief = std::move(*step.next);
  }
  return log_p;
}

double sequence_probability(const HiddenMarkovProcess& process,
                            std::span<const Token> word) {
  return std::exp(log_sequence_probability(process, word));
}

bool ValidationReport::valid() const {
  for (const auto& issue : issues) {
    if (issue.severity == ValidationIssue::Severity::error) return false;
  }
  return true;
}

std::vector<ValidationIssue> ValidationReport::errors() const {
  std::vector<ValidationIssue> out;
  for (const auto& i : issues) {
    if (i.severity == ValidationIssue::Severity::error) out.push_back(i);
  }
  return out;
}

std::vector<ValidationIssue> ValidationReport::warnings() const {
  std::vector<ValidationIssue> out;
  for (const auto& i : issues) {
    if (i.severity == ValidationIssue::Severity::warning) out.push_back(i);
  }
  return out;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& i : issues) {
    if (!first) os << "; ";
    first = false;
    os << (i.severity == ValidationIssue::Severity::error ? "error" : "warning") << " ["
       << i.code << "] " << i.message;
  }
  return os.str();
}

namespace {

void add_issue(ValidationReport& report, ValidationIssue::Severity severity,
               std::string code, std::string message,
               std::optional<std::size_t> index = std::nullopt) {
  report.issues.push_back({severity, std::move(code), std::move(message), index});
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

ValidationReport validate(const HiddenMarkovProcess& process) {
  using Sev = ValidationIssue::Severity;
  ValidationReport report;
  const auto n = static_cast<Eigen::Index>(process.state_count());

  for (Token x = 0; x < process.alphabet_size(); ++x) {
    const Matrix& t = process.transition(x);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double v = t(i, j);
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
          add_issue(report, Sev::error, "entry_range",
                    "T^(" + process.alphabet()[x] + ")[" + std::to_string(i) + "][" +
                        std::to_string(j) + "] = " + fmt(v) + " outside [0,1]",
                    static_cast<std::size_t>(i));
        }
      }
    }
  }

  const Matrix total = process.net_transition();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double row = total.row(i).sum();
    if (!(std::abs(row - 1.0) <= kStochasticTolerance)) {
      add_issue(report, Sev::error, "row_stochastic",
                "row " + std::to_string(i) + " (" + process.states()[static_cast<std::size_t>(i)] +
                    ") of T sums to " + fmt(row),
                static_cast<std::size_t>(i));
    }
  }

  double init_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = process.initial()(i);
    init_sum += v;
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      add_issue(report, Sev::error, "initial_range",
                "initial belief entry " + std::to_string(i) + " = " + fmt(v) +
                    " outside [0,1]",
                static_cast<std::size_t>(i));
    }
  }
  if (!(std::abs(init_sum - 1.0) <= kStochasticTolerance)) {
    add_issue(report, Sev::error, "initial_sum", "initial belief sums to " + fmt(init_sum));
  }

  // Reachability from the support of the initial belief.
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::deque<Eigen::Index> queue;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (process.initial()(i) > 0.0) {
      seen[static_cast<std::size_t>(i)] = true;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    const auto s = queue.front();
    queue.pop_front();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (total(s, j) > 0.0 && !seen[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = true;
        queue.push_back(j);
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!seen[static_cast<std::size_t>(i)]) {
      add_issue(report, Sev::warning, "unreachable",
                "state " + process.states()[static_cast<std::size_t>(i)] +
                    " is unreachable from the initial belief",
                static_cast<std::size_t>(i));
    }
  }
  return report;
}

void require_valid(const HiddenMarkovProcess& process) {
  auto report = validate(process);
  if (!report.valid()) throw ValidationError("invalid process: " + report.summary());
}

StationaryDistribution stationary_distribution(const HiddenMarkovProcess& process,
                                               double tolerance,
                                               std::size_t max_iterations) {
  const Matrix t = process.net_transition();
  const Matrix lazy = 0.5 * (t + Matrix::Identity(t.rows(), t.cols()));
  StationaryDistribution result;
  RowVector pi = process.initial();
  for (std::size_t it = 0; it < max_iterations; ++it) {
    RowVector next = pi * lazy;
    next /= next.sum();
    const double residual = (next * t - next).cwiseAbs().maxCoeff();
    pi = std::move(next);
    result.iterations = it + 1;
    result.residual = residual;
    if (residual <= tolerance) {
      result.converged = true;
      break;
    }
  }
  result.distribution = std::move(pi);
  return result;
}

bool is_stationary(const HiddenMarkovProcess& process, double tolerance) {
  const RowVector moved = process.initial() * process.net_transition();
  return (moved - process.initial()).cwiseAbs().maxCoeff() <= tolerance;
}

MixtureProcess::MixtureProcess(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw ValidationError("mixture has no components");
  const auto& alphabet = components_.front().process.alphabet();
  for (std::size_t c = 1; c < components_.size(); ++c) {
    if (components_[c].process.alphabet() != alphabet) {
      throw ValidationError("mixture component " + std::to_string(c) +
                            " has a different alphabet than component 0");
    }
  }
}

std::size_t MixtureProcess::block_offset(std::size_t c) const {
  std::size_t offset = 0;
  for (std::size_t i = 0; i < c; ++i) offset += components_.at(i).process.state_count();
  return offset;
}

ValidationReport validate(const MixtureProcess& mixture) {
  ValidationReport report;
  double total = 0.0;
  for (std::size_t c = 0; c < mixture.size(); ++c) {
    const double w = mixture[c].weight;
    total += w;
    if (!std::isfinite(w) || w < 0.0 || w > 1.0) {
      report.issues.push_back({ValidationIssue::Severity::error, "weight_range",
                               "component " + std::to_string(c) + " weight " + fmt(w) +
                                   " outside [0,1]",
                               c});
    }
    for (auto issue : validate(mixture[c].process).issues) {
      issue.message = "component " + std::to_string(c) + ": " + issue.message;
      report.issues.push_back(std::move(issue));
    }
  }
  if (!(std::abs(total - 1.0) <= kStochasticTolerance)) {
    report.issues.push_back({ValidationIssue::Severity::error, "weight_sum",
                             "mixture weights sum to " + fmt(total), std::nullopt});
  }
  return report;
}

void require_valid(const MixtureProcess& mixture) {
  auto report = validate(mixture);
  if (!report.valid()) throw ValidationError("invalid mixture: " + report.summary());
}

HiddenMarkovProcess mixture_as_hmm(const MixtureProcess& mixture) {
  std::size_t total = 0;
  for (const auto& comp : mixture.components()) total += comp.process.state_count();
  const auto n = static_cast<Eigen::Index>(total);
  const std::size_t k = mixture.alphabet().size();

  std::vector<std::string> states;
  states.reserve(total);
  RowVector initial = RowVector::Zero(n);
  std::vector<Matrix> transitions(k, Matrix::Zero(n, n));

  Eigen::Index offset = 0;
  for (std::size_t c = 0; c < mixture.size(); ++c) {
    const auto& comp = mixture[c];
    const auto m = static_cast<Eigen::Index>(comp.process.state_count());
    for (const auto& label : comp.process.states()) {
      states.push_back("c" + std::to_string(c) + ":" + label);
    }
    initial.segment(offset, m) = comp.weight * comp.process.initial();
    for (Token x = 0; x < k; ++x) {
      transitions[x].block(offset, offset, m, m) = comp.process.transition(x);
    }
    offset += m;
  }
  return HiddenMarkovProcess(mixture.alphabet(), std::move(states), std::move(initial),
                             std::move(transitions));
}

}  // namespace myopic
