#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "myopic/process.hpp"

namespace myopic {

inline constexpr double kDefaultMergeTolerance = 1e-9;

enum class NodeClass {
  transient,
  recurrent,
  /// Frontier node of an open MSP; its successors were never computed.
  unresolved,
  /// Open MSP, and the node can reach the unresolved frontier.
  undetermined,
};

const char* to_string(NodeClass c);

struct MspEdge {
  Token token = 0;
  double probability = 0.0;
  std::size_t target = 0;
};

struct MspNode {
  Belief belief;
  /// Length of the shortest context reaching the node.
  std::size_t depth = 0;
  /// Rank among the nodes first discovered at `depth`, in lexicographic
  /// context order.
  std::size_t rank = 0;
  /// Shortest (then lexicographically smallest) inducing context.
  Word context;
  /// Next-token entropy H[X | belief], nats.
  double entropy = 0.0;
  std::vector<MspEdge> edges;
  NodeClass node_class = NodeClass::undetermined;
};

struct MspClosure {
  bool closed = false;
  /// Closed: deepest nonempty layer. Open: the construction depth.
  std::size_t depth = 0;
};

/// Belief-state automaton of a process, built breadth first from eta_0.
class MixedStatePresentation {
 public:
  const std::vector<MspNode>& nodes() const { return nodes_; }
  const MspNode& node(std::size_t i) const { return nodes_.at(i); }
  std::size_t size() const { return nodes_.size(); }
  static constexpr std::size_t origin() { return 0; }

  const MspClosure& closure() const { return closure_; }
  bool closed() const { return closure_.closed; }
  std::size_t construction_depth() const { return construction_depth_; }
  double merge_tolerance() const { return merge_tolerance_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  std::size_t state_count() const { return state_count_; }

  /// Largest l for which W^l from the origin is exact.
  std::size_t valid_depth() const {
    return closure_.closed ? std::numeric_limits<std::size_t>::max() : construction_depth_;
  }
  /// Number of nodes first discovered at each depth.
  std::vector<std::size_t> layer_sizes() const;
  /// |H(X|H)>: next-token entropy per node.
  std::vector<double> entropy_functional() const;

 private:
  friend MixedStatePresentation build_msp(const HiddenMarkovProcess&, std::size_t, double,
                                          std::size_t);

  std::vector<MspNode> nodes_;
  MspClosure closure_;
  std::size_t construction_depth_ = 0;
  double merge_tolerance_ = kDefaultMergeTolerance;
  std::vector<std::string> alphabet_;
  std::size_t state_count_ = 0;
};

/// Expands layers 0..max_depth-1. Beliefs that agree coordinatewise to a
/// relative `merge_tolerance` (see beliefs_match) are identified; zero-probability edges are omitted. Throws
/// ValidationError for an invalid process or a tolerance >= 0.5, and
/// CapabilityError once more than `max_nodes` nodes have been discovered.
MixedStatePresentation build_msp(const HiddenMarkovProcess& process, std::size_t max_depth,
                                 double merge_tolerance = kDefaultMergeTolerance,
                                 std::size_t max_nodes = std::numeric_limits<std::size_t>::max());

/// Repeated application of W to a node distribution.
class MspWalker {
 public:
  explicit MspWalker(const MixedStatePresentation& msp);

  /// Distribution <delta_origin| W^depth().
  const std::vector<double>& distribution() const { return mass_; }
  std::size_t depth() const { return depth_; }
  /// Throws CapabilityError past the MSP's valid depth.
  void advance();
  /// <mass | H(X|H)>.
  double expected_entropy() const;

 private:
  const MixedStatePresentation* msp_;
  std::vector<double> mass_;
  std::vector<double> scratch_;
  std::size_t depth_ = 0;
};

/// <delta_origin| W^ell.
std::vector<double> operator_power_distribution(const MixedStatePresentation& msp,
                                                std::size_t ell);

struct EntropyAtom {
  double probability = 0.0;
  double entropy = 0.0;
};

/// Distribution of the next-token entropy after ell tokens.
struct EntropyDistribution {
  /// Atoms grouped by entropy value, sorted ascending by entropy.
  std::vector<EntropyAtom> atoms;
  double mean = 0.0;
  double variance = 0.0;
  double log_alphabet = 0.0;

  bool variance_within_bound() const {
    return variance <= log_alphabet * log_alphabet * (1.0 + 1e-12) + 1e-15;
  }
};

EntropyDistribution next_token_entropy_distribution(const MixedStatePresentation& msp,
                                                    std::size_t ell);

/// Nodes carrying positive mass after ell tokens.
std::vector<std::size_t> support_at_depth(const MixedStatePresentation& msp, std::size_t ell);

/// The closed MSP read back as an HMM over its nodes (unifilar by
/// construction). Throws CapabilityError for an open MSP.
HiddenMarkovProcess msp_as_hmm(const MixedStatePresentation& msp);

}  // namespace myopic
