#include "myopic/msp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "myopic/belief_index.hpp"
#include "myopic/errors.hpp"
#include "myopic/numeric.hpp"

namespace myopic {

const char* to_string(NodeClass c) {
  switch (c) {
    case NodeClass::transient:
      return "transient";
    case NodeClass::recurrent:
      return "recurrent";
    case NodeClass::unresolved:
      return "unresolved";
    case NodeClass::undetermined:
      break;
  }
  return "undetermined";
}

std::vector<std::size_t> MixedStatePresentation::layer_sizes() const {
  std::vector<std::size_t> sizes;
  for (const auto& n : nodes_) {
    if (n.depth >= sizes.size()) sizes.resize(n.depth + 1, 0);
    ++sizes[n.depth];
  }
  return sizes;
}

std::vector<double> MixedStatePresentation::entropy_functional() const {
  std::vector<double> h(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) h[i] = nodes_[i].entropy;
  return h;
}

namespace {

// Iterative Tarjan; components are emitted in reverse topological order.
std::vector<std::vector<std::size_t>> strongly_connected_components(
    const std::vector<MspNode>& nodes) {
  constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();
  const std::size_t n = nodes.size();
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> components;
  std::size_t counter = 0;

  struct Frame {
    std::size_t node;
    std::size_t edge;
  };
  std::vector<Frame> call;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto& edges = nodes[f.node].edges;
      if (f.edge < edges.size()) {
        const std::size_t w = edges[f.edge++].target;
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.node] = std::min(low[f.node], index[w]);
        }
        continue;
      }
      const std::size_t v = f.node;
      call.pop_back();
      if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[v]);
      if (low[v] == index[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        components.push_back(std::move(comp));
      }
    }
  }
  return components;
}

void classify(std::vector<MspNode>& nodes, const std::vector<bool>& unresolved) {
  const auto comps = strongly_connected_components(nodes);
  std::vector<std::size_t> comp_of(nodes.size());
  for (std::size_t c = 0; c < comps.size(); ++c) {
    for (auto v : comps[c]) comp_of[v] = c;
  }
  std::vector<bool> reaches_frontier(comps.size(), false);
  for (std::size_t c = 0; c < comps.size(); ++c) {
    bool leaves = false;
    bool frontier = false;
    for (auto v : comps[c]) {
      frontier = frontier || unresolved[v];
      for (const auto& e : nodes[v].edges) {
        const auto tc = comp_of[e.target];
        if (tc != c) {
          leaves = true;
          // Successor components were emitted before c.
          frontier = frontier || reaches_frontier[tc];
        }
      }
    }
    reaches_frontier[c] = frontier;
    for (auto v : comps[c]) {
      if (unresolved[v]) {
        nodes[v].node_class = NodeClass::unresolved;
      } else if (frontier) {
        nodes[v].node_class = NodeClass::undetermined;
      } else {
        nodes[v].node_class = leaves ? NodeClass::transient : NodeClass::recurrent;
      }
    }
  }
}

}  // namespace

MixedStatePresentation build_msp(const HiddenMarkovProcess& process, std::size_t max_depth,
                                 double merge_tolerance, std::size_t max_nodes) {
  require_valid(process);
  if (!(merge_tolerance >= 0.0)) throw ValidationError("merge tolerance must be >= 0");
  if (merge_tolerance >= 0.5) {
    throw ValidationError("merge tolerance >= 0.5 would identify unrelated beliefs");
  }
  MixedStatePresentation msp;
  msp.merge_tolerance_ = merge_tolerance;
  msp.construction_depth_ = max_depth;
  msp.alphabet_ = process.alphabet();
  msp.state_count_ = process.state_count();

  auto& nodes = msp.nodes_;
  BeliefIndex index(process.state_count(), merge_tolerance);
  index.find_or_insert(process.initial());
  {
    MspNode origin{Belief::initial(process), 0, 0, {}, 0.0, {}, NodeClass::undetermined};
    origin.entropy = next_token_entropy(process, origin.belief);
    nodes.push_back(std::move(origin));
  }

  std::vector<std::size_t> frontier{0};
  std::size_t depth = 0;
  for (; depth < max_depth && !frontier.empty(); ++depth) {
    std::vector<std::size_t> next;
    for (const std::size_t id : frontier) {
      for (Token x = 0; x < process.alphabet_size(); ++x) {
        auto step = belief_update(process, nodes[id].belief, x);
        if (step.forbidden()) continue;
        auto [target, inserted] = index.find_or_insert(step.next->weights());
        if (inserted) {
          MspNode fresh{std::move(*step.next), depth + 1, next.size(), nodes[id].context, 0.0,
                        {}, NodeClass::undetermined};
          fresh.context.push_back(x);
          fresh.entropy = next_token_entropy(process, fresh.belief);
          nodes.push_back(std::move(fresh));
          next.push_back(target);
          if (nodes.size() > max_nodes) {
            throw CapabilityError("MSP exceeds " + std::to_string(max_nodes) + " nodes by depth " +
                                  std::to_string(depth + 1));
          }
        }
        nodes[id].edges.push_back({x, step.probability, target});
      }
    }
    if (next.empty()) {
      frontier.clear();
      break;
    }
    frontier = std::move(next);
  }

  std::vector<bool> unresolved(nodes.size(), false);
  if (frontier.empty()) {
    msp.closure_ = {true, nodes.back().depth};
  } else {
    msp.closure_ = {false, max_depth};
    for (auto id : frontier) unresolved[id] = true;
  }
  classify(nodes, unresolved);
  return msp;
}

MspWalker::MspWalker(const MixedStatePresentation& msp)
    : msp_(&msp), mass_(msp.size(), 0.0), scratch_(msp.size(), 0.0) {
  mass_[MixedStatePresentation::origin()] = 1.0;
}

void MspWalker::advance() {
  if (depth_ + 1 > msp_->valid_depth()) {
    throw CapabilityError("MSP is open at depth " + std::to_string(msp_->construction_depth()) +
                          "; cannot evaluate W^" + std::to_string(depth_ + 1) +
                          " (raise max_depth or use layered beliefs)");
  }
  std::fill(scratch_.begin(), scratch_.end(), 0.0);
  const auto& nodes = msp_->nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double m = mass_[i];
    if (m == 0.0) continue;
    for (const auto& e : nodes[i].edges) scratch_[e.target] += m * e.probability;
  }
  std::swap(mass_, scratch_);
  ++depth_;
}

double MspWalker::expected_entropy() const {
  const auto& nodes = msp_->nodes();
  double h = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (mass_[i] != 0.0) h += mass_[i] * nodes[i].entropy;
  }
  return h;
}

std::vector<double> operator_power_distribution(const MixedStatePresentation& msp,
                                                std::size_t ell) {
  if (ell > msp.valid_depth()) {
    throw CapabilityError("MSP is open at depth " + std::to_string(msp.construction_depth()) +
                          "; W^" + std::to_string(ell) + " is not exact");
  }
  MspWalker walker(msp);
  while (walker.depth() < ell) walker.advance();
  return walker.distribution();
}

EntropyDistribution next_token_entropy_distribution(const MixedStatePresentation& msp,
                                                    std::size_t ell) {
  const auto mass = operator_power_distribution(msp, ell);
  EntropyDistribution out;
  out.log_alphabet = std::log(static_cast<double>(msp.alphabet().size()));
  std::vector<EntropyAtom> raw;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] > 0.0) raw.push_back({mass[i], msp.node(i).entropy});
  }
  for (const auto& a : raw) out.mean += a.probability * a.entropy;
  for (const auto& a : raw) {
    const double d = a.entropy - out.mean;
    out.variance += a.probability * d * d;
  }
  std::sort(raw.begin(), raw.end(),
            [](const EntropyAtom& a, const EntropyAtom& b) { return a.entropy < b.entropy; });
  for (const auto& a : raw) {
    if (!out.atoms.empty() && std::abs(out.atoms.back().entropy - a.entropy) <= 1e-12) {
      out.atoms.back().probability += a.probability;
    } else {
      out.atoms.push_back(a);
    }
  }
  if (!out.variance_within_bound()) {
    throw std::logic_error("next-token entropy variance exceeds (log|X|)^2");
  }
  return out;
}

std::vector<std::size_t> support_at_depth(const MixedStatePresentation& msp, std::size_t ell) {
  const auto mass = operator_power_distribution(msp, ell);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] > 0.0) out.push_back(i);
  }
  return out;
}

HiddenMarkovProcess msp_as_hmm(const MixedStatePresentation& msp) {
  if (!msp.closed()) throw CapabilityError("only a closed MSP can be read back as an HMM");
  const auto n = static_cast<Eigen::Index>(msp.size());
  std::vector<Matrix> t(msp.alphabet().size(), Matrix::Zero(n, n));
  std::vector<std::string> states;
  for (std::size_t i = 0; i < msp.size(); ++i) {
    const auto& node = msp.node(i);
    states.push_back("n" + std::to_string(node.depth) + "_" + std::to_string(node.rank));
    for (const auto& e : node.edges) {
      t[e.token](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(e.target)) +=
          e.probability;
    }
  }
  RowVector init = RowVector::Zero(n);
  init(0) = 1.0;
  return HiddenMarkovProcess(msp.alphabet(), std::move(states), std::move(init), std::move(t));
}

}  // namespace myopic
