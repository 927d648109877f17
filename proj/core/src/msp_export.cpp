#include "myopic/msp_export.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "myopic/errors.hpp"

namespace myopic {

GraphFormat parse_graph_format(std::string_view name) {
  if (name == "dot") return GraphFormat::dot;
  if (name == "json") return GraphFormat::json;
  throw ValidationError("unknown graph format '" + std::string(name) + "' (expected dot|json)");
}

std::string node_id(const MspNode& node) {
  return "n" + std::to_string(node.depth) + "_" + std::to_string(node.rank);
}

std::string context_label(const MixedStatePresentation& msp, const MspNode& node) {
  if (node.context.empty()) return "∅";
  bool single_chars = true;
  for (const auto& a : msp.alphabet()) single_chars = single_chars && a.size() == 1;
  std::string out;
  for (std::size_t i = 0; i < node.context.size(); ++i) {
    if (i && !single_chars) out += ' ';
    out += msp.alphabet()[node.context[i]];
  }
  return out;
}

namespace {

std::string prob_text(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", p);
  return buf;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

const char* fill_colour(NodeClass c) {
  switch (c) {
    case NodeClass::transient:
      return "#9bd39b";
    case NodeClass::recurrent:
      return "#b89bd9";
    case NodeClass::unresolved:
      return "#d0d0d0";
    case NodeClass::undetermined:
      break;
  }
  return "#ffffff";
}

std::string to_dot(const MixedStatePresentation& msp) {
  std::ostringstream os;
  os << "digraph msp {\n";
  os << "  rankdir=LR;\n";
  os << "  node [shape=circle, style=filled, fontname=\"Helvetica\"];\n";
  os << "  // closure: " << (msp.closed() ? "closed" : "open") << " at depth "
     << msp.closure().depth << "\n";
  for (const auto& node : msp.nodes()) {
    std::string label = dot_escape(context_label(msp, node));
    os << "  " << node_id(node) << " [label=\"" << label;
    if (node.node_class == NodeClass::unresolved) os << "\\n(unresolved)";
    os << "\", fillcolor=\"" << fill_colour(node.node_class) << "\"";
    if (&node == &msp.nodes().front()) os << ", shape=doublecircle";
    if (node.node_class == NodeClass::unresolved) os << ", style=\"filled,dashed\"";
    os << ", class=\"" << to_string(node.node_class) << "\"];\n";
  }
  for (const auto& node : msp.nodes()) {
    for (const auto& e : node.edges) {
      os << "  " << node_id(node) << " -> " << node_id(msp.node(e.target)) << " [label=\""
         << dot_escape(msp.alphabet()[e.token]) << ": " << prob_text(e.probability)
         << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string to_json(const MixedStatePresentation& msp) {
  nlohmann::ordered_json doc;
  doc["alphabet"] = msp.alphabet();
  doc["origin"] = node_id(msp.node(MixedStatePresentation::origin()));
  doc["closure"] = {{"closed", msp.closed()}, {"depth", msp.closure().depth}};
  doc["construction_depth"] = msp.construction_depth();
  doc["merge_tolerance"] = msp.merge_tolerance();
  auto nodes = nlohmann::ordered_json::array();
  auto edges = nlohmann::ordered_json::array();
  for (const auto& node : msp.nodes()) {
    nlohmann::ordered_json n;
    n["id"] = node_id(node);
    n["depth"] = node.depth;
    n["rank"] = node.rank;
    std::vector<std::string> ctx;
    for (auto x : node.context) ctx.push_back(msp.alphabet()[x]);
    n["context"] = ctx;
    const auto& w = node.belief.weights();
    n["belief"] = std::vector<double>(w.data(), w.data() + w.size());
    n["entropy_nats"] = node.entropy;
    n["class"] = to_string(node.node_class);
    nodes.push_back(std::move(n));
    for (const auto& e : node.edges) {
      edges.push_back({{"source", node_id(node)},
                       {"token", msp.alphabet()[e.token]},
                       {"probability", e.probability},
                       {"target", node_id(msp.node(e.target))}});
    }
  }
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  return doc.dump(2) + "\n";
}

}  // namespace

std::string export_msp_graph(const MixedStatePresentation& msp, GraphFormat format) {
  return format == GraphFormat::dot ? to_dot(msp) : to_json(msp);
}

}  // namespace myopic
