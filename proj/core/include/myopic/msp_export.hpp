#pragma once

#include <string>
#include <string_view>

#include "myopic/msp.hpp"

namespace myopic {

enum class GraphFormat { dot, json };

/// Throws ValidationError for anything but "dot" or "json".
GraphFormat parse_graph_format(std::string_view name);

/// Stable node ids n<depth>_<rank>; nodes labeled by their shortest context.
/// Transient nodes are green, recurrent purple, frontier nodes of an open
/// MSP gray and marked "unresolved". Output is a pure function of the MSP.
std::string export_msp_graph(const MixedStatePresentation& msp, GraphFormat format);

std::string node_id(const MspNode& node);
std::string context_label(const MixedStatePresentation& msp, const MspNode& node);

}  // namespace myopic
