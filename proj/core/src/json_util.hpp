#pragma once

#include <cmath>

#include <json.hpp>

#include "myopic/zoo.hpp"

namespace myopic::detail {

using ojson = nlohmann::ordered_json;

inline ojson named_values_json(const NamedValues& values) {
  ojson out = ojson::object();
  for (const auto& [k, v] : values) out[k] = v;
  return out;
}

inline ojson descriptor_json(const ProcessDescriptor& d) {
  ojson out;
  out["name"] = d.name;
  out["parameters"] = named_values_json(d.parameters);
  out["markov_order"] = d.markov_order.to_string();
  out["ergodic_components"] = d.ergodic_components;
  if (!d.diagnostics.empty()) out["diagnostics"] = named_values_json(d.diagnostics);
  if (!d.notes.empty()) out["notes"] = d.notes;
  return out;
}

/// NaN and infinities have no JSON form; they are written as null.
inline ojson number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace myopic::detail
