#include "myopic/curve_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json_util.hpp"
#include "myopic/errors.hpp"

namespace myopic {

using detail::ojson;

const char* to_string(Units u) { return u == Units::bits ? "bits" : "nats"; }

Units parse_units(std::string_view text) {
  if (text == "nats") return Units::nats;
  if (text == "bits") return Units::bits;
  throw ValidationError("unknown units '" + std::string(text) + "' (expected nats or bits)");
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

std::string table_csv(const std::vector<double>& values, const std::vector<double>& lower,
                      const std::vector<double>& upper, std::size_t first_position, Units units) {
  const bool band = !lower.empty() && lower.size() == values.size() &&
                    upper.size() == values.size();
  std::string out = "position,value_";
  out += to_string(units);
  if (band) out += ",lower,upper";
  out += '\n';
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += std::to_string(first_position + i);
    out += ',';
    out += format_double(in_units(values[i], units));
    if (band) {
      out += ',';
      out += format_double(in_units(lower[i], units));
      out += ',';
      out += format_double(in_units(upper[i], units));
    }
    out += '\n';
  }
  return out;
}

ojson asymptote_json(const std::optional<CurveAsymptote>& a, Units units) {
  if (!a) return nullptr;
  ojson out;
  out["value"] = detail::number_or_null(in_units(a->value, units));
  out["lower"] = detail::number_or_null(in_units(a->lower, units));
  out["upper"] = detail::number_or_null(in_units(a->upper, units));
  out["method"] = a->method;
  return out;
}

}  // namespace

std::string curve_csv(const EntropyCurve& curve, Units units) {
  return table_csv(curve.values, curve.lower, curve.upper, 1, units);
}

std::string curve_csv(const ComponentLossCurve& curve, Units units) {
  std::vector<double> lower, upper;
  if (!curve.error_estimate.empty()) {
    for (std::size_t i = 0; i < curve.values.size(); ++i) {
      lower.push_back(curve.values[i] - curve.error_estimate[i]);
      upper.push_back(curve.values[i] + curve.error_estimate[i]);
    }
  }
  return table_csv(curve.values, lower, upper, 0, units);
}

std::string curve_metadata_json(const EntropyCurve& curve, Units units) {
  ojson out;
  out["kind"] = to_string(curve.kind);
  out["process"] = curve.process_name;
  if (curve.descriptor) out["descriptor"] = detail::descriptor_json(*curve.descriptor);
  out["method"] = curve.method;
  out["merge_tolerance"] = curve.merge_tolerance;
  out["units"] = to_string(units);
  out["position_convention"] = "position l predicts token l from the l-1 preceding tokens";
  out["positions"] = curve.values.size();
  out["stationary_start"] = curve.stationary_start;
  out["alphabet_size"] = curve.alphabet_size;
  out["asymptote"] = asymptote_json(curve.asymptote, units);
  return out.dump(2) + "\n";
}

std::string curve_metadata_json(const ComponentLossCurve& curve, Units units) {
  ojson out;
  out["kind"] = "in_context_loss";
  out["process"] = curve.process_name;
  if (curve.component) {
    out["component"] = *curve.component;
  } else {
    out["component"] = nullptr;
  }
  out["provenance"] = to_string(curve.provenance);
  out["units"] = to_string(units);
  out["position_convention"] = "position l is the context length; 0 is the prior predictive loss";
  out["positions"] = curve.values.size();
  out["asymptote"] = asymptote_json(curve.asymptote, units);
  out["warnings"] = curve.warnings;
  return out.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw IoError("write to '" + path.string() + "' failed");
}

void write_curve(const EntropyCurve& curve, const std::filesystem::path& stem, Units units) {
  auto csv = stem;
  csv += ".csv";
  auto meta = stem;
  meta += ".json";
  write_text_file(csv, curve_csv(curve, units));
  write_text_file(meta, curve_metadata_json(curve, units));
}

void write_curve(const ComponentLossCurve& curve, const std::filesystem::path& stem,
                 Units units) {
  auto csv = stem;
  csv += ".csv";
  auto meta = stem;
  meta += ".json";
  write_text_file(csv, curve_csv(curve, units));
  write_text_file(meta, curve_metadata_json(curve, units));
}

}  // namespace myopic
