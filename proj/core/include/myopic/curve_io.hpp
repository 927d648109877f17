#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "myopic/entropy.hpp"
#include "myopic/numeric.hpp"
#include "myopic/nonergodic.hpp"

namespace myopic {

/// Presentation units; everything is computed in nats.
enum class Units { nats, bits };
const char* to_string(Units u);
Units parse_units(std::string_view text);
inline double in_units(double nats, Units u) { return u == Units::bits ? nats_to_bits(nats) : nats; }

/// `position,value_nats[,lower,upper]`; 1-based positions.
std::string curve_csv(const EntropyCurve& curve, Units units = Units::nats);
/// Same columns; positions are context lengths starting at 0.
std::string curve_csv(const ComponentLossCurve& curve, Units units = Units::nats);

std::string curve_metadata_json(const EntropyCurve& curve, Units units = Units::nats);
std::string curve_metadata_json(const ComponentLossCurve& curve, Units units = Units::nats);

/// Writes <stem>.csv and <stem>.json.
void write_curve(const EntropyCurve& curve, const std::filesystem::path& stem,
                 Units units = Units::nats);
void write_curve(const ComponentLossCurve& curve, const std::filesystem::path& stem,
                 Units units = Units::nats);

/// Writes `text` to `path`, creating parent directories. IoError on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Shortest round-trip decimal form.
std::string format_double(double value);

}  // namespace myopic
