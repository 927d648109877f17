#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace myopic {

struct LossRow {
  std::int64_t step = 0;
  std::size_t position = 0;
  double mean_loss_nats = 0.0;
  double sem = 0.0;
  std::size_t count = 1;
};

/// Per-position loss estimates of an external model, possibly at several
/// training checkpoints.
///
/// JSONL: one row object per line; an optional line {"meta": {...}} carries
/// model metadata ("architecture", "units", free-form parameters).
struct LossLog {
  std::vector<LossRow> rows;
  std::string architecture;
  /// The raw "meta" object, serialized; empty when absent.
  std::string metadata_json;

  /// Distinct steps, ascending.
  std::vector<std::int64_t> steps() const;
  /// Rows of one checkpoint keyed by position.
  std::map<std::size_t, LossRow> checkpoint(std::int64_t step) const;
  std::size_t max_position() const;
};

/// Throws ValidationError on a malformed line, a negative loss or SEM, a
/// zero count, position 0, duplicate (step, position) pairs, or a "units"
/// other than nats.
LossLog parse_losslog_jsonl(const std::string& text);
LossLog read_losslog(const std::filesystem::path& path);
std::string losslog_jsonl(const LossLog& log);
void validate_losslog(const LossLog& log);

}  // namespace myopic
