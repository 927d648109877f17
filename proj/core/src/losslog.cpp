#include "myopic/losslog.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json_util.hpp"
#include "myopic/curve_io.hpp"
#include "myopic/errors.hpp"
#include "myopic/process_io.hpp"

namespace myopic {

using detail::ojson;

std::vector<std::int64_t> LossLog::steps() const {
  std::set<std::int64_t> s;
  for (const auto& r : rows) s.insert(r.step);
  return {s.begin(), s.end()};
}

std::map<std::size_t, LossRow> LossLog::checkpoint(std::int64_t step) const {
  std::map<std::size_t, LossRow> out;
  for (const auto& r : rows) {
    if (r.step == step) out[r.position] = r;
  }
  return out;
}

std::size_t LossLog::max_position() const {
  std::size_t m = 0;
  for (const auto& r : rows) m = std::max(m, r.position);
  return m;
}

void validate_losslog(const LossLog& log) {
  std::set<std::pair<std::int64_t, std::size_t>> seen;
  for (std::size_t i = 0; i < log.rows.size(); ++i) {
    const auto& r = log.rows[i];
    const std::string where = "loss row " + std::to_string(i + 1);
    if (!(r.mean_loss_nats >= 0.0) || !std::isfinite(r.mean_loss_nats)) {
      throw ValidationError(where + ": mean_loss_nats must be finite and >= 0");
    }
    if (!(r.sem >= 0.0) || !std::isfinite(r.sem)) {
      throw ValidationError(where + ": sem must be finite and >= 0");
    }
    if (r.count < 1) throw ValidationError(where + ": count must be >= 1");
    if (r.position < 1) throw ValidationError(where + ": positions start at 1");
    if (!seen.insert({r.step, r.position}).second) {
      throw ValidationError(where + ": duplicate (step " + std::to_string(r.step) +
                            ", position " + std::to_string(r.position) + ")");
    }
  }
}

LossLog parse_losslog_jsonl(const std::string& text) {
  LossLog log;
  std::size_t start = 0, line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "loss log line " + std::to_string(line_no);
    ojson row;
    try {
      row = ojson::parse(line);
    } catch (const std::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
    if (!row.is_object()) throw ValidationError(where + ": expected an object");
    if (row.contains("meta")) {
      const auto& meta = row["meta"];
      if (meta.contains("units") && meta["units"] != "nats") {
        throw ValidationError(where + ": loss logs are in nats, meta declares units " +
                              meta["units"].dump());
      }
      log.architecture = meta.value("architecture", "");
      log.metadata_json = meta.dump();
      continue;
    }
    try {
      LossRow r;
      r.step = row.at("step").get<std::int64_t>();
      const auto pos = row.at("position").get<std::int64_t>();
      const auto count = row.at("count").get<std::int64_t>();
      if (pos < 0 || count < 0) throw ValidationError(where + ": negative position or count");
      r.position = static_cast<std::size_t>(pos);
      r.count = static_cast<std::size_t>(count);
      r.mean_loss_nats = row.at("mean_loss_nats").get<double>();
      r.sem = row.at("sem").get<double>();
      log.rows.push_back(r);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  validate_losslog(log);
  return log;
}

LossLog read_losslog(const std::filesystem::path& path) {
  return parse_losslog_jsonl(read_text_file(path));
}

std::string losslog_jsonl(const LossLog& log) {
  std::string out;
  if (!log.metadata_json.empty()) {
    ojson meta;
    meta["meta"] = ojson::parse(log.metadata_json);
    out += meta.dump() + "\n";
  }
  for (const auto& r : log.rows) {
    out += "{\"step\":" + std::to_string(r.step) + ",\"position\":" + std::to_string(r.position) +
           ",\"mean_loss_nats\":" + format_double(r.mean_loss_nats) +
           ",\"sem\":" + format_double(r.sem) + ",\"count\":" + std::to_string(r.count) + "}\n";
  }
  return out;
}

}  // namespace myopic
