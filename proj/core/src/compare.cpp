#include "myopic/compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "json_util.hpp"
#include "myopic/curve_io.hpp"
#include "myopic/errors.hpp"
#include "myopic/numeric.hpp"
#include "myopic/process_io.hpp"

namespace myopic {

using detail::number_or_null;
using detail::ojson;

ComparisonReport compare_to_theory(const LossLog& log, const EntropyCurve& theory) {
  validate_losslog(log);
  if (log.rows.empty()) throw ValidationError("loss log has no rows");
  if (log.max_position() > theory.length()) {
    throw ValidationError("loss log reaches position " + std::to_string(log.max_position()) +
                          " but the theory curve has length " + std::to_string(theory.length()));
  }
  ComparisonReport report;
  report.theory_kind = to_string(theory.kind);
  report.theory_process = theory.process_name;
  for (const auto step : log.steps()) {
    CheckpointComparison cp;
    cp.step = step;
    std::vector<double> gaps, abs_gaps;
    for (const auto& [pos, row] : log.checkpoint(step)) {
      PositionComparison pc;
      pc.position = pos;
      pc.theory = theory.at(pos);
      pc.empirical = row.mean_loss_nats;
      pc.sem = row.sem;
      pc.gap = pc.empirical - pc.theory;
      if (pc.sem > 0.0) {
        pc.z = pc.gap / pc.sem;
      } else {
        pc.z = pc.gap == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
      }
      pc.violation = pc.gap < -(3.0 * pc.sem + kViolationSlack);
      cp.violations += pc.violation ? 1 : 0;
      cp.max_abs_gap = std::max(cp.max_abs_gap, std::abs(pc.gap));
      gaps.push_back(pc.gap);
      abs_gaps.push_back(std::abs(pc.gap));
      cp.positions.push_back(pc);
    }
    const auto n = static_cast<double>(gaps.size());
    cp.mean_gap = pairwise_sum(gaps) / n;
    cp.mean_abs_gap = pairwise_sum(abs_gaps) / n;
    report.total_violations += cp.violations;
    report.trend.push_back(cp.mean_gap);
    report.checkpoints.push_back(std::move(cp));
  }
  for (std::size_t i = 1; i < report.trend.size(); ++i) {
    if (report.trend[i] > report.trend[i - 1]) ++report.trend_increases;
  }
  report.monotone_trend = report.trend_increases == 0;
  return report;
}

std::string comparison_json(const ComparisonReport& report) {
  ojson out;
  out["theory_kind"] = report.theory_kind;
  out["theory_process"] = report.theory_process;
  out["units"] = "nats";
  out["total_violations"] = report.total_violations;
  out["violation_rule"] = "empirical - theory < -(3 sem + 1e-12)";
  ojson trend;
  trend["mean_gap_by_checkpoint"] = ojson::array();
  for (double g : report.trend) trend["mean_gap_by_checkpoint"].push_back(g);
  trend["monotone_non_increasing"] = report.monotone_trend;
  trend["increases"] = report.trend_increases;
  out["trend"] = trend;
  out["checkpoints"] = ojson::array();
  for (const auto& cp : report.checkpoints) {
    ojson c;
    c["step"] = cp.step;
    c["mean_gap"] = cp.mean_gap;
    c["mean_abs_gap"] = cp.mean_abs_gap;
    c["max_abs_gap"] = cp.max_abs_gap;
    c["violations"] = cp.violations;
    c["positions"] = ojson::array();
    for (const auto& pc : cp.positions) {
      ojson p;
      p["position"] = pc.position;
      p["theory"] = pc.theory;
      p["empirical"] = pc.empirical;
      p["sem"] = pc.sem;
      p["gap"] = pc.gap;
      p["z"] = number_or_null(pc.z);
      p["violation"] = pc.violation;
      c["positions"].push_back(p);
    }
    out["checkpoints"].push_back(c);
  }
  return out.dump(2) + "\n";
}

std::string comparison_csv(const CheckpointComparison& checkpoint) {
  std::string out = "position,theory,empirical,sem\n";
  for (const auto& pc : checkpoint.positions) {
    out += std::to_string(pc.position) + ',' + format_double(pc.theory) + ',' +
           format_double(pc.empirical) + ',' + format_double(pc.sem) + '\n';
  }
  return out;
}

PhaseChange phase_change_detector(const LossLog& log, std::size_t position_begin,
                                  std::size_t position_end, const PhaseChangeOptions& options) {
  validate_losslog(log);
  if (position_begin < 1 || position_begin > position_end) {
    throw ValidationError("phase-change position range must satisfy 1 <= begin <= end");
  }
  const auto steps = log.steps();
  if (steps.size() < options.min_checkpoints) {
    throw ValidationError("phase-change detection needs at least " +
                          std::to_string(options.min_checkpoints) + " checkpoints, log has " +
                          std::to_string(steps.size()));
  }
  PhaseChange out;
  out.position_begin = position_begin;
  out.position_end = position_end;
  out.checkpoints = steps.size();
  for (const auto step : steps) {
    std::vector<double> v;
    for (const auto& [pos, row] : log.checkpoint(step)) {
      if (pos >= position_begin && pos <= position_end) v.push_back(row.mean_loss_nats);
    }
    if (v.empty()) {
      throw ValidationError("checkpoint " + std::to_string(step) +
                            " has no rows in the position range");
    }
    out.series.push_back(pairwise_sum(v) / static_cast<double>(v.size()));
  }
  const auto& y = out.series;
  std::size_t lo = 1, hi = 1;
  double d2_min = std::numeric_limits<double>::infinity();
  double d2_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    const double d2 = y[i + 1] - 2.0 * y[i] + y[i - 1];
    if (d2 < d2_min) {
      d2_min = d2;
      lo = i;
    }
    if (d2 > d2_max) {
      d2_max = d2;
      hi = i;
    }
  }
  out.step_begin = steps[lo];
  out.step_end = steps[hi];
  out.midpoint_step = 0.5 * (static_cast<double>(steps[lo]) + static_cast<double>(steps[hi]));
  out.pre_loss = y[lo];
  out.post_loss = y[hi];
  out.drop = y[lo] - y[hi];
  out.detected = lo < hi && d2_min < -options.min_curvature && d2_max > options.min_curvature &&
                 out.drop >= options.min_drop;
  return out;
}

std::string phase_change_json(const PhaseChange& change) {
  ojson out;
  out["detected"] = change.detected;
  out["step_begin"] = change.step_begin;
  out["step_end"] = change.step_end;
  out["midpoint_step"] = change.midpoint_step;
  out["pre_loss"] = change.pre_loss;
  out["post_loss"] = change.post_loss;
  out["drop"] = change.drop;
  out["position_begin"] = change.position_begin;
  out["position_end"] = change.position_end;
  out["checkpoints"] = change.checkpoints;
  out["series"] = change.series;
  return out.dump(2) + "\n";
}

TokenLosses parse_token_losses_jsonl(const std::string& text) {
  std::map<std::size_t, std::vector<double>> rows;
  std::size_t start = 0, line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "prediction line " + std::to_string(line_no);
    try {
      const auto row = ojson::parse(line);
      const auto seq = row.at("sequence").get<std::int64_t>();
      if (seq < 0) throw ValidationError(where + ": negative sequence index");
      auto losses = row.at("token_losses").get<std::vector<double>>();
      if (!rows.emplace(static_cast<std::size_t>(seq), std::move(losses)).second) {
        throw ValidationError(where + ": duplicate sequence " + std::to_string(seq));
      }
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  TokenLosses out;
  std::size_t expect = 0;
  for (auto& [seq, losses] : rows) {
    if (seq != expect++) throw ValidationError("prediction log skips sequence " + std::to_string(expect - 1));
    out.losses.push_back(std::move(losses));
  }
  return out;
}

TokenLosses read_token_losses(const std::filesystem::path& path) {
  return parse_token_losses_jsonl(read_text_file(path));
}

std::string token_losses_jsonl(const TokenLosses& losses) {
  std::string out;
  for (std::size_t i = 0; i < losses.losses.size(); ++i) {
    out += "{\"sequence\":" + std::to_string(i) + ",\"token_losses\":[";
    for (std::size_t t = 0; t < losses.losses[i].size(); ++t) {
      if (t) out += ',';
      out += format_double(losses.losses[i][t]);
    }
    out += "]}\n";
  }
  return out;
}

TokenLosses theory_token_losses(const Dataset& dataset, const HiddenMarkovProcess& process) {
  if (dataset.alphabet.size() != process.alphabet_size()) {
    throw DatasetMismatch("dataset and process alphabets differ in size");
  }
  TokenLosses out;
  out.losses.resize(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    Belief belief = Belief::initial(process);
    auto& row = out.losses[i];
    for (std::size_t t = 0; t < dataset.spec.sequence_length; ++t) {
      const Token x = dataset.token(i, t);
      if (x >= process.alphabet_size()) throw DatasetMismatch("token id outside the alphabet");
      auto step = belief_update(process, belief, x);
      if (step.forbidden()) {
        throw DatasetMismatch("sequence " + std::to_string(i) + " position " +
                              std::to_string(t + 1) + " is forbidden by the process");
      }
      row.push_back(-std::log(step.probability));
      belief = std::move(*step.next);
    }
  }
  return out;
}

NameConditionalLoss name_conditional_loss(const Dataset& dataset, const TokenLosses& predictions,
                                          const std::vector<std::string>& names,
                                          const std::vector<double>& component_weights) {
  std::vector<bool> is_name(dataset.alphabet.size(), false);
  bool any_label = false;
  for (const auto& n : names) {
    auto it = std::find(dataset.alphabet.begin(), dataset.alphabet.end(), n);
    if (it != dataset.alphabet.end()) {
      is_name[static_cast<std::size_t>(it - dataset.alphabet.begin())] = true;
      any_label = true;
    }
  }
  if (!any_label) throw ValidationError("dataset alphabet contains none of the name tokens");
  if (predictions.losses.size() != dataset.size()) {
    throw ValidationError("prediction log has " + std::to_string(predictions.losses.size()) +
                          " sequences, dataset has " + std::to_string(dataset.size()));
  }
  std::map<std::size_t, std::vector<double>> losses;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (predictions.losses[i].size() != dataset.spec.sequence_length) {
      throw ValidationError("sequence " + std::to_string(i) + " has " +
                            std::to_string(predictions.losses[i].size()) +
                            " token losses, expected " +
                            std::to_string(dataset.spec.sequence_length));
    }
    std::size_t seen = 0;
    for (std::size_t t = 0; t < dataset.spec.sequence_length; ++t) {
      const Token x = dataset.token(i, t);
      if (x < is_name.size() && is_name[x]) {
        losses[seen].push_back(predictions.losses[i][t]);
        ++seen;
      }
    }
  }
  if (losses.empty()) throw ValidationError("dataset contains no name tokens");
  const double prior = shannon_entropy(component_weights);
  NameConditionalLoss out;
  out.names = names;
  for (const auto& [bucket, v] : losses) {
    NameBucket b;
    b.prior_names = bucket;
    b.count = v.size();
    b.mean_loss = pairwise_sum(v) / static_cast<double>(v.size());
    if (v.size() > 1) {
      double ss = 0.0;
      for (double l : v) ss += (l - b.mean_loss) * (l - b.mean_loss);
      b.sem = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    } else {
      b.sem = std::numeric_limits<double>::quiet_NaN();
    }
    b.theory = bucket == 0 ? prior : 0.0;
    out.buckets.push_back(b);
  }
  return out;
}

std::string name_conditional_json(const NameConditionalLoss& table) {
  ojson out;
  out["names"] = table.names;
  out["units"] = "nats";
  out["buckets"] = ojson::array();
  for (const auto& b : table.buckets) {
    ojson row;
    row["prior_names"] = b.prior_names;
    row["mean_loss"] = b.mean_loss;
    row["sem"] = number_or_null(b.sem);
    row["count"] = b.count;
    row["theory"] = b.theory;
    out["buckets"].push_back(row);
  }
  return out.dump(2) + "\n";
}

}  // namespace myopic
