#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "myopic/entropy.hpp"
#include "myopic/losslog.hpp"
#include "myopic/sampler.hpp"

namespace myopic {

struct PositionComparison {
  std::size_t position = 0;
  double theory = 0.0;
  double empirical = 0.0;
  double sem = 0.0;
  double gap = 0.0;
  /// gap / sem; NaN when sem is 0 and the gap is not.
  double z = 0.0;
  /// Below the theory floor by more than 3 SEM.
  bool violation = false;
};

struct CheckpointComparison {
  std::int64_t step = 0;
  std::vector<PositionComparison> positions;
  double mean_gap = 0.0;
  double mean_abs_gap = 0.0;
  double max_abs_gap = 0.0;
  std::size_t violations = 0;
};

struct ComparisonReport {
  std::vector<CheckpointComparison> checkpoints;
  std::size_t total_violations = 0;
  /// Mean gap per checkpoint in step order, and whether it never rises.
  std::vector<double> trend;
  bool monotone_trend = true;
  std::size_t trend_increases = 0;
  std::string theory_kind;
  std::string theory_process;
};

/// A gap is flagged only when gap < -(3 sem + slack).
inline constexpr double kViolationSlack = 1e-12;

/// Both sides are nats (the log format enforces it). ValidationError when
/// the log reaches past the theory curve.
ComparisonReport compare_to_theory(const LossLog& log, const EntropyCurve& theory);
std::string comparison_json(const ComparisonReport& report);
/// position,theory,empirical,sem for one checkpoint.
std::string comparison_csv(const CheckpointComparison& checkpoint);

struct PhaseChangeOptions {
  std::size_t min_checkpoints = 20;
  double min_drop = 0.02;
  /// Second differences smaller than this are treated as flat.
  double min_curvature = 1e-9;
};

struct PhaseChange {
  bool detected = false;
  std::int64_t step_begin = 0;
  std::int64_t step_end = 0;
  double midpoint_step = 0.0;
  double pre_loss = 0.0;
  double post_loss = 0.0;
  double drop = 0.0;
  std::size_t position_begin = 0;
  std::size_t position_end = 0;
  std::size_t checkpoints = 0;
  /// Mean loss over the position range per checkpoint.
  std::vector<double> series;
};

/// The window runs from the most negative to the most positive second
/// difference (in checkpoint order) of the late-position mean loss. It is a
/// phase change when that window is ordered and the loss falls by at least
/// min_drop across it.
PhaseChange phase_change_detector(const LossLog& log, std::size_t position_begin,
                                  std::size_t position_end, const PhaseChangeOptions& options = {});
std::string phase_change_json(const PhaseChange& change);

/// Per-token model losses aligned to a dataset (BOS excluded).
struct TokenLosses {
  /// losses[i][t] for sequence i, stochastic token t (0-based).
  std::vector<std::vector<double>> losses;
};

/// JSONL rows {"sequence": i, "token_losses": [...]}.
TokenLosses parse_token_losses_jsonl(const std::string& text);
TokenLosses read_token_losses(const std::filesystem::path& path);
std::string token_losses_jsonl(const TokenLosses& losses);

/// -log Q(x_t | x_<t) under `process` for every token of the dataset.
TokenLosses theory_token_losses(const Dataset& dataset, const HiddenMarkovProcess& process);

struct NameBucket {
  std::size_t prior_names = 0;
  double mean_loss = 0.0;
  double sem = 0.0;
  std::size_t count = 0;
  double theory = 0.0;
};

struct NameConditionalLoss {
  std::vector<NameBucket> buckets;
  std::vector<std::string> names;
};

/// Buckets losses on name tokens by how many name tokens (either name)
/// occurred earlier in the same sequence. Theory reference: the entropy of
/// the component weights at bucket 0, and 0 afterwards.
NameConditionalLoss name_conditional_loss(
    const Dataset& dataset, const TokenLosses& predictions,
    const std::vector<std::string>& names = {"Wonka", "Dursley"},
    const std::vector<double>& component_weights = {0.5, 0.5});
std::string name_conditional_json(const NameConditionalLoss& table);

}  // namespace myopic
