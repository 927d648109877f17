#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "myopic/entropy.hpp"
#include "myopic/errors.hpp"
#include "myopic/process.hpp"
#include "myopic/zoo.hpp"

namespace myopic {

/// Tokens of a sampled sequence disagree with the reference process.
class DatasetMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

inline constexpr std::uint16_t kBosId = 0;

struct DatasetSpec {
  std::string process_name;
  std::optional<ProcessDescriptor> descriptor;
  /// Stochastic tokens per sequence; BOS is extra.
  std::size_t sequence_length = 100;
  std::size_t sequence_count = 1;
  std::uint64_t seed = 0;
  bool bos = true;
};

/// Generated tokens, row major, each row `row_width()` ids wide.
struct Dataset {
  DatasetSpec spec;
  std::vector<std::string> alphabet;
  std::vector<std::uint16_t> tokens;
  /// Component drawn for each sequence (0 for ergodic processes).
  std::vector<std::uint32_t> components;

  std::size_t row_width() const { return spec.sequence_length + (spec.bos ? 1 : 0); }
  std::size_t size() const { return spec.sequence_count; }
  /// Id of stochastic token t (0-based, BOS skipped) of sequence i.
  std::uint16_t id(std::size_t i, std::size_t t) const {
    return tokens[i * row_width() + (spec.bos ? 1 : 0) + t];
  }
  /// Alphabet index of stochastic token t.
  Token token(std::size_t i, std::size_t t) const { return id(i, t) - (spec.bos ? 1u : 0u); }
  /// label -> id, with "<bos>" -> 0 when enabled.
  std::vector<std::pair<std::string, std::uint16_t>> encoding() const;
};

/// Output depends only on (process, spec), never on `threads`.
Dataset sample_dataset(const HiddenMarkovProcess& process, const DatasetSpec& spec,
                       unsigned threads = 1);
/// Each sequence first draws its component by weight.
Dataset sample_dataset(const MixtureProcess& mixture, const DatasetSpec& spec,
                       unsigned threads = 1);
Dataset sample_dataset(const ZooProcess& process, DatasetSpec spec, unsigned threads = 1);

struct PluginEstimate {
  /// Means per position 1..L, band = mean -/+ SEM when defined.
  EntropyCurve curve;
  std::vector<double> sem;
  std::vector<double> stddev;
  std::size_t sequences = 0;
  /// False for a single sequence; SEM entries are then NaN.
  bool sem_defined = false;
};

/// Average over sampled contexts of H[X | belief(context)] at each position.
/// DatasetMismatch when a token is forbidden under `process` or out of range.
PluginEstimate plugin_entropy_estimate(const Dataset& dataset, const HiddenMarkovProcess& process,
                                       std::optional<std::size_t> max_position = std::nullopt);

}  // namespace myopic
