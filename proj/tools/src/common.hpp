#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <myopic/myopic.hpp>

namespace myopic::cli {

using ojson = nlohmann::ordered_json;

struct ProcessArgs {
  std::string name;
  std::string file;
  std::optional<double> p, q, w, n;
  std::vector<std::string> params;
};

void add_process_options(CLI::App* app, ProcessArgs& args);

/// A resolved process: a zoo entry, a JSON file, or the analytic
/// infinite-coin family (no HMM).
struct Selected {
  std::string name;
  ParameterMap overrides;
  std::optional<ZooProcess> zoo;
  bool infinite_coins = false;

  const ZooProcess& require_hmm() const;
  /// JSON of the generator (process or mixture), for sidecars.
  std::string generator_json() const;
  ojson describe() const;
};

Selected resolve_process(const ProcessArgs& args);

/// "a:b" -> (a, b).
std::pair<std::size_t, std::size_t> parse_window(const std::string& text);

/// Collects output files. Without a directory, only the primary payload is
/// written, to stdout.
class Output {
 public:
  explicit Output(std::string out_dir);

  bool to_directory() const { return dir_.has_value(); }
  void primary(const std::string& filename, const std::string& content);
  /// Skipped when writing to stdout.
  void secondary(const std::string& filename, const std::string& content);

  const std::vector<std::string>& files() const { return files_; }
  const std::optional<std::filesystem::path>& dir() const { return dir_; }

 private:
  std::optional<std::filesystem::path> dir_;
  std::vector<std::string> files_;
};

/// Everything a subcommand reports into manifest.json.
struct RunRecord {
  std::string subcommand;
  std::vector<std::string> argv;
  ojson parameters = ojson::object();
  std::vector<std::string> inputs;
  std::optional<std::uint64_t> seed;
  std::chrono::system_clock::time_point started = std::chrono::system_clock::now();
  std::chrono::steady_clock::time_point started_steady = std::chrono::steady_clock::now();
};

void write_manifest(const Output& out, const RunRecord& record);

}  // namespace myopic::cli
