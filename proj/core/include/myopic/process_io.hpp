#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "myopic/process.hpp"

namespace myopic {

/// Process JSON:
///   {"alphabet": [..], "states": [..], "initial": [..],
///    "transitions": {"<token>": [[..], ..], ..}}
/// Mixture JSON:
///   {"components": [{"weight": w, "process": <object or path>}, ..]}
/// Relative component paths resolve against `base_dir`. Every loader
/// re-validates and throws ValidationError on violated invariants.
HiddenMarkovProcess parse_process_json(std::string_view text);
MixtureProcess parse_mixture_json(std::string_view text,
                                  const std::filesystem::path& base_dir = {});

HiddenMarkovProcess load_process(const std::filesystem::path& path);
MixtureProcess load_mixture(const std::filesystem::path& path);

/// Either document kind; `mixture` is set when the file has "components".
struct LoadedProcess {
  HiddenMarkovProcess process;
  std::optional<MixtureProcess> mixture;
};
LoadedProcess load_process_or_mixture(const std::filesystem::path& path);

std::string process_to_json(const HiddenMarkovProcess& process, int indent = 2);
std::string mixture_to_json(const MixtureProcess& mixture, int indent = 2);

/// Whole-file read; throws IoError.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace myopic
