#include "myopic/process_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "myopic/errors.hpp"

namespace myopic {

using nlohmann::json;

namespace {

json parse_document(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
}

template <typename T>
T require_field(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw ValidationError(std::string("missing field '") + key + "'");
  }
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("field '") + key + "': " + e.what());
  }
}

HiddenMarkovProcess process_from_json(const json& doc) {
  auto alphabet = require_field<std::vector<std::string>>(doc, "alphabet");
  auto states = require_field<std::vector<std::string>>(doc, "states");
  auto initial = require_field<std::vector<double>>(doc, "initial");
  if (!doc.contains("transitions") || !doc["transitions"].is_object()) {
    throw ValidationError("field 'transitions' must be an object keyed by token");
  }
  const json& trans = doc["transitions"];
  if (trans.size() != alphabet.size()) {
    throw ValidationError("'transitions' has " + std::to_string(trans.size()) +
                          " entries for an alphabet of " + std::to_string(alphabet.size()));
  }
  const auto n = static_cast<Eigen::Index>(states.size());
  std::vector<Matrix> matrices;
  for (const auto& token : alphabet) {
    if (!trans.contains(token)) {
      throw ValidationError("no transition matrix for token '" + token + "'");
    }
    std::vector<std::vector<double>> rows;
    try {
      rows = trans.at(token).get<std::vector<std::vector<double>>>();
    } catch (const json::exception& e) {
      throw ValidationError("transition matrix for '" + token + "': " + e.what());
    }
    if (static_cast<Eigen::Index>(rows.size()) != n) {
      throw ValidationError("transition matrix for '" + token + "' has wrong row count");
    }
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = rows[static_cast<std::size_t>(i)];
      if (static_cast<Eigen::Index>(row.size()) != n) {
        throw ValidationError("transition matrix for '" + token + "' has a ragged row");
      }
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
    }
    matrices.push_back(std::move(m));
  }
  RowVector init(static_cast<Eigen::Index>(initial.size()));
  for (std::size_t i = 0; i < initial.size(); ++i) init(static_cast<Eigen::Index>(i)) = initial[i];
  HiddenMarkovProcess process(std::move(alphabet), std::move(states), std::move(init),
                              std::move(matrices));
  require_valid(process);
  return process;
}

json process_to_document(const HiddenMarkovProcess& process) {
  json doc;
  doc["alphabet"] = process.alphabet();
  doc["states"] = process.states();
  std::vector<double> init(process.initial().data(),
                           process.initial().data() + process.initial().size());
  doc["initial"] = init;
  json trans = json::object();
  for (Token x = 0; x < process.alphabet_size(); ++x) {
    const Matrix& t = process.transition(x);
    json rows = json::array();
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < t.cols(); ++j) row.push_back(t(i, j));
      rows.push_back(std::move(row));
    }
    trans[process.alphabet()[x]] = std::move(rows);
  }
  doc["transitions"] = std::move(trans);
  return doc;
}

MixtureProcess mixture_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object() || !doc.contains("components") || !doc["components"].is_array()) {
    throw ValidationError("mixture document needs a 'components' array");
  }
  std::vector<MixtureComponent> components;
  for (const auto& entry : doc["components"]) {
    const auto weight = require_field<double>(entry, "weight");
    if (!entry.contains("process")) throw ValidationError("mixture component lacks 'process'");
    const json& p = entry["process"];
    if (p.is_string()) {
      std::filesystem::path path = p.get<std::string>();
      if (path.is_relative()) path = base_dir / path;
      components.push_back({weight, load_process(path)});
    } else {
      components.push_back({weight, process_from_json(p)});
    }
  }
  MixtureProcess mixture(std::move(components));
  require_valid(mixture);
  return mixture;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

HiddenMarkovProcess parse_process_json(std::string_view text) {
  return process_from_json(parse_document(text));
}

MixtureProcess parse_mixture_json(std::string_view text,
                                  const std::filesystem::path& base_dir) {
  return mixture_from_json(parse_document(text), base_dir);
}

HiddenMarkovProcess load_process(const std::filesystem::path& path) {
  return parse_process_json(read_text_file(path));
}

MixtureProcess load_mixture(const std::filesystem::path& path) {
  return parse_mixture_json(read_text_file(path), path.parent_path());
}

LoadedProcess load_process_or_mixture(const std::filesystem::path& path) {
  const json doc = parse_document(read_text_file(path));
  if (doc.is_object() && doc.contains("components")) {
    auto mixture = mixture_from_json(doc, path.parent_path());
    auto hmm = mixture_as_hmm(mixture);
    return LoadedProcess{std::move(hmm), std::move(mixture)};
  }
  return LoadedProcess{process_from_json(doc), std::nullopt};
}

std::string process_to_json(const HiddenMarkovProcess& process, int indent) {
  return process_to_document(process).dump(indent);
}

std::string mixture_to_json(const MixtureProcess& mixture, int indent) {
  json doc;
  doc["components"] = json::array();
  for (const auto& comp : mixture.components()) {
    doc["components"].push_back({{"weight", comp.weight},
                                 {"process", process_to_document(comp.process)}});
  }
  return doc.dump(indent);
}

}  // namespace myopic
