#include "common.hpp"

#include <ctime>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace myopic::cli {

void add_process_options(CLI::App* app, ProcessArgs& args) {
  auto* name = app->add_option("--process", args.name, "zoo process name (see `list`)");
  auto* file = app->add_option("--process-file", args.file, "process or mixture JSON file");
  name->excludes(file);
  file->excludes(name);
  app->add_option("--p", args.p, "parameter p");
  app->add_option("--q", args.q, "parameter q");
  app->add_option("--w", args.w, "parameter w");
  app->add_option("--n", args.n, "parameter n (number of coins)");
  app->add_option("--param", args.params, "extra parameter as key=value")->take_all();
}

const ZooProcess& Selected::require_hmm() const {
  if (!zoo) throw CapabilityError("'" + name + "' has no finite HMM for this operation");
  return *zoo;
}

std::string Selected::generator_json() const {
  if (!zoo) return {};
  if (zoo->mixture) return mixture_to_json(*zoo->mixture);
  return process_to_json(zoo->process);
}

ojson Selected::describe() const {
  ojson out;
  out["name"] = name;
  ojson params = ojson::object();
  if (zoo) {
    for (const auto& [k, v] : zoo->descriptor.parameters) params[k] = v;
    out["markov_order"] = zoo->descriptor.markov_order.to_string();
    out["ergodic_components"] = zoo->descriptor.ergodic_components;
    if (!zoo->descriptor.notes.empty()) out["notes"] = zoo->descriptor.notes;
    ojson diag = ojson::object();
    for (const auto& [k, v] : zoo->descriptor.diagnostics) diag[k] = v;
    if (!diag.empty()) out["diagnostics"] = diag;
  } else {
    for (const auto& [k, v] : overrides) params[k] = v;
  }
  out["parameters"] = params;
  return out;
}

Selected resolve_process(const ProcessArgs& args) {
  if (args.name.empty() == args.file.empty()) {
    throw ValidationError("give exactly one of --process or --process-file");
  }
  Selected sel;
  auto set = [&](const char* key, const std::optional<double>& v) {
    if (v) sel.overrides[key] = *v;
  };
  set("p", args.p);
  set("q", args.q);
  set("w", args.w);
  set("n", args.n);
  for (const auto& kv : args.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ValidationError("--param expects key=value, got '" + kv + "'");
    }
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(kv.substr(eq + 1), &used);
      if (used != kv.size() - eq - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ValidationError("--param value in '" + kv + "' is not a number");
    }
    sel.overrides[kv.substr(0, eq)] = v;
  }

  if (!args.file.empty()) {
    if (!sel.overrides.empty()) {
      throw ValidationError("parameter flags apply to zoo processes, not --process-file");
    }
    const std::filesystem::path path(args.file);
    auto loaded = load_process_or_mixture(path);
    ProcessDescriptor d;
    d.name = path.stem().string();
    d.markov_order = MarkovOrder::unknown();
    d.ergodic_components = loaded.mixture ? loaded.mixture->size() : 1;
    d.notes.push_back("loaded from " + path.string());
    sel.name = d.name;
    sel.zoo = ZooProcess{std::move(d), std::move(loaded.process), std::move(loaded.mixture)};
    return sel;
  }

  sel.name = args.name;
  if (args.name == "ncoins-inf") {
    if (!sel.overrides.empty()) throw ValidationError("ncoins-inf takes no parameters");
    zoo_entry(args.name);
    sel.infinite_coins = true;
    return sel;
  }
  sel.zoo = build_zoo_process(args.name, sel.overrides);
  return sel;
}

std::pair<std::size_t, std::size_t> parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ValidationError("window must look like a:b");
  try {
    std::size_t u1 = 0, u2 = 0;
    const auto a = std::stoull(text.substr(0, colon), &u1);
    const auto b = std::stoull(text.substr(colon + 1), &u2);
    if (u1 != colon || u2 != text.size() - colon - 1) throw std::invalid_argument("junk");
    if (a > b) throw ValidationError("window start exceeds its end");
    return {a, b};
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception&) {
    throw ValidationError("window must look like a:b with integers, got '" + text + "'");
  }
}

Output::Output(std::string out_dir) {
  if (!out_dir.empty()) {
    dir_ = std::filesystem::path(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(*dir_, ec);
    if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
  }
}

void Output::primary(const std::string& filename, const std::string& content) {
  if (!dir_) {
    std::cout << content;
    std::cout.flush();
    return;
  }
  write_text_file(*dir_ / filename, content);
  files_.push_back(filename);
}

void Output::secondary(const std::string& filename, const std::string& content) {
  if (!dir_) return;
  write_text_file(*dir_ / filename, content);
  files_.push_back(filename);
}

namespace {

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

void write_manifest(const Output& out, const RunRecord& record) {
  if (!out.dir()) return;
  ojson m;
  m["subcommand"] = record.subcommand;
  m["argv"] = record.argv;
  m["parameters"] = record.parameters;
  m["inputs"] = record.inputs;
  m["outputs"] = out.files();
  if (record.seed) {
    m["seed"] = *record.seed;
  } else {
    m["seed"] = nullptr;
  }
  m["version"] = version();
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                     record.started_steady)
                           .count();
  m["wall_clock"] = {{"started_utc", utc_timestamp(record.started)},
                     {"elapsed_seconds", elapsed}};
  write_text_file(*out.dir() / "manifest.json", m.dump(2) + "\n");
}

}  // namespace myopic::cli
