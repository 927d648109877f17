#include "myopic/dataset_io.hpp"

#include <cstring>

#include "json_util.hpp"
#include "myopic/curve_io.hpp"
#include "myopic/errors.hpp"
#include "myopic/process_io.hpp"

namespace myopic {

using detail::ojson;

namespace {

template <typename T>
void put_le(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(const std::string& in, std::size_t at) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  }
  return static_cast<T>(v);
}

std::vector<std::string> numeric_alphabet(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

}  // namespace

std::string dataset_binary(const Dataset& dataset) {
  std::string out;
  out.reserve(32 + dataset.tokens.size() * 2);
  out += "MSPD";
  put_le<std::uint16_t>(out, kDatasetVersion);
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(dataset.alphabet.size()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dataset.row_width()));
  put_le<std::uint64_t>(out, dataset.size());
  put_le<std::uint32_t>(out, dataset.spec.bos ? kFlagBos : 0u);
  put_le<std::uint64_t>(out, 0);
  for (auto id : dataset.tokens) put_le<std::uint16_t>(out, id);
  return out;
}

std::string dataset_jsonl(const Dataset& dataset) {
  std::string out;
  const std::size_t w = dataset.row_width();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out += "{\"tokens\":[";
    for (std::size_t t = 0; t < w; ++t) {
      if (t) out += ',';
      out += std::to_string(dataset.tokens[i * w + t]);
    }
    out += "]}\n";
  }
  return out;
}

std::string dataset_meta_json(const Dataset& dataset, const std::string& process_json) {
  ojson spec;
  spec["process"] = dataset.spec.process_name;
  if (dataset.spec.descriptor) spec["descriptor"] = detail::descriptor_json(*dataset.spec.descriptor);
  spec["sequence_length"] = dataset.spec.sequence_length;
  spec["sequence_count"] = dataset.spec.sequence_count;
  spec["seed"] = dataset.spec.seed;
  spec["bos_enabled"] = dataset.spec.bos;
  ojson enc = ojson::object();
  for (const auto& [label, id] : dataset.encoding()) enc[label] = id;
  spec["token_encoding"] = enc;

  ojson out;
  out["format_version"] = kDatasetVersion;
  out["spec"] = spec;
  out["alphabet"] = dataset.alphabet;
  out["row_width"] = dataset.row_width();
  out["rng"] = "philox4x64-10; key {seed, 0}; counter {sequence, draw / 4, 0, 0}";
  out["theory_alignment"] = dataset.spec.bos
                                ? "column 0 is BOS; column t is theory position t"
                                : "column t - 1 is theory position t";
  if (!process_json.empty()) out["generator"] = ojson::parse(process_json);
  return out.dump(2) + "\n";
}

void write_dataset_binary(const Dataset& dataset, const std::filesystem::path& path) {
  write_text_file(path, dataset_binary(dataset));
}

void write_dataset_jsonl(const Dataset& dataset, const std::filesystem::path& path) {
  write_text_file(path, dataset_jsonl(dataset));
}

Dataset parse_dataset_binary(const std::string& bytes) {
  if (bytes.size() < 32 || bytes.compare(0, 4, "MSPD") != 0) {
    throw ValidationError("not an MSPD dataset (bad magic or short header)");
  }
  const auto version = get_le<std::uint16_t>(bytes, 4);
  if (version != kDatasetVersion) {
    throw ValidationError("unsupported dataset version " + std::to_string(version));
  }
  const auto nx = get_le<std::uint16_t>(bytes, 6);
  const auto width = get_le<std::uint32_t>(bytes, 8);
  const auto count = get_le<std::uint64_t>(bytes, 12);
  const auto flags = get_le<std::uint32_t>(bytes, 20);
  const bool bos = (flags & kFlagBos) != 0;
  if (width < (bos ? 2u : 1u)) throw ValidationError("dataset row width too small");
  const std::uint64_t expected = 32 + count * width * 2;
  if (bytes.size() != expected) {
    throw ValidationError("dataset payload has " + std::to_string(bytes.size()) +
                          " bytes, header implies " + std::to_string(expected));
  }
  Dataset out;
  out.spec.bos = bos;
  out.spec.sequence_length = width - (bos ? 1 : 0);
  out.spec.sequence_count = count;
  out.alphabet = numeric_alphabet(nx);
  out.tokens.resize(count * width);
  for (std::size_t i = 0; i < out.tokens.size(); ++i) {
    out.tokens[i] = get_le<std::uint16_t>(bytes, 32 + 2 * i);
  }
  out.components.assign(count, 0);
  return out;
}

Dataset read_dataset_binary(const std::filesystem::path& path) {
  return parse_dataset_binary(read_text_file(path));
}

Dataset parse_dataset_jsonl(const std::string& text, std::size_t alphabet_size, bool bos) {
  Dataset out;
  out.spec.bos = bos;
  out.alphabet = numeric_alphabet(alphabet_size);
  std::size_t width = 0, line_no = 0, start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ojson row;
    try {
      row = ojson::parse(line);
    } catch (const std::exception& e) {
      throw ValidationError("dataset line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!row.contains("tokens") || !row["tokens"].is_array()) {
      throw ValidationError("dataset line " + std::to_string(line_no) + " lacks a tokens array");
    }
    const auto& toks = row["tokens"];
    if (width == 0) width = toks.size();
    if (toks.size() != width || width == 0) {
      throw ValidationError("dataset line " + std::to_string(line_no) + " has " +
                            std::to_string(toks.size()) + " tokens, expected " +
                            std::to_string(width));
    }
    for (const auto& t : toks) {
      const auto v = t.get<std::int64_t>();
      if (v < 0 || v > 65535) throw ValidationError("token id out of 16-bit range");
      out.tokens.push_back(static_cast<std::uint16_t>(v));
    }
  }
  if (width == 0) throw ValidationError("dataset has no sequences");
  if (bos && width < 2) throw ValidationError("dataset rows hold only BOS");
  out.spec.sequence_length = width - (bos ? 1 : 0);
  out.spec.sequence_count = out.tokens.size() / width;
  out.components.assign(out.spec.sequence_count, 0);
  return out;
}

Dataset read_dataset(const std::filesystem::path& path) {
  const auto meta_path = path.parent_path() / "meta.json";
  std::optional<ojson> meta;
  if (std::filesystem::exists(meta_path)) {
    try {
      meta = ojson::parse(read_text_file(meta_path));
    } catch (const std::exception& e) {
      throw ValidationError("cannot parse " + meta_path.string() + ": " + e.what());
    }
  }
  Dataset out;
  if (path.extension() == ".jsonl") {
    if (!meta) throw ValidationError("JSONL dataset needs an adjacent meta.json");
    out = parse_dataset_jsonl(read_text_file(path), meta->at("alphabet").size(),
                              meta->at("spec").at("bos_enabled").get<bool>());
  } else {
    out = read_dataset_binary(path);
  }
  if (meta) {
    const auto alphabet = meta->at("alphabet").get<std::vector<std::string>>();
    if (alphabet.size() != out.alphabet.size()) {
      throw ValidationError("meta.json alphabet disagrees with the dataset header");
    }
    out.alphabet = alphabet;
    const auto& spec = meta->at("spec");
    out.spec.process_name = spec.value("process", "");
    out.spec.seed = spec.value("seed", std::uint64_t{0});
  }
  return out;
}

}  // namespace myopic
