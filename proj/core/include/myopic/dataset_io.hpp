#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "myopic/sampler.hpp"

namespace myopic {

/// Binary layout, little endian:
///   0  "MSPD"
///   4  u16 version (1)
///   6  u16 alphabet size |X| (BOS not counted)
///   8  u32 row width (stored ids per sequence, BOS included)
///   12 u64 sequence count
///   20 u32 flags (bit 0: BOS prepended)
///   24 8 reserved zero bytes
///   32 count * width u16 token ids
inline constexpr std::uint16_t kDatasetVersion = 1;
inline constexpr std::uint32_t kFlagBos = 1;

std::string dataset_binary(const Dataset& dataset);
/// One {"tokens": [ids]} object per line.
std::string dataset_jsonl(const Dataset& dataset);
/// Spec, encoding, alphabet and (when given) the generating process JSON.
std::string dataset_meta_json(const Dataset& dataset, const std::string& process_json = {});

void write_dataset_binary(const Dataset& dataset, const std::filesystem::path& path);
void write_dataset_jsonl(const Dataset& dataset, const std::filesystem::path& path);

/// ValidationError on a bad header or truncated payload.
Dataset parse_dataset_binary(const std::string& bytes);
Dataset read_dataset_binary(const std::filesystem::path& path);
/// Needs the alphabet size and BOS flag, normally from meta.json.
Dataset parse_dataset_jsonl(const std::string& text, std::size_t alphabet_size, bool bos);
/// Binary or JSONL by extension (.bin / .jsonl); JSONL reads the adjacent
/// meta.json.
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace myopic
