#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include <myopic/dataset_io.hpp>
#include <myopic/entropy.hpp>
#include <myopic/errors.hpp>
#include <myopic/numeric.hpp>
#include <myopic/philox.hpp>
#include <myopic/process_io.hpp>
#include <myopic/sampler.hpp>
#include <myopic/zoo.hpp>

using namespace myopic;

namespace {

DatasetSpec spec(std::size_t length, std::size_t count, std::uint64_t seed = 7) {
  DatasetSpec s;
  s.sequence_length = length;
  s.sequence_count = count;
  s.seed = seed;
  return s;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("myopic_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Philox, KnownAnswers) {
  EXPECT_EQ(philox4x64({0, 0, 0, 0}, {0, 0}),
            (PhiloxCounter{0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL, 0xd7e772cee186176bULL,
                           0x7e68b68aec7ba23bULL}));
  const auto ones = ~std::uint64_t{0};
  EXPECT_EQ(philox4x64({ones, ones, ones, ones}, {ones, ones}),
            (PhiloxCounter{0x87b092c3013fe90bULL, 0x438c3c67be8d0224ULL, 0x9cc7d7c69cd777b6ULL,
                           0xa09caebf594f0ba0ULL}));
  EXPECT_EQ(philox4x64({0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL, 0xa4093822299f31d0ULL,
                        0x082efa98ec4e6c89ULL},
                       {0x452821e638d01377ULL, 0xbe5466cf34e90c6cULL}),
            (PhiloxCounter{0xa528f45403e61d95ULL, 0x38c72dbd566e9788ULL, 0xa5a1610e72fd18b5ULL,
                           0x57bd43b5e52b7fe6ULL}));
}

TEST(Philox, StreamLayout) {
  SequenceStream s(42, 3);
  const auto block = philox4x64({3, 1, 0, 0}, {42, 0});
  EXPECT_EQ(s.bits(5), block[1]);
  EXPECT_EQ(s.bits(0), philox4x64({3, 0, 0, 0}, {42, 0})[0]);
  EXPECT_EQ(s.bits(5), block[1]);
  const double u = s.uniform(6);
  EXPECT_GE(u, 0.0);
  EXPECT_LT(u, 1.0);
  EXPECT_EQ(to_unit_interval(~std::uint64_t{0}), 1.0 - 0x1.0p-53);
}

TEST(Sampler, FairCoinFrequency) {
  const auto d = sample_dataset(biased_coin(0.5), spec(100, 10000), 4);
  double ones = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t t = 0; t < 100; ++t) ones += d.token(i, t);
  }
  const double n = 1e6;
  EXPECT_NEAR(ones / n, 0.5, 4.0 * 0.5 / std::sqrt(n));
}

TEST(Sampler, GoldenMeanNeverRepeatsOne) {
  const auto d = sample_dataset(golden_mean(), spec(200, 500));
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t t = 1; t < 200; ++t) {
      ASSERT_FALSE(d.token(i, t) == 1 && d.token(i, t - 1) == 1);
    }
  }
}

TEST(Sampler, TwoCoinsAreBimodal) {
  const auto d = sample_dataset(two_biased_coins(), spec(100, 4000));
  std::size_t middle = 0, low = 0;
  double low_rate = 0.0, high_rate = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double ones = 0;
    for (std::size_t t = 0; t < 100; ++t) ones += d.token(i, t);
    const double rate = ones / 100.0;
    if (rate > 0.45 && rate < 0.55) ++middle;
    if (d.components[i] == 0) {
      ++low;
      low_rate += rate;
    } else {
      high_rate += rate;
    }
  }
  EXPECT_LT(middle, 40u);
  EXPECT_NEAR(low / 4000.0, 0.5, 0.05);
  EXPECT_NEAR(low_rate / low, 0.25, 0.01);
  EXPECT_NEAR(high_rate / (4000 - low), 0.75, 0.01);
}

TEST(Sampler, IndependentOfThreadCount) {
  const auto z = wonka_dursley();
  const auto ref = dataset_binary(sample_dataset(z, spec(64, 997), 1));
  for (unsigned t : {2u, 3u, 8u}) EXPECT_EQ(dataset_binary(sample_dataset(z, spec(64, 997), t)), ref);
  EXPECT_NE(dataset_binary(sample_dataset(z, spec(64, 997, 8), 1)), ref);
}

TEST(Sampler, BosColumn) {
  const auto d = sample_dataset(even_process(), spec(10, 5));
  ASSERT_EQ(d.row_width(), 11u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(d.tokens[i * 11], kBosId);
    for (std::size_t t = 0; t < 10; ++t) EXPECT_GE(d.id(i, t), 1);
  }
  auto s = spec(10, 5);
  s.bos = false;
  const auto plain = sample_dataset(even_process(), s);
  EXPECT_EQ(plain.row_width(), 10u);
  EXPECT_EQ(plain.encoding().front().first, "0");
  EXPECT_EQ(d.encoding().front().first, "<bos>");
}

TEST(Sampler, InvalidSpec) {
  EXPECT_THROW(sample_dataset(even_process(), spec(0, 5)), ValidationError);
  EXPECT_THROW(sample_dataset(even_process(), spec(5, 0)), ValidationError);
}

TEST(DatasetIo, BinaryHeaderAndRoundTrip) {
  const auto d = sample_dataset(even_process(), spec(12, 3));
  const auto bytes = dataset_binary(d);
  ASSERT_EQ(bytes.size(), 32u + 3 * 13 * 2);
  EXPECT_EQ(bytes.substr(0, 4), "MSPD");
  std::uint16_t version, nx;
  std::uint32_t width, flags;
  std::uint64_t count;
  std::memcpy(&version, bytes.data() + 4, 2);
  std::memcpy(&nx, bytes.data() + 6, 2);
  std::memcpy(&width, bytes.data() + 8, 4);
  std::memcpy(&count, bytes.data() + 12, 8);
  std::memcpy(&flags, bytes.data() + 20, 4);
  EXPECT_EQ(version, kDatasetVersion);
  EXPECT_EQ(nx, 2);
  EXPECT_EQ(width, 13u);
  EXPECT_EQ(count, 3u);
  EXPECT_EQ(flags, kFlagBos);

  const auto back = parse_dataset_binary(bytes);
  EXPECT_EQ(back.tokens, d.tokens);
  EXPECT_THROW(parse_dataset_binary(bytes.substr(0, 40)), ValidationError);
  EXPECT_THROW(parse_dataset_binary("XXXX" + bytes.substr(4)), ValidationError);

  const auto jl = parse_dataset_jsonl(dataset_jsonl(d), 2, true);
  EXPECT_EQ(jl.tokens, d.tokens);
}

TEST(DatasetIo, FilesWithMeta) {
  const auto dir = temp_dir("dataset_io");
  auto s = spec(16, 4);
  s.process_name = "even";
  const auto d = sample_dataset(even_process(), s);
  write_dataset_binary(d, dir / "dataset.bin");
  write_dataset_jsonl(d, dir / "dataset.jsonl");
  std::ofstream(dir / "meta.json") << dataset_meta_json(d, process_to_json(even_process().process));
  const auto a = read_dataset(dir / "dataset.bin");
  const auto b = read_dataset(dir / "dataset.jsonl");
  EXPECT_EQ(a.tokens, d.tokens);
  EXPECT_EQ(b.tokens, d.tokens);
  EXPECT_EQ(b.alphabet, d.alphabet);
  EXPECT_EQ(a.spec.seed, 7u);
  EXPECT_THROW(read_dataset(dir / "missing.bin"), IoError);
}

TEST(Plugin, FairCoinHasNoSpread) {
  const auto d = sample_dataset(biased_coin(0.5), spec(20, 50));
  const auto est = plugin_entropy_estimate(d, biased_coin(0.5).process);
  EXPECT_TRUE(est.sem_defined);
  for (std::size_t l = 0; l < 20; ++l) {
    EXPECT_NEAR(est.curve.values[l], kLn2, 1e-15);
    EXPECT_NEAR(est.sem[l], 0.0, 1e-15);
  }
}

TEST(Plugin, SingleSequenceHasNoSem) {
  const auto d = sample_dataset(even_process(), spec(20, 1));
  const auto est = plugin_entropy_estimate(d, even_process().process);
  EXPECT_FALSE(est.sem_defined);
  EXPECT_TRUE(std::isnan(est.sem[3]));
}

TEST(Plugin, EvenWithinThreeSem) {
  const auto d = sample_dataset(even_process(), spec(64, 20000, 2024), 4);
  const auto est = plugin_entropy_estimate(d, even_process().process);
  const auto theory = myopic_entropy_curve(even_process(), 64);
  for (std::size_t l = 0; l < 64; ++l) {
    EXPECT_LE(std::abs(est.curve.values[l] - theory.values[l]), 3.0 * est.sem[l] + 1e-12) << l + 1;
    EXPECT_LE(est.stddev[l], std::log(2.0));
  }
}

TEST(Plugin, SemShrinksLikeRootM) {
  const auto theory = myopic_entropy_curve(even_process(), 32);
  double prev = 0.0;
  for (std::size_t m : {1000u, 10000u, 100000u}) {
    const auto d = sample_dataset(even_process(), spec(32, m, 11), 4);
    const auto est = plugin_entropy_estimate(d, even_process().process);
    double mean_sem = 0.0;
    for (std::size_t l = 1; l < 32; ++l) mean_sem += est.sem[l] / 31.0;
    if (prev > 0.0) {
      EXPECT_NEAR(prev / mean_sem, std::sqrt(10.0), 0.2 * std::sqrt(10.0));
    }
    prev = mean_sem;
  }
}

TEST(Plugin, ForbiddenTokensAreAMismatch) {
  const auto d = sample_dataset(biased_coin(0.5), spec(50, 10));
  EXPECT_THROW(plugin_entropy_estimate(d, golden_mean().process), DatasetMismatch);
  EXPECT_THROW(plugin_entropy_estimate(d, wonka_dursley().process), DatasetMismatch);
}

TEST(Plugin, EvenAtFullRealizationCount) {
  const auto d = sample_dataset(even_process(), spec(64, 200000, 99), 8);
  const auto est = plugin_entropy_estimate(d, even_process().process);
  const auto theory = myopic_entropy_curve(even_process(), 64);
  for (std::size_t l = 0; l < 64; ++l) {
    EXPECT_LE(std::abs(est.curve.values[l] - theory.values[l]), 3.0 * est.sem[l] + 1e-12) << l + 1;
  }
}
