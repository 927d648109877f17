#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include <myopic/errors.hpp>
#include <myopic/numeric.hpp>
#include <myopic/process.hpp>
#include <myopic/process_io.hpp>
#include <myopic/zoo.hpp>

using namespace myopic;

namespace {

HiddenMarkovProcess golden_raw() {
  std::vector<Matrix> t(2, Matrix::Zero(2, 2));
  t[0](0, 0) = 0.5;
  t[1](0, 1) = 0.5;
  t[0](1, 0) = 1.0;
  RowVector init(2);
  init << 2.0 / 3.0, 1.0 / 3.0;
  return HiddenMarkovProcess({"0", "1"}, {"A", "B"}, init, t);
}

bool has_code(const ValidationReport& r, const std::string& code) {
  for (const auto& i : r.issues) {
    if (i.code == code) return true;
  }
  return false;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("myopic_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Numeric, EntropyHelpers) {
  EXPECT_DOUBLE_EQ(entropy_term(0.0), 0.0);
  EXPECT_NEAR(binary_entropy(0.5), kLn2, 1e-15);
  EXPECT_NEAR(binary_entropy(1.0 / 3.0), 0.6365141682948128, 1e-15);
  const std::vector<double> w{1.0, 1.0, 2.0};
  EXPECT_NEAR(shannon_entropy(w), -(0.25 * std::log(0.25) * 2 + 0.5 * std::log(0.5)), 1e-15);
}

TEST(Numeric, LogSumExpIsStable) {
  const std::vector<double> v{-1000.0, -1000.0};
  EXPECT_NEAR(log_sum_exp(v), -1000.0 + std::log(2.0), 1e-12);
  EXPECT_EQ(log_sum_exp(std::vector<double>{}), -INFINITY);
  EXPECT_NEAR(log_add_exp(std::log(0.25), std::log(0.5)), std::log(0.75), 1e-15);
}

TEST(Numeric, PairwiseSumAndBinomial) {
  std::vector<double> v(1000, 0.1);
  EXPECT_NEAR(pairwise_sum(v), 100.0, 1e-12);
  EXPECT_NEAR(std::exp(log_binomial(10, 3)), 120.0, 1e-9);
  EXPECT_DOUBLE_EQ(log_binomial(5, 0), 0.0);
}

TEST(Process, ConstructorRejectsShapes) {
  std::vector<Matrix> t(2, Matrix::Zero(2, 2));
  EXPECT_THROW(HiddenMarkovProcess({"0"}, {"A", "B"}, RowVector::Zero(2), t), ValidationError);
  EXPECT_THROW(HiddenMarkovProcess({"0", "1"}, {"A", "B"}, RowVector::Zero(3), t),
               ValidationError);
  EXPECT_THROW(HiddenMarkovProcess({"0", "0"}, {"A", "B"}, RowVector::Zero(2), t),
               ValidationError);
}

TEST(Process, ValidationReportsEachInvariant) {
  EXPECT_TRUE(validate(golden_raw()).valid());

  auto t = golden_raw().transitions();
  t[0](0, 0) = 0.6;
  RowVector init = golden_raw().initial();
  auto bad_row = HiddenMarkovProcess({"0", "1"}, {"A", "B"}, init, t);
  EXPECT_TRUE(has_code(validate(bad_row), "row_stochastic"));
  EXPECT_THROW(require_valid(bad_row), ValidationError);

  t = golden_raw().transitions();
  t[0](0, 0) = -0.5;
  t[1](0, 1) = 1.5;
  EXPECT_TRUE(has_code(validate(HiddenMarkovProcess({"0", "1"}, {"A", "B"}, init, t)),
                       "entry_range"));

  RowVector off(2);
  off << 0.5, 0.6;
  EXPECT_TRUE(has_code(validate(golden_raw().with_initial(off)), "initial_sum"));
}

TEST(Process, UnreachableStateIsAWarning) {
  std::vector<Matrix> t(2, Matrix::Zero(3, 3));
  t[0](0, 0) = 0.5;
  t[1](0, 0) = 0.5;
  t[0](1, 1) = 1.0;
  t[0](2, 2) = 1.0;
  RowVector init = RowVector::Zero(3);
  init(0) = 1.0;
  const auto r = validate(HiddenMarkovProcess({"0", "1"}, {"A", "B", "C"}, init, t));
  EXPECT_TRUE(r.valid());
  EXPECT_FALSE(r.warnings().empty());
  EXPECT_TRUE(has_code(r, "unreachable"));
}

TEST(Process, ForbiddenContinuationIsTyped) {
  const auto p = golden_raw();
  auto after_one = belief_update(p, Belief::initial(p), 1);
  ASSERT_FALSE(after_one.forbidden());
  EXPECT_NEAR(after_one.probability, 1.0 / 3.0, 1e-15);
  auto twice = belief_update(p, *after_one.next, 1);
  EXPECT_TRUE(twice.forbidden());
  EXPECT_EQ(twice.probability, 0.0);
}

TEST(Process, SequenceProbabilities) {
  const auto p = golden_raw();
  const Word w0{0}, w11{1, 1}, w101{1, 0, 1};
  EXPECT_NEAR(sequence_probability(p, w0), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(sequence_probability(p, w11), 0.0);
  EXPECT_EQ(log_sequence_probability(p, w11), -INFINITY);
  EXPECT_NEAR(sequence_probability(p, w101), 1.0 / 3.0 * 0.5, 1e-15);
  const auto dist = next_token_distribution(p, Belief::initial(p));
  EXPECT_NEAR(dist[0] + dist[1], 1.0, 1e-15);
}

TEST(Process, EncodeDecode) {
  const auto p = golden_raw();
  const std::vector<std::string> labels{"0", "1", "0"};
  const auto w = p.encode(labels);
  EXPECT_EQ(w, (Word{0, 1, 0}));
  EXPECT_EQ(p.decode(w, ""), "010");
  const std::vector<std::string> bad{"2"};
  EXPECT_THROW(p.encode(bad), ValidationError);
}

TEST(Process, StationaryDistribution) {
  RowVector start(2);
  start << 1.0, 0.0;
  const auto s = stationary_distribution(golden_raw().with_initial(start));
  ASSERT_TRUE(s.converged);
  EXPECT_NEAR(s.distribution(0), 2.0 / 3.0, 1e-12);
  EXPECT_TRUE(is_stationary(golden_raw()));
  EXPECT_FALSE(is_stationary(golden_raw().with_initial(start)));
}

TEST(Process, JsonRoundTrip) {
  const auto p = golden_raw();
  const auto back = parse_process_json(process_to_json(p));
  EXPECT_EQ(back.alphabet(), p.alphabet());
  EXPECT_EQ(back.states(), p.states());
  for (Token x = 0; x < 2; ++x) EXPECT_TRUE(back.transition(x).isApprox(p.transition(x)));
  EXPECT_TRUE(back.initial().isApprox(p.initial()));
}

TEST(Process, JsonErrors) {
  EXPECT_THROW(parse_process_json("{"), ValidationError);
  EXPECT_THROW(parse_process_json(R"({"alphabet": ["0"]})"), ValidationError);
  // Parses but is not stochastic.
  EXPECT_THROW(parse_process_json(
                   R"({"alphabet":["0"],"states":["A"],"initial":[1],"transitions":{"0":[[0.5]]}})"),
               ValidationError);
  EXPECT_THROW(load_process("/nonexistent/definitely.json"), IoError);
}

TEST(Process, MixtureFromFilesWithRelativePaths) {
  const auto dir = temp_dir("mixture");
  {
    std::ofstream(dir / "a.json") << process_to_json(biased_coin(0.25).process);
    std::ofstream(dir / "b.json") << process_to_json(biased_coin(0.75).process);
    std::ofstream(dir / "mix.json")
        << R"({"components":[{"weight":0.5,"process":"a.json"},{"weight":0.5,"process":"b.json"}]})";
  }
  const auto loaded = load_process_or_mixture(dir / "mix.json");
  ASSERT_TRUE(loaded.mixture.has_value());
  EXPECT_EQ(loaded.mixture->size(), 2u);
  EXPECT_EQ(loaded.process.state_count(), 2u);
  EXPECT_EQ(loaded.process.states()[1], "c1:C");

  const auto round = parse_mixture_json(mixture_to_json(*loaded.mixture));
  EXPECT_NEAR(round[1].weight, 0.5, 1e-15);

  std::ofstream(dir / "bad.json")
      << R"({"components":[{"weight":0.7,"process":"a.json"},{"weight":0.5,"process":"b.json"}]})";
  EXPECT_THROW(load_mixture(dir / "bad.json"), ValidationError);
}

TEST(Mixture, BlockDiagonalRealization) {
  const auto two = two_biased_coins(0.25, 0.75, 0.3);
  ASSERT_TRUE(two.mixture.has_value());
  const auto& hmm = two.process;
  EXPECT_NEAR(hmm.initial()(0), 0.3, 1e-15);
  EXPECT_NEAR(hmm.initial()(1), 0.7, 1e-15);
  EXPECT_EQ(hmm.transition(0)(0, 1), 0.0);
  EXPECT_EQ(two.mixture->block_offset(1), 1u);
  EXPECT_THROW(MixtureProcess({}), ValidationError);
}

namespace {

std::vector<Word> all_words(std::size_t alphabet, std::size_t length) {
  std::vector<Word> out{Word{}};
  for (std::size_t l = 0; l < length; ++l) {
    std::vector<Word> next;
    for (const auto& w : out) {
      for (Token x = 0; x < alphabet; ++x) {
        next.push_back(w);
        next.back().push_back(x);
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

TEST(Process, EnumerationIsNormalized) {
  for (const auto& e : zoo_registry()) {
    if (!e.has_hmm) continue;
    const auto z = build_zoo_process(e.name);
    if (z.process.alphabet_size() > 3) continue;
    for (std::size_t l = 1; l <= 8; ++l) {
      double total = 0.0;
      for (const auto& w : all_words(z.process.alphabet_size(), l)) {
        total += sequence_probability(z.process, w);
      }
      EXPECT_NEAR(total, 1.0, 1e-9) << e.name << " l=" << l;
    }
  }
}

TEST(Process, BeliefChainMatchesSequenceProbability) {
  for (auto z : {even_process(), simple_nonunifilar_source(0.3, 0.6), teddy_bear()}) {
    for (const auto& w : all_words(z.process.alphabet_size(), 6)) {
      const double direct = log_sequence_probability(z.process, w);
      Belief b = Belief::initial(z.process);
      double chained = 0.0;
      bool forbidden = false;
      for (Token x : w) {
        auto step = belief_update(z.process, b, x);
        if (step.forbidden()) {
          forbidden = true;
          break;
        }
        chained += std::log(step.probability);
        b = *step.next;
      }
      if (forbidden) {
        EXPECT_EQ(direct, -INFINITY);
      } else {
        EXPECT_NEAR(direct, chained, 1e-12);
      }
    }
  }
}

TEST(Mixture, PreservesSequenceProbabilities) {
  for (auto z : {n_biased_coins(3), two_biased_coins(0.2, 0.9, 0.3)}) {
    const auto& mix = *z.mixture;
    for (std::size_t l = 1; l <= 6; ++l) {
      for (const auto& w : all_words(2, l)) {
        double expected = 0.0;
        for (const auto& c : mix.components()) expected += c.weight * sequence_probability(c.process, w);
        EXPECT_NEAR(sequence_probability(z.process, w), expected, 1e-12);
      }
    }
  }
}

TEST(Mixture, SmallExamples) {
  const auto fair = biased_coin(0.5).process;
  const MixtureProcess twin({{0.5, fair}, {0.5, fair}});
  const auto hmm = mixture_as_hmm(twin);
  for (const auto& w : all_words(2, 5)) {
    EXPECT_NEAR(sequence_probability(hmm, w), std::pow(0.5, 5), 1e-15);
  }
  EXPECT_NEAR(sequence_probability(n_biased_coins(3).process, Word{1}), 0.5, 1e-15);
  const auto one = n_biased_coins(1).process;
  for (const auto& w : all_words(2, 4)) {
    EXPECT_DOUBLE_EQ(sequence_probability(one, w), sequence_probability(fair, w));
  }
}

TEST(Process, EvenWordAgainstPathSum) {
  const auto p = even_process().process;
  const Word w{0, 1, 0};
  // Sum over every latent path s0 -> s1 -> s2 -> s3.
  double total = 0.0;
  const auto n = static_cast<Eigen::Index>(p.state_count());
  for (Eigen::Index s0 = 0; s0 < n; ++s0) {
    for (Eigen::Index s1 = 0; s1 < n; ++s1) {
      for (Eigen::Index s2 = 0; s2 < n; ++s2) {
        for (Eigen::Index s3 = 0; s3 < n; ++s3) {
          total += p.initial()(s0) * p.transition(w[0])(s0, s1) * p.transition(w[1])(s1, s2) *
                   p.transition(w[2])(s2, s3);
        }
      }
    }
  }
  EXPECT_EQ(total, 0.0);
  EXPECT_EQ(sequence_probability(p, w), total);
  EXPECT_NEAR(sequence_probability(biased_coin(0.5).process, Word(10, 1)), std::pow(2.0, -10), 1e-18);
}
